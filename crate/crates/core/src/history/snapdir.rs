use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat};
use regex::Regex;
use serde::Deserialize;
use walkdir::WalkDir;

use super::{parse_timestamp, CommitRef, HistoryError, Snapshot, SourceBlob};

#[derive(Debug, Default, Deserialize)]
struct Meta {
    hash: Option<String>,
    author_date: Option<String>,
    committer_date: Option<String>,
    parents: Option<Vec<String>>,
}

#[derive(Debug, Clone)]
pub(super) struct Entry {
    pub commit: CommitRef,
    pub dir: PathBuf,
}

fn layout_error(path: &Path, reason: impl Into<String>) -> HistoryError {
    HistoryError::Layout { path: path.to_path_buf(), reason: reason.into() }
}

/// Validates the layout and returns entries in ascending prefix order.
pub(super) fn scan(root: &Path, before: Option<&str>) -> Result<Vec<Entry>, HistoryError> {
    if !root.is_dir() {
        return Err(HistoryError::RepoAccess { path: root.to_path_buf(), reason: "not a directory".into() });
    }
    let pattern = Regex::new(r"^(\d+)_(.+)$").expect("static regex");
    let read =
        fs::read_dir(root).map_err(|e| HistoryError::RepoAccess { path: root.to_path_buf(), reason: e.to_string() })?;

    let mut dirs = Vec::new();
    for item in read {
        let item = item.map_err(|e| HistoryError::RepoAccess { path: root.to_path_buf(), reason: e.to_string() })?;
        let path = item.path();
        if !path.is_dir() {
            continue;
        }
        let name = item.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') {
            continue;
        }
        let caps = pattern
            .captures(&name)
            .ok_or_else(|| layout_error(&path, "snapshot directories must be named <NNN>_<label>"))?;
        let prefix = caps[1].to_string();
        let number: u64 = prefix.parse().map_err(|_| layout_error(&path, "snapshot number out of range"))?;
        dirs.push((number, prefix, path));
    }
    dirs.sort();
    if let Some(w) = dirs.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(layout_error(&w[1].2, format!("duplicate snapshot number {}", w[1].0)));
    }

    let cutoff = before.map(|b| parse_timestamp(b).ok_or_else(|| HistoryError::BadDate(b.to_string()))).transpose()?;
    let mut entries: Vec<Entry> = Vec::with_capacity(dirs.len());
    let mut seen = HashSet::new();
    for (number, prefix, dir) in dirs {
        let meta = read_meta(&dir)?;
        let synthetic_date = i64::try_from(number)
            .ok()
            .and_then(|n| DateTime::from_timestamp(n, 0))
            .map(|t| t.to_rfc3339_opts(SecondsFormat::Secs, true))
            .ok_or_else(|| layout_error(&dir, "snapshot number out of range"))?;
        let hash = meta.hash.unwrap_or_else(|| format!("fix-{prefix}"));
        if !seen.insert(hash.clone()) {
            return Err(layout_error(&dir, format!("duplicate hash {hash}")));
        }
        let committer_date = meta.committer_date.unwrap_or_else(|| synthetic_date.clone());
        let commit = CommitRef {
            author_date: meta.author_date.unwrap_or_else(|| committer_date.clone()),
            parents: meta
                .parents
                .unwrap_or_else(|| entries.last().map(|e| vec![e.commit.hash.clone()]).unwrap_or_default()),
            committer_date,
            hash,
        };
        if let Some(cutoff) = cutoff {
            let date = parse_timestamp(&commit.committer_date)
                .ok_or_else(|| layout_error(&dir, format!("bad committer_date `{}`", commit.committer_date)))?;
            // inclusive, like `git log --before`
            if date > cutoff {
                continue;
            }
        }
        entries.push(Entry { commit, dir });
    }
    Ok(entries)
}

fn read_meta(dir: &Path) -> Result<Meta, HistoryError> {
    let path = dir.join("meta.json");
    match fs::read(&path) {
        Ok(bytes) => serde_json::from_slice(&bytes).map_err(|e| layout_error(&path, e.to_string())),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Meta::default()),
        Err(e) => Err(HistoryError::RepoAccess { path, reason: e.to_string() }),
    }
}

pub(super) fn snapshot(entry: &Entry, index: usize) -> Result<Snapshot, HistoryError> {
    let access = |path: &Path, e: &dyn std::fmt::Display| HistoryError::RepoAccess {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    let mut files = BTreeMap::new();
    for item in WalkDir::new(&entry.dir).sort_by_file_name() {
        let item = item.map_err(|e| access(&entry.dir, &e))?;
        if !item.file_type().is_file() || item.path().extension().is_none_or(|x| x != "java") {
            continue;
        }
        let rel = item.path().strip_prefix(&entry.dir).expect("walked under dir");
        let rel = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        let bytes = fs::read(item.path()).map_err(|e| access(item.path(), &e))?;
        files.insert(rel, SourceBlob::from_bytes(&bytes));
    }
    Ok(Snapshot { commit: entry.commit.clone(), index, files })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(root: &Path, rel: &str, text: &str) {
        let p = root.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, text).unwrap();
    }

    #[test]
    fn walks_in_numeric_order_with_synthetic_refs() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "002_remove/.keep", "");
        write(tmp.path(), "000_init/A.java", "class A {}");
        write(tmp.path(), "001_add/A.java", "class A {}");
        write(tmp.path(), "001_add/sub/Player.java", "class Player {}");
        write(tmp.path(), "001_add/notes.txt", "x");
        let entries = scan(tmp.path(), None).unwrap();
        let hashes: Vec<_> = entries.iter().map(|e| e.commit.hash.as_str()).collect();
        assert_eq!(hashes, vec!["fix-000", "fix-001", "fix-002"]);
        assert_eq!(entries[1].commit.committer_date, "1970-01-01T00:00:01Z");
        assert_eq!(entries[1].commit.parents, vec!["fix-000"]);

        let snap = snapshot(&entries[1], 1).unwrap();
        assert_eq!(snap.files.keys().collect::<Vec<_>>(), vec!["A.java", "sub/Player.java"]);
        assert!(snapshot(&entries[2], 2).unwrap().files.is_empty());
    }

    #[test]
    fn meta_json_overrides_and_cutoff() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "000_a/meta.json", r#"{"hash":"aaa","committer_date":"2018-01-01T00:00:00Z"}"#);
        write(tmp.path(), "001_b/meta.json", r#"{"hash":"bbb","committer_date":"2019-01-01T00:00:00Z"}"#);
        let all = scan(tmp.path(), None).unwrap();
        assert_eq!(all[0].commit.hash, "aaa");
        assert_eq!(all[0].commit.author_date, "2018-01-01T00:00:00Z");
        let cut = scan(tmp.path(), Some("2018-09-04T00:00:00")).unwrap();
        assert_eq!(cut.len(), 1);
        assert_eq!(scan(tmp.path(), Some("2019-01-01T00:00:00Z")).unwrap().len(), 2);
    }

    #[test]
    fn rejects_bad_layout() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "init/A.java", "");
        assert!(matches!(scan(tmp.path(), None), Err(HistoryError::Layout { .. })));

        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "1_a/A.java", "");
        write(tmp.path(), "01_b/A.java", "");
        assert!(matches!(scan(tmp.path(), None), Err(HistoryError::Layout { .. })));
    }

    #[test]
    fn missing_root_is_access_error() {
        assert!(matches!(scan(Path::new("/nonexistent/snapdir"), None), Err(HistoryError::RepoAccess { .. })));
    }
}
