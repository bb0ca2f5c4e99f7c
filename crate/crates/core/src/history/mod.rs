//! Linearized commit histories, from git or from a directory of snapshots.
//!
//! A snapshot directory looks like
//!
//! ```text
//! root/
//!   000_init/Player.java
//!   001_add/Player.java
//!   001_add/meta.json      (optional: hash, author_date, committer_date, parents)
//! ```
//!
//! and is walked in ascending numeric-prefix order.

mod git;
mod snapdir;

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, FixedOffset, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use git::GIT_EXECUTABLE_ENV;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CommitRef {
    pub hash: String,
    pub author_date: String,
    pub committer_date: String,
    pub parents: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceKind {
    VcsRepo(PathBuf),
    SnapshotDir(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistorySource {
    pub kind: SourceKind,
    /// Only commits strictly before this timestamp are walked.
    pub before_date: Option<String>,
}

impl HistorySource {
    pub fn repo(path: impl Into<PathBuf>) -> Self {
        HistorySource { kind: SourceKind::VcsRepo(path.into()), before_date: None }
    }

    pub fn snapshots(path: impl Into<PathBuf>) -> Self {
        HistorySource { kind: SourceKind::SnapshotDir(path.into()), before_date: None }
    }

    pub fn before(mut self, date: impl Into<String>) -> Self {
        self.before_date = Some(date.into());
        self
    }

    pub fn path(&self) -> &Path {
        match &self.kind {
            SourceKind::VcsRepo(p) | SourceKind::SnapshotDir(p) => p,
        }
    }
}

/// One source file's contents; `id` identifies identical contents (the git
/// blob id, or a content digest for snapshot directories).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceBlob {
    pub id: String,
    pub text: Arc<str>,
}

impl SourceBlob {
    pub fn from_bytes(bytes: &[u8]) -> Self {
        use sha2::{Digest, Sha256};
        SourceBlob { id: hex::encode(Sha256::digest(bytes)), text: String::from_utf8_lossy(bytes).into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub commit: CommitRef,
    pub index: usize,
    /// `.java` files only, keyed by repository-relative path.
    pub files: BTreeMap<String, SourceBlob>,
}

#[derive(Debug, Error)]
pub enum HistoryError {
    #[error("cannot access repository {path}: {reason}")]
    RepoAccess { path: PathBuf, reason: String },
    #[error("{tool} failed: {reason}")]
    ToolInvocation { tool: String, reason: String },
    #[error("invalid snapshot directory {path}: {reason}")]
    Layout { path: PathBuf, reason: String },
    #[error("invalid date `{0}`")]
    BadDate(String),
    #[error("commit {0} is not part of the walked history")]
    UnknownCommit(String),
}

/// Parses the timestamp forms accepted for cut-off dates: RFC 3339, or a
/// zone-less `YYYY-MM-DDTHH:MM:SS` / `YYYY-MM-DD` taken as UTC.
pub fn parse_timestamp(text: &str) -> Option<DateTime<FixedOffset>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(text) {
        return Some(t);
    }
    let utc = FixedOffset::east_opt(0)?;
    if let Ok(t) = NaiveDateTime::parse_from_str(text, "%Y-%m-%dT%H:%M:%S") {
        return t.and_local_timezone(utc).single();
    }
    let d = NaiveDate::parse_from_str(text, "%Y-%m-%d").ok()?;
    d.and_hms_opt(0, 0, 0)?.and_local_timezone(utc).single()
}

/// Commits of the source, oldest first.
///
/// For git this runs `git log --before=<date> --cherry-pick --date-order
/// --pretty=format:%H;%aI;%cI;%P` and reverses the result.
pub fn linearize_history(source: &HistorySource) -> Result<Vec<CommitRef>, HistoryError> {
    if let Some(date) = &source.before_date {
        parse_timestamp(date).ok_or_else(|| HistoryError::BadDate(date.clone()))?;
    }
    match &source.kind {
        SourceKind::VcsRepo(path) => git::log(path, source.before_date.as_deref()),
        SourceKind::SnapshotDir(path) => {
            Ok(snapdir::scan(path, source.before_date.as_deref())?.into_iter().map(|e| e.commit).collect())
        }
    }
}

/// Materializes a single commit. Prefer [`History`] when walking many.
pub fn materialize_snapshot(
    source: &HistorySource,
    commit: &CommitRef,
    index: usize,
) -> Result<Snapshot, HistoryError> {
    match &source.kind {
        SourceKind::VcsRepo(path) => git::GitReader::new(path).snapshot(commit, index),
        SourceKind::SnapshotDir(path) => {
            let entry = snapdir::scan(path, None)?
                .into_iter()
                .find(|e| e.commit.hash == commit.hash)
                .ok_or_else(|| HistoryError::UnknownCommit(commit.hash.clone()))?;
            snapdir::snapshot(&entry, index)
        }
    }
}

enum Backend {
    Git(git::GitReader),
    Dir(HashMap<String, snapdir::Entry>),
}

/// An opened, linearized history that materializes snapshots on demand.
/// Git blobs are read through one long-lived `git cat-file` and cached.
pub struct History {
    commits: Vec<CommitRef>,
    backend: Backend,
}

impl History {
    pub fn open(source: &HistorySource) -> Result<Self, HistoryError> {
        if let Some(date) = &source.before_date {
            parse_timestamp(date).ok_or_else(|| HistoryError::BadDate(date.clone()))?;
        }
        match &source.kind {
            SourceKind::VcsRepo(path) => {
                let commits = git::log(path, source.before_date.as_deref())?;
                Ok(History { commits, backend: Backend::Git(git::GitReader::new(path)) })
            }
            SourceKind::SnapshotDir(path) => {
                let entries = snapdir::scan(path, source.before_date.as_deref())?;
                let commits = entries.iter().map(|e| e.commit.clone()).collect();
                let by_hash = entries.into_iter().map(|e| (e.commit.hash.clone(), e)).collect();
                Ok(History { commits, backend: Backend::Dir(by_hash) })
            }
        }
    }

    pub fn commits(&self) -> &[CommitRef] {
        &self.commits
    }

    pub fn len(&self) -> usize {
        self.commits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commits.is_empty()
    }

    pub fn snapshot(&mut self, index: usize) -> Result<Snapshot, HistoryError> {
        let commit = self.commits.get(index).ok_or_else(|| HistoryError::UnknownCommit(format!("#{index}")))?;
        match &mut self.backend {
            Backend::Git(reader) => reader.snapshot(commit, index),
            Backend::Dir(entries) => {
                let entry =
                    entries.get(&commit.hash).ok_or_else(|| HistoryError::UnknownCommit(commit.hash.clone()))?;
                snapdir::snapshot(entry, index)
            }
        }
    }
}
