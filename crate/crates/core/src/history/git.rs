use std::collections::{BTreeMap, HashMap};
use std::ffi::OsString;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Arc;

use super::{parse_timestamp, CommitRef, HistoryError, Snapshot, SourceBlob};

/// Overrides the git executable (default: `git` on `PATH`).
pub const GIT_EXECUTABLE_ENV: &str = "NOSQLEVO_GIT";

fn git_executable() -> OsString {
    std::env::var_os(GIT_EXECUTABLE_ENV).unwrap_or_else(|| "git".into())
}

fn git(repo: &Path) -> Command {
    let mut cmd = Command::new(git_executable());
    cmd.arg("-C")
        .arg(repo)
        .args(["-c", "log.showSignature=false", "-c", "core.quotePath=false"])
        .env("GIT_PAGER", "")
        .env("LC_ALL", "C");
    cmd
}

fn tool_error(err: io::Error) -> HistoryError {
    HistoryError::ToolInvocation { tool: git_executable().to_string_lossy().into_owned(), reason: err.to_string() }
}

fn check_repo(repo: &Path) -> Result<(), HistoryError> {
    if repo.is_dir() {
        Ok(())
    } else {
        Err(HistoryError::RepoAccess { path: repo.to_path_buf(), reason: "not a directory".into() })
    }
}

fn run(repo: &Path, args: &[&str]) -> Result<Vec<u8>, HistoryError> {
    let out = git(repo).args(args).stdin(Stdio::null()).output().map_err(tool_error)?;
    if out.status.success() {
        return Ok(out.stdout);
    }
    let stderr = String::from_utf8_lossy(&out.stderr).trim().to_string();
    if stderr.contains("not a git repository") || stderr.contains("bad object") || stderr.contains("corrupt") {
        Err(HistoryError::RepoAccess { path: repo.to_path_buf(), reason: stderr })
    } else {
        Err(HistoryError::ToolInvocation {
            tool: format!("git {}", args.first().copied().unwrap_or_default()),
            reason: format!("{} ({stderr})", out.status),
        })
    }
}

pub(super) fn log(repo: &Path, before: Option<&str>) -> Result<Vec<CommitRef>, HistoryError> {
    check_repo(repo)?;
    // git would read a naive timestamp in local time; pin it to the parsed instant
    let before_arg = before
        .map(|b| {
            parse_timestamp(b)
                .map(|t| format!("--before={}", t.to_rfc3339()))
                .ok_or_else(|| HistoryError::BadDate(b.to_string()))
        })
        .transpose()?;
    let mut args: Vec<&str> = vec!["log"];
    if let Some(b) = &before_arg {
        args.push(b);
    }
    args.extend(["--cherry-pick", "--date-order", "--pretty=format:%H;%aI;%cI;%P"]);

    let stdout = match run(repo, &args) {
        Ok(out) => out,
        // a freshly initialized repository has an unborn HEAD
        Err(HistoryError::ToolInvocation { reason, .. }) if reason.contains("does not have any commits") => {
            return Ok(Vec::new())
        }
        Err(e) => return Err(e),
    };
    let text = String::from_utf8_lossy(&stdout);
    let mut commits = text
        .lines()
        .filter(|l| !l.is_empty())
        .map(|line| {
            parse_log_line(line).ok_or_else(|| HistoryError::ToolInvocation {
                tool: "git log".into(),
                reason: format!("unexpected output line `{line}`"),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    commits.reverse();
    Ok(commits)
}

fn parse_log_line(line: &str) -> Option<CommitRef> {
    let mut parts = line.split(';');
    let hash = parts.next()?.trim();
    let author_date = parts.next()?;
    let committer_date = parts.next()?;
    let parents = parts.next()?;
    if hash.is_empty() || parts.next().is_some() {
        return None;
    }
    Some(CommitRef {
        hash: hash.to_string(),
        author_date: author_date.to_string(),
        committer_date: committer_date.to_string(),
        parents: parents.split_whitespace().map(str::to_string).collect(),
    })
}

struct CatFile {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl Drop for CatFile {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub(super) struct GitReader {
    repo: PathBuf,
    cat: Option<CatFile>,
    blobs: HashMap<String, Arc<str>>,
}

impl GitReader {
    pub fn new(repo: &Path) -> Self {
        GitReader { repo: repo.to_path_buf(), cat: None, blobs: HashMap::new() }
    }

    /// `(path, blob id)` of every `.java` file in the commit's tree.
    fn java_files(&self, commit: &str) -> Result<Vec<(String, String)>, HistoryError> {
        check_repo(&self.repo)?;
        let out = run(&self.repo, &["ls-tree", "-r", "-z", "--full-tree", commit])?;
        let mut files = Vec::new();
        for record in out.split(|b| *b == 0).filter(|r| !r.is_empty()) {
            let record = String::from_utf8_lossy(record);
            let Some((meta, path)) = record.split_once('\t') else { continue };
            let mut meta = meta.split(' ');
            let (_mode, kind, oid) = (meta.next(), meta.next(), meta.next());
            if kind == Some("blob") && path.ends_with(".java") {
                if let Some(oid) = oid {
                    files.push((path.to_string(), oid.to_string()));
                }
            }
        }
        Ok(files)
    }

    fn cat_file(&mut self) -> Result<&mut CatFile, HistoryError> {
        if self.cat.is_none() {
            let mut child = git(&self.repo)
                .args(["cat-file", "--batch"])
                .stdin(Stdio::piped())
                .stdout(Stdio::piped())
                .stderr(Stdio::null())
                .spawn()
                .map_err(tool_error)?;
            let stdin = child.stdin.take().expect("piped stdin");
            let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
            self.cat = Some(CatFile { child, stdin, stdout });
        }
        Ok(self.cat.as_mut().expect("just spawned"))
    }

    fn blob(&mut self, oid: &str) -> Result<Arc<str>, HistoryError> {
        if let Some(text) = self.blobs.get(oid) {
            return Ok(text.clone());
        }
        let repo = self.repo.clone();
        let cat = self.cat_file()?;
        let broken = |reason: String| HistoryError::ToolInvocation { tool: "git cat-file".into(), reason };
        writeln!(cat.stdin, "{oid}").and_then(|_| cat.stdin.flush()).map_err(|e| broken(e.to_string()))?;
        let mut header = String::new();
        cat.stdout.read_line(&mut header).map_err(|e| broken(e.to_string()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let size = match fields.as_slice() {
            [_, "blob", size] => size.parse::<usize>().map_err(|e| broken(e.to_string()))?,
            _ => {
                self.cat = None;
                return Err(HistoryError::RepoAccess { path: repo, reason: format!("missing blob {oid}") });
            }
        };
        let mut buf = vec![0u8; size + 1];
        cat.stdout.read_exact(&mut buf).map_err(|e| broken(e.to_string()))?;
        buf.pop();
        let text: Arc<str> = String::from_utf8_lossy(&buf).into();
        self.blobs.insert(oid.to_string(), text.clone());
        Ok(text)
    }

    pub fn snapshot(&mut self, commit: &CommitRef, index: usize) -> Result<Snapshot, HistoryError> {
        let mut files = BTreeMap::new();
        for (path, oid) in self.java_files(&commit.hash)? {
            let text = self.blob(&oid)?;
            files.insert(path, SourceBlob { id: oid, text });
        }
        Ok(Snapshot { commit: commit.clone(), index, files })
    }
}
