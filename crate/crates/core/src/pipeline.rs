//! End-to-end run: walk the history, build and diff schemas, emit a report.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use thiserror::Error;

use crate::entity::{EntityClass, MapperDialect};
use crate::history::{parse_timestamp, History, HistoryError, HistorySource, Snapshot, SourceKind};
use crate::java::count_file_code_lines;
use crate::metrics::SnapshotStats;
use crate::report::{emit_report_bundle, ReportBundle, ReportError, ReportOptions};
use crate::schema::{diff_snapshots, SchemaBuilder, SchemaChange, SchemaSnapshot};

pub const DEFAULT_MIN_COMMITS_WARN: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub source: HistorySource,
    pub dialect: MapperDialect,
    pub output_dir: PathBuf,
    pub min_commits_warn: usize,
    /// Worker threads; `None` uses one per core.
    pub jobs: Option<usize>,
    /// Leave the manifest timestamp out so reruns are byte-identical.
    pub deterministic_manifest: bool,
    pub project_label: Option<String>,
}

impl RunConfig {
    pub fn new(source: HistorySource, output_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            source,
            dialect: MapperDialect::Auto,
            output_dir: output_dir.into(),
            min_commits_warn: DEFAULT_MIN_COMMITS_WARN,
            jobs: None,
            deterministic_manifest: false,
            project_label: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.jobs == Some(0) {
            return Err(ConfigError::ZeroJobs);
        }
        if let Some(date) = &self.source.before_date {
            if parse_timestamp(date).is_none() {
                return Err(ConfigError::BadDate(date.clone()));
            }
        }
        let source = absolute(self.source.path());
        let out = absolute(&self.output_dir);
        if out == source {
            return Err(ConfigError::OutputIsSource(self.output_dir.clone()));
        }
        if matches!(self.source.kind, SourceKind::SnapshotDir(_)) && out.starts_with(&source) {
            return Err(ConfigError::OutputInsideSnapshots(self.output_dir.clone()));
        }
        Ok(())
    }

    /// The explicit label, else the source directory's name.
    pub fn label(&self) -> String {
        self.project_label.clone().unwrap_or_else(|| {
            absolute(self.source.path())
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "project".into())
        })
    }
}

fn absolute(path: &Path) -> PathBuf {
    path.canonicalize().unwrap_or_else(|_| std::path::absolute(path).unwrap_or_else(|_| path.to_path_buf()))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("--jobs must be at least 1")]
    ZeroJobs,
    #[error("invalid --before date `{0}` (expected ISO 8601, e.g. 2018-09-04T00:00:00)")]
    BadDate(String),
    #[error("output directory {0} is the analyzed source itself")]
    OutputIsSource(PathBuf),
    #[error("output directory {0} lies inside the snapshot directory")]
    OutputInsideSnapshots(PathBuf),
}

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error("none of the {0} .java file version(s) in the history could be parsed")]
    NothingParsed(usize),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// Everything a report needs from one walked history.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub stats: Vec<SnapshotStats>,
    pub changes: Vec<SchemaChange>,
    /// Each entity as it looked when last present.
    pub last_seen: BTreeMap<String, EntityClass>,
    pub final_schema: SchemaSnapshot,
    /// `commit <index> <hash>: <message>`, each reported at the first
    /// commit where it appears (not repeated while it persists).
    pub diagnostics: Vec<String>,
    pub java_loc_first: u64,
    pub java_loc_last: u64,
}

impl Analysis {
    pub fn total_commits(&self) -> usize {
        self.stats.len()
    }

    pub fn final_entities(&self) -> BTreeSet<String> {
        self.final_schema.entities.keys().cloned().collect()
    }

    pub fn dialect_of(&self, commit_index: usize) -> &str {
        self.stats.get(commit_index).map_or("none", |s| s.dialect_label.as_str())
    }
}

fn java_loc(snapshot: &Snapshot) -> u64 {
    snapshot.files.par_iter().map(|(_, b)| u64::from(count_file_code_lines(&b.text))).sum()
}

/// Folds a stream of snapshots (in walk order) into an [`Analysis`].
pub struct Analyzer {
    builder: SchemaBuilder,
    previous: SchemaSnapshot,
    previous_diagnostics: HashSet<String>,
    java_versions_seen: usize,
    analysis: Analysis,
}

impl Analyzer {
    pub fn new(dialect: MapperDialect) -> Self {
        Analyzer {
            builder: SchemaBuilder::new(dialect),
            previous: SchemaSnapshot::empty(),
            previous_diagnostics: HashSet::new(),
            java_versions_seen: 0,
            analysis: Analysis {
                stats: Vec::new(),
                changes: Vec::new(),
                last_seen: BTreeMap::new(),
                final_schema: SchemaSnapshot::empty(),
                diagnostics: Vec::new(),
                java_loc_first: 0,
                java_loc_last: 0,
            },
        }
    }

    /// Returns the changes this snapshot introduced.
    pub fn push(&mut self, snapshot: &Snapshot) -> &[SchemaChange] {
        self.java_versions_seen += snapshot.files.len();
        let schema = self.builder.build(snapshot);
        let changes = diff_snapshots(&self.previous, &schema);

        let a = &mut self.analysis;
        let current: HashSet<String> = schema.diagnostics.iter().cloned().collect();
        for d in &schema.diagnostics {
            if !self.previous_diagnostics.contains(d) {
                a.diagnostics.push(format!("commit {} {}: {d}", schema.index, schema.commit.hash));
            }
        }
        self.previous_diagnostics = current;

        a.stats.push(SnapshotStats::of(&schema));
        for (name, e) in &schema.entities {
            a.last_seen.insert(name.clone(), e.clone());
        }
        let start = a.changes.len();
        a.changes.extend(changes);
        self.previous = schema;
        &self.analysis.changes[start..]
    }

    pub fn finish(mut self) -> Result<Analysis, AnalyzeError> {
        if self.java_versions_seen > 0 && !self.builder.parsed_any() {
            return Err(AnalyzeError::NothingParsed(self.java_versions_seen));
        }
        self.analysis.final_schema = self.previous;
        Ok(self.analysis)
    }
}

/// Walks `source` and analyzes every commit in order.
pub fn analyze(source: &HistorySource, dialect: MapperDialect) -> Result<Analysis, AnalyzeError> {
    let mut history = History::open(source)?;
    let n = history.len();
    info!("{} commit(s) to analyze", n);
    let mut analyzer = Analyzer::new(dialect);
    for i in 0..n {
        let snapshot = history.snapshot(i)?;
        if i == 0 {
            analyzer.analysis.java_loc_first = java_loc(&snapshot);
        }
        if i + 1 == n {
            analyzer.analysis.java_loc_last = java_loc(&snapshot);
        }
        let n_changes = analyzer.push(&snapshot).len();
        let stats = analyzer.analysis.stats.last().expect("just pushed");
        info!(
            "[{}/{}] {} {} entities, schema-loc {}, {} change(s)",
            i + 1,
            n,
            snapshot.commit.hash,
            stats.n_entities,
            stats.schema_loc,
            n_changes
        );
    }
    analyzer.finish()
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub analysis: Analysis,
    pub bundle: ReportBundle,
}

/// Validates the configuration, analyzes the history and writes the bundle.
pub fn run_analyze(config: &RunConfig) -> Result<RunOutcome, AnalyzeError> {
    config.validate()?;
    let run = || analyze(&config.source, config.dialect);
    let analysis = match config.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| AnalyzeError::Pool(e.to_string()))?
            .install(run)?,
        None => run()?,
    };

    let mut warnings = Vec::new();
    if analysis.total_commits() < config.min_commits_warn {
        let w = format!(
            "only {} commit(s) analyzed (fewer than {}); histories this short are typical of tinker projects and may not be representative",
            analysis.total_commits(),
            config.min_commits_warn
        );
        warn!("{w}");
        warnings.push(w);
    }
    let options = ReportOptions {
        project_label: config.label(),
        dialect: config.dialect,
        deterministic: config.deterministic_manifest,
        warnings,
    };
    let bundle = emit_report_bundle(&analysis, &config.output_dir, &options)?;
    Ok(RunOutcome { analysis, bundle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(root: &Path, rel: &str, text: &str) {
        let p = root.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, text).unwrap();
    }

    #[test]
    fn config_validation() {
        let tmp = tempfile::tempdir().unwrap();
        let src = HistorySource::snapshots(tmp.path());
        assert_eq!(
            RunConfig::new(src.clone(), tmp.path()).validate(),
            Err(ConfigError::OutputIsSource(tmp.path().into()))
        );
        assert!(matches!(
            RunConfig::new(src.clone(), tmp.path().join("out")).validate(),
            Err(ConfigError::OutputInsideSnapshots(_))
        ));
        let mut c = RunConfig::new(src.clone(), "/tmp/elsewhere-report");
        c.jobs = Some(0);
        assert_eq!(c.validate(), Err(ConfigError::ZeroJobs));
        let c = RunConfig::new(src.before("next tuesday"), "/tmp/elsewhere-report");
        assert!(matches!(c.validate(), Err(ConfigError::BadDate(_))));
    }

    #[test]
    fn persistent_diagnostics_reported_once() {
        let tmp = tempfile::tempdir().unwrap();
        for d in ["000_a", "001_b", "002_c"] {
            write(tmp.path(), &format!("{d}/Bad.java"), "class Bad {");
        }
        write(tmp.path(), "002_c/Good.java", "class Good {}");
        let a = analyze(&HistorySource::snapshots(tmp.path()), MapperDialect::Auto).unwrap();
        assert_eq!(a.diagnostics.len(), 1, "{:?}", a.diagnostics);
        assert!(a.diagnostics[0].starts_with("commit 0 fix-000: Bad.java"));
    }

    #[test]
    fn nothing_parsed_is_an_error() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "000_a/Bad.java", "class Bad {");
        write(tmp.path(), "001_b/Bad.java", "}");
        assert!(matches!(
            analyze(&HistorySource::snapshots(tmp.path()), MapperDialect::Auto),
            Err(AnalyzeError::NothingParsed(2))
        ));
    }

    #[test]
    fn history_without_java_is_fine() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "000_a/README", "x");
        let a = analyze(&HistorySource::snapshots(tmp.path()), MapperDialect::Auto).unwrap();
        assert_eq!(a.total_commits(), 1);
        assert!(a.changes.is_empty());
    }
}
