//! Recovers the implicit NoSQL schema of Objectify and Morphia applications
//! from their version history, diffs it commit by commit, and derives
//! schema-evolution metrics and chart-ready reports.
//!
//! ```no_run
//! use nosqlevo_core::{run_analyze, HistorySource, MapperDialect, RunConfig};
//!
//! let mut config = RunConfig::new(HistorySource::repo("./nomulus").before("2018-09-04T00:00:00"), "./report");
//! config.dialect = MapperDialect::Objectify;
//! let outcome = run_analyze(&config).unwrap();
//! println!("{} commits", outcome.analysis.total_commits());
//! ```

pub mod entity;
pub mod history;
pub mod java;
pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod schema;

pub use entity::{
    extract_entities, Classification, DenormReason, DenormVerdict, DetectionBasis, EntityClass, MapperDialect,
    SchemaAttribute,
};
pub use history::{
    linearize_history, materialize_snapshot, CommitRef, History, HistoryError, HistorySource, Snapshot, SourceBlob,
};
pub use java::{count_code_lines, parse_source, AnnotationUse, ClassDecl, FieldDecl, LineSpan, ParseError, SourceFile};
pub use metrics::{ChangeDistribution, ChurnStats, EntityChurn, SnapshotStats, TrendPoint};
pub use pipeline::{analyze, run_analyze, Analysis, AnalyzeError, ConfigError, RunConfig};
pub use report::{emit_report_bundle, ReportBundle, ReportError};
pub use schema::{
    build_schema_snapshot, diff_snapshots, ChangeDetail, ChangeKind, SchemaBuilder, SchemaChange, SchemaSnapshot,
};
