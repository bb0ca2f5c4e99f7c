//! The report bundle: chart-ready CSV/JSON files plus a digest manifest.
//!
//! | file | contents |
//! |---|---|
//! | `trend.csv` | entity count and Schema-LoC per commit, raw and normalized |
//! | `changes.csv` | one row per schema change |
//! | `dotmatrix.json` | denormalization verdict per final entity |
//! | `treemap.json` | Schema-LoC and change count per entity ever seen |
//! | `distribution.json` | change counts and shares, overall and per mapper |
//! | `drilldown.json` | type / initialization / annotation change counts |
//! | `summary.json` | life cycle, commit and entity counts, churn, correlation |
//! | `diagnostics.txt` | parser and extractor diagnostics |
//! | `manifest.json` | SHA-256 of each file above |

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::entity::MapperDialect;
use crate::metrics::{
    attribute_change_drilldown, change_distribution, churn_rate, distribution_by_dialect, entity_churn, pearson,
    trend_series,
};
use crate::pipeline::Analysis;
use crate::schema::{ChangeDetail, SchemaChange};

pub const FORMAT_VERSION: &str = "1";
pub const MANIFEST_FILE: &str = "manifest.json";

pub const CHANGES_HEADER: [&str; 8] =
    ["commit_index", "hash", "committer_date", "kind", "entity", "attribute", "detail_before", "detail_after"];
pub const TREND_HEADER: [&str; 7] =
    ["commit_index", "hash", "pct_progress", "n_entities", "schema_loc", "n_entities_norm_pct", "schema_loc_norm_pct"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportOptions {
    pub project_label: String,
    pub dialect: MapperDialect,
    /// Omit the generation timestamp from the manifest.
    pub deterministic: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: String,
    pub project_label: String,
    pub dialect: MapperDialect,
    pub generated_at: Option<String>,
    pub files: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportBundle {
    pub output_dir: PathBuf,
    pub manifest: Manifest,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed changes.csv: {0}")]
    Csv(String),
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> ReportError + '_ {
    move |source| ReportError::Io { path: path.to_path_buf(), source }
}

fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 input")
}

pub fn render_trend_csv(analysis: &Analysis) -> String {
    csv_text(
        &TREND_HEADER,
        trend_series(&analysis.stats).into_iter().map(|p| {
            vec![
                p.commit_index.to_string(),
                p.hash,
                format!("{:.4}", p.pct_progress),
                p.n_entities.to_string(),
                p.schema_loc.to_string(),
                format!("{:.4}", p.n_entities_norm_pct),
                format!("{:.4}", p.schema_loc_norm_pct),
            ]
        }),
    )
}

/// Absent values are written as empty cells.
pub fn render_changes_csv(changes: &[SchemaChange]) -> String {
    csv_text(
        &CHANGES_HEADER,
        changes.iter().map(|c| {
            let detail = c.detail.clone().unwrap_or(ChangeDetail { before: None, after: None });
            vec![
                c.commit_index.to_string(),
                c.commit_hash.clone(),
                c.committer_date.clone(),
                c.kind.to_string(),
                c.entity.clone(),
                c.attribute.clone().unwrap_or_default(),
                detail.before.unwrap_or_default(),
                detail.after.unwrap_or_default(),
            ]
        }),
    )
}

/// Parses `changes.csv` back into change records.
pub fn parse_changes_csv(text: &str) -> Result<Vec<SchemaChange>, ReportError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| ReportError::Csv(e.to_string()))?;
    if header.iter().ne(CHANGES_HEADER) {
        return Err(ReportError::Csv(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let opt = |s: &str| (!s.is_empty()).then(|| s.to_string());
    let mut out = Vec::new();
    for record in r.records() {
        let rec = record.map_err(|e| ReportError::Csv(e.to_string()))?;
        let field = |i: usize| rec.get(i).unwrap_or_default();
        let kind: crate::schema::ChangeKind = field(3).parse().map_err(ReportError::Csv)?;
        out.push(SchemaChange {
            commit_index: field(0).parse().map_err(|e| ReportError::Csv(format!("commit_index: {e}")))?,
            commit_hash: field(1).to_string(),
            committer_date: field(2).to_string(),
            kind,
            entity: field(4).to_string(),
            attribute: opt(field(5)),
            detail: kind.has_detail().then(|| ChangeDetail { before: opt(field(6)), after: opt(field(7)) }),
        });
    }
    Ok(out)
}

pub fn read_changes_csv(path: &Path) -> Result<Vec<SchemaChange>, ReportError> {
    parse_changes_csv(&fs::read_to_string(path).map_err(io_error(path))?)
}

pub fn render_dotmatrix(analysis: &Analysis) -> Value {
    let entities: Vec<Value> = analysis
        .final_schema
        .entities
        .values()
        .map(|e| {
            json!({
                "qualified_name": e.qualified_name,
                "classification": e.verdict.classification,
                "reasons": e.verdict.reasons,
            })
        })
        .collect();
    let denormalized = analysis.final_schema.entities.values().filter(|e| e.verdict.is_denormalized()).count();
    json!({
        "commit": analysis.final_schema.commit.hash,
        "denormalized_count": denormalized,
        "entity_count": entities.len(),
        "entities": entities,
    })
}

pub fn render_treemap(analysis: &Analysis) -> Value {
    let churn = entity_churn(&analysis.changes, &analysis.last_seen, &analysis.final_entities());
    let entities: Vec<Value> = churn
        .iter()
        .map(|c| {
            json!({
                "qualified_name": c.qualified_name,
                "schema_loc": c.schema_loc,
                "change_count": c.change_count,
                "relative_frequency": c.relative_frequency,
                "present_at_end": c.present_at_end,
            })
        })
        .collect();
    json!({
        "max_change_count": churn.iter().map(|c| c.change_count).max().unwrap_or(0),
        "entities": entities,
    })
}

pub fn render_distribution(analysis: &Analysis) -> Value {
    json!({
        "overall": change_distribution(&analysis.changes),
        "by_dialect": distribution_by_dialect(&analysis.changes, |c| analysis.dialect_of(c.commit_index)),
    })
}

pub fn render_drilldown(analysis: &Analysis) -> Value {
    serde_json::to_value(attribute_change_drilldown(&analysis.changes)).expect("plain struct")
}

pub fn render_summary(analysis: &Analysis, options: &ReportOptions) -> Value {
    let stats = &analysis.stats;
    let first = stats.first();
    let last = stats.last();
    let entity_counts = stats.iter().map(|s| s.n_entities);
    let locs = stats.iter().map(|s| s.schema_loc);
    let xs: Vec<f64> = stats.iter().map(|s| s.n_entities as f64).collect();
    let ys: Vec<f64> = stats.iter().map(|s| s.schema_loc as f64).collect();
    let correlation = match pearson(&xs, &ys) {
        Ok(r) => {
            json!({ "method": "pearson", "series": ["n_entities", "schema_loc"], "value": r, "undefined_reason": null })
        }
        Err(e) => {
            json!({ "method": "pearson", "series": ["n_entities", "schema_loc"], "value": null, "undefined_reason": e.to_string() })
        }
    };
    let dialects: std::collections::BTreeSet<&str> = stats.iter().map(|s| s.dialect_label.as_str()).collect();
    json!({
        "format_version": FORMAT_VERSION,
        "project_label": options.project_label,
        "mapper": options.dialect,
        "detected_mappers": dialects,
        "life_cycle": {
            "first_commit": first.map(|s| &s.hash),
            "first_commit_date": first.map(|s| &s.committer_date),
            "last_commit": last.map(|s| &s.hash),
            "last_commit_date": last.map(|s| &s.committer_date),
        },
        "total_commits": stats.len(),
        "entity_classes": {
            "min": entity_counts.clone().min(),
            "max": entity_counts.clone().max(),
            "final": last.map(|s| s.n_entities),
        },
        "schema_loc": {
            "min": locs.clone().min(),
            "max": locs.clone().max(),
            "first": first.map(|s| s.schema_loc),
            "last": last.map(|s| s.schema_loc),
        },
        "java_loc": { "first": analysis.java_loc_first, "last": analysis.java_loc_last },
        "total_changes": analysis.changes.len(),
        "churn": churn_rate(&analysis.changes, stats.len() as u64),
        "correlation": correlation,
        "diagnostic_count": analysis.diagnostics.len(),
        "warnings": options.warnings,
    })
}

pub fn render_diagnostics(analysis: &Analysis, options: &ReportOptions) -> String {
    let mut s = String::new();
    for line in options.warnings.iter().map(|w| format!("warning: {w}")).chain(analysis.diagnostics.iter().cloned()) {
        s.push_str(&line.replace('\n', " "));
        s.push('\n');
    }
    s
}

/// The report files in emission order, without the manifest.
pub fn render_bundle(analysis: &Analysis, options: &ReportOptions) -> Vec<(&'static str, String)> {
    vec![
        ("trend.csv", render_trend_csv(analysis)),
        ("changes.csv", render_changes_csv(&analysis.changes)),
        ("dotmatrix.json", json_text(&render_dotmatrix(analysis))),
        ("treemap.json", json_text(&render_treemap(analysis))),
        ("distribution.json", json_text(&render_distribution(analysis))),
        ("drilldown.json", json_text(&render_drilldown(analysis))),
        ("summary.json", json_text(&render_summary(analysis, options))),
        ("diagnostics.txt", render_diagnostics(analysis, options)),
    ]
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes the bundle into `output_dir`. Either every file is written or,
/// on failure, the files written so far (and the directory, if this call
/// created it) are removed again.
pub fn emit_report_bundle(
    analysis: &Analysis,
    output_dir: &Path,
    options: &ReportOptions,
) -> Result<ReportBundle, ReportError> {
    let mut files = render_bundle(analysis, options);
    let manifest = Manifest {
        format_version: FORMAT_VERSION.into(),
        project_label: options.project_label.clone(),
        dialect: options.dialect,
        generated_at: (!options.deterministic)
            .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
        files: files
            .iter()
            .map(|(name, text)| ManifestEntry {
                name: name.to_string(),
                sha256: sha256_hex(text.as_bytes()),
                bytes: text.len() as u64,
            })
            .collect(),
    };
    let mut manifest_text = serde_json::to_string_pretty(&manifest).expect("plain struct");
    manifest_text.push('\n');
    files.push((MANIFEST_FILE, manifest_text));

    let created = !output_dir.exists();
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| {
        fs::create_dir_all(output_dir).map_err(io_error(output_dir))?;
        for (name, text) in &files {
            let path = output_dir.join(name);
            fs::write(&path, text).map_err(io_error(&path))?;
            written.push(path);
        }
        Ok(())
    })();
    if let Err(e) = result {
        for path in &written {
            let _ = fs::remove_file(path);
        }
        if created {
            let _ = fs::remove_dir_all(output_dir);
        }
        return Err(e);
    }
    Ok(ReportBundle { output_dir: output_dir.to_path_buf(), manifest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::{HistorySource, Snapshot, SourceBlob};
    use crate::pipeline::Analyzer;
    use crate::schema::ChangeKind;

    fn options() -> ReportOptions {
        ReportOptions {
            project_label: "demo".into(),
            dialect: MapperDialect::Auto,
            deterministic: true,
            warnings: vec![],
        }
    }

    fn empty_analysis() -> Analysis {
        Analyzer::new(MapperDialect::Auto).finish().unwrap()
    }

    fn small_analysis() -> Analysis {
        let mut a = Analyzer::new(MapperDialect::Auto);
        let sources = [
            "import com.googlecode.objectify.annotation.*;\n@Entity class P { @Id Long id; }",
            "import com.googlecode.objectify.annotation.*;\n@Entity class P { @Id Long id; List<String> tags; }",
        ];
        for (i, s) in sources.iter().enumerate() {
            let mut snap = Snapshot {
                commit: crate::history::CommitRef {
                    hash: format!("h{i}"),
                    author_date: "2020-01-01T00:00:00Z".into(),
                    committer_date: "2020-01-01T00:00:00Z".into(),
                    parents: vec![],
                },
                index: i,
                files: Default::default(),
            };
            snap.files.insert("P.java".into(), SourceBlob::from_bytes(s.as_bytes()));
            a.push(&snap);
        }
        a.finish().unwrap()
    }

    #[test]
    fn empty_history_bundle() {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().join("report");
        let bundle = emit_report_bundle(&empty_analysis(), &out, &options()).unwrap();
        assert_eq!(bundle.manifest.files.len(), 8);
        for entry in &bundle.manifest.files {
            let bytes = fs::read(out.join(&entry.name)).unwrap();
            assert_eq!(sha256_hex(&bytes), entry.sha256);
            if entry.name != "diagnostics.txt" {
                assert!(bytes.ends_with(b"\n"), "{}", entry.name);
            }
        }
        let summary: Value = serde_json::from_slice(&fs::read(out.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary["format_version"], "1");
        assert_eq!(summary["total_commits"], 0);
        assert_eq!(summary["churn"]["churn_rate_pct"], 0.0);
        assert!(summary["correlation"]["value"].is_null());
        assert_eq!(fs::read_to_string(out.join("changes.csv")).unwrap(), CHANGES_HEADER.join(",") + "\n");
        let _ = HistorySource::snapshots(&out);
    }

    #[test]
    fn changes_round_trip() {
        let a = small_analysis();
        assert_eq!(a.changes.len(), 2);
        let text = render_changes_csv(&a.changes);
        assert_eq!(parse_changes_csv(&text).unwrap(), a.changes);
    }

    #[test]
    fn quoting_survives_round_trip() {
        let c = SchemaChange {
            commit_hash: "h".into(),
            commit_index: 3,
            committer_date: "d".into(),
            kind: ChangeKind::AttributeAnnotationChanged,
            entity: "E".into(),
            attribute: Some("a".into()),
            detail: Some(ChangeDetail { before: Some("@AlsoLoad({\"x\",\"y\"})".into()), after: None }),
        };
        let text = render_changes_csv(std::slice::from_ref(&c));
        assert!(text.contains("\"@AlsoLoad({\"\"x\"\",\"\"y\"\"})\""));
        assert_eq!(parse_changes_csv(&text).unwrap(), vec![c]);
    }

    #[test]
    fn distribution_matches_rows() {
        let a = small_analysis();
        let d = render_distribution(&a);
        assert_eq!(d["overall"]["counts"]["entity_added"], 1);
        assert_eq!(d["overall"]["counts"]["attribute_added"], 1);
        assert_eq!(d["by_dialect"]["objectify"]["total"], 2);
        let dot = render_dotmatrix(&a);
        assert_eq!(dot["entities"][0]["classification"], "denormalized");
        assert_eq!(dot["entities"][0]["reasons"][0], "container_type");
    }

    #[test]
    fn failed_emit_cleans_up() {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().join("report");
        fs::create_dir_all(out.join("summary.json")).unwrap();
        assert!(emit_report_bundle(&small_analysis(), &out, &options()).is_err());
        assert!(!out.join("trend.csv").exists());
        assert!(out.exists(), "pre-existing directory is kept");

        let blocked = tmp.path().join("file");
        fs::write(&blocked, "").unwrap();
        assert!(emit_report_bundle(&small_analysis(), &blocked.join("report"), &options()).is_err());
    }

    #[test]
    fn manifest_timestamp_only_when_requested() {
        let tmp = tempfile::tempdir().unwrap();
        let mut o = options();
        o.deterministic = false;
        let b = emit_report_bundle(&empty_analysis(), tmp.path(), &o).unwrap();
        assert!(b.manifest.generated_at.is_some());
    }
}
