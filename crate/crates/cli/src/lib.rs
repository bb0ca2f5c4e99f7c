//! `nosqlevo analyze`: mine a repository (or snapshot directory) for the
//! evolution of its Objectify/Morphia schema and write a report bundle.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use log::error;

use nosqlevo_core::history::GIT_EXECUTABLE_ENV;
use nosqlevo_core::pipeline::DEFAULT_MIN_COMMITS_WARN;
use nosqlevo_core::{run_analyze, AnalyzeError, HistorySource, MapperDialect, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nosqlevo", version, about = "Schema evolution analysis for Objectify and Morphia applications")]
#[command(after_help = format!("Set {GIT_EXECUTABLE_ENV} to use a git executable other than the one on PATH.\nRUST_LOG overrides the log level."))]
pub struct Cli {
    /// Only print warnings and errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Walk a history and write the report bundle.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["repo", "snapshots"])))]
pub struct AnalyzeArgs {
    /// Local git repository.
    #[arg(long, value_name = "PATH")]
    pub repo: Option<PathBuf>,

    /// Directory of numbered snapshot directories (`000_init/`, `001_.../`).
    #[arg(long, value_name = "PATH")]
    pub snapshots: Option<PathBuf>,

    /// Analyze only commits before this date, e.g. 2018-09-04T00:00:00.
    #[arg(long, value_name = "ISO8601")]
    pub before: Option<String>,

    /// Annotation vocabulary: objectify, morphia, or auto (from imports).
    #[arg(long, value_name = "MAPPER", default_value = "auto", value_parser = parse_mapper)]
    pub mapper: MapperDialect,

    /// Output directory for the report files.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,

    /// Worker threads (default: one per core).
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,

    /// Omit the generation timestamp so reruns produce identical files.
    #[arg(long)]
    pub deterministic: bool,

    /// Warn when the history has fewer commits than this.
    #[arg(long, value_name = "N", default_value_t = DEFAULT_MIN_COMMITS_WARN)]
    pub min_commits: usize,

    /// Project name used in the report (default: source directory name).
    #[arg(long)]
    pub label: Option<String>,
}

fn parse_mapper(s: &str) -> Result<MapperDialect, String> {
    s.parse()
}

impl AnalyzeArgs {
    pub fn to_config(&self) -> RunConfig {
        let mut source = match (&self.repo, &self.snapshots) {
            (Some(repo), _) => HistorySource::repo(repo),
            (None, Some(dir)) => HistorySource::snapshots(dir),
            (None, None) => unreachable!("clap enforces one source"),
        };
        source.before_date = self.before.clone();
        RunConfig {
            source,
            dialect: self.mapper,
            output_dir: self.out.clone(),
            min_commits_warn: self.min_commits,
            jobs: self.jobs,
            deterministic_manifest: self.deterministic,
            project_label: self.label.clone(),
        }
    }
}

fn init_logging(quiet: bool) {
    let level = if quiet { "warn" } else { "info" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .format_target(false)
        .try_init();
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    init_logging(cli.quiet);
    match cli.command {
        Command::Analyze(args) => analyze(&args),
    }
}

fn analyze(args: &AnalyzeArgs) -> i32 {
    let config = args.to_config();
    match run_analyze(&config) {
        Ok(outcome) => {
            let a = &outcome.analysis;
            let churn = nosqlevo_core::metrics::churn_rate(&a.changes, a.total_commits() as u64);
            println!(
                "{}: {} commits, {} schema changes in {} commits ({:.1}% churn), {} entities at the end; report in {}",
                config.label(),
                a.total_commits(),
                a.changes.len(),
                churn.schema_relevant_commits,
                churn.churn_rate_pct,
                a.final_schema.entities.len(),
                outcome.bundle.output_dir.display()
            );
            EXIT_OK
        }
        Err(AnalyzeError::Config(e)) => {
            error!("{e}");
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn sources_are_exclusive_and_required() {
        assert!(Cli::try_parse_from(["nosqlevo", "analyze", "--out", "o"]).is_err());
        assert!(Cli::try_parse_from(["nosqlevo", "analyze", "--repo", "r", "--snapshots", "s", "--out", "o"]).is_err());
        let cli =
            Cli::try_parse_from(["nosqlevo", "analyze", "--repo", "r", "--out", "o", "--mapper", "Morphia"]).unwrap();
        let Command::Analyze(a) = cli.command;
        let config = a.to_config();
        assert_eq!(config.dialect, MapperDialect::Morphia);
        assert_eq!(config.min_commits_warn, 20);
    }

    #[test]
    fn bad_mapper_is_config_error() {
        assert_eq!(run(["nosqlevo", "analyze", "--repo", "r", "--out", "o", "--mapper", "jpa"]), EXIT_CONFIG);
    }
}
