//! Command-line front end for the `bonnesen-core` verification library.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::Parser;

use config::{Cli, Command, CommandKind, ConfigFile, OutputFormat, RunConfig};
use report::{ReportDocument, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ANOMALY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (kind, flags) = match cli.command {
        Command::Verify(f) => (CommandKind::Verify, f),
        Command::Certify(f) => (CommandKind::Certify, f),
        Command::Search(f) => (CommandKind::Search, f),
        Command::Catalog(f) => (CommandKind::Catalog, f),
        Command::Report(r) => return check_report(&r.input, r.format.unwrap_or(OutputFormat::Text), r.out.as_deref()),
    };

    let file = match config::config_path(&flags) {
        Some(path) => match config::load_file(&path) {
            Ok(f) => f,
            Err(e) => return usage(e),
        },
        None => ConfigFile::default(),
    };
    let cfg = match RunConfig::resolve(kind, &flags, &file) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let doc = match kind {
        CommandKind::Verify => commands::verify(&cfg),
        CommandKind::Certify => commands::certify_cmd(&cfg),
        CommandKind::Search => commands::search(&cfg),
        CommandKind::Catalog => commands::catalog_cmd(&cfg),
        CommandKind::Report => unreachable!("handled above"),
    };
    let doc = match doc {
        Ok(d) => d,
        Err(commands::CommandError::Usage(e)) => return usage(e),
    };
    if let Err(e) = emit(&doc, cfg.format, cfg.out.as_deref()) {
        return usage(e);
    }
    eprintln!(
        "{}: {} ({} records, {} violations, {} anomalies)",
        kind.name(),
        if doc.status == Status::Pass { "pass" } else { "FAIL" },
        doc.summary.records,
        doc.summary.violations,
        doc.summary.anomalies
    );
    match doc.status {
        Status::Pass => EXIT_OK,
        Status::Fail => EXIT_ANOMALY,
    }
}

fn usage(e: impl std::fmt::Display) -> i32 {
    eprintln!("error: {e}");
    EXIT_USAGE
}

fn render(doc: &ReportDocument, format: OutputFormat) -> Result<String, String> {
    match format {
        OutputFormat::Json => Ok(doc.to_json()),
        OutputFormat::Csv => report::to_csv(doc).map_err(|e| e.to_string()),
        OutputFormat::Text => Ok(report::to_text(doc)),
    }
}

fn emit(doc: &ReportDocument, format: OutputFormat, out: Option<&Path>) -> Result<(), String> {
    let text = render(doc, format)?;
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

/// Re-reads a report, checks its version and hash, and re-renders it.
fn check_report(input: &Path, format: OutputFormat, out: Option<&Path>) -> i32 {
    let text = match std::fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => return usage(format!("cannot read {}: {e}", input.display())),
    };
    let value: serde_json::Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => return usage(format!("{} is not JSON: {e}", input.display())),
    };
    if value["schema_version"] != report::SCHEMA_VERSION {
        return usage(format!("unsupported schema version {}", value["schema_version"]));
    }
    let doc: ReportDocument = match serde_json::from_value(value.clone()) {
        Ok(d) => d,
        Err(e) => return usage(format!("malformed report: {e}")),
    };
    let recomputed = report::hash_value(&value);
    let hash_ok = recomputed == doc.determinism_hash;
    if let Err(e) = emit(&doc, format, out) {
        return usage(e);
    }
    if !hash_ok {
        eprintln!("report: determinism hash mismatch (recorded {}, recomputed {recomputed})", doc.determinism_hash);
        return EXIT_ANOMALY;
    }
    eprintln!("report: hash ok, status {:?}", doc.status);
    match doc.status {
        Status::Pass => EXIT_OK,
        Status::Fail => EXIT_ANOMALY,
    }
}
