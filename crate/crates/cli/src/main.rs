//! Command-line front end: verify a bundle over a fan and report.
//!
//! Inputs are JSON files or `builtin:NAME` references.  The process exit
//! code encodes where verification failed: 0 success, 10 input parsing,
//! 11 fan structure, 12 log frame, 13 decomposition, 14 transitions,
//! 15 connection, 16 pullback.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use torlog::builtins::{builtin_bundle, builtin_fan, Tamper, BUNDLE_NAMES, FAN_NAMES};
use torlog::jsonio::{parse_bundle_json, parse_fan_json};
use torlog::pipeline::{run_pipeline, stage_exit_code, CheckSet, PipelineInput, Stage};
use torlog::{Fan, KlyachkoData};

#[derive(Parser)]
#[command(name = "torlog", version, about = "Exact verifier for equivariant bundles and their canonical logarithmic connections on toric varieties")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct the bundle and connection and verify the selected checks
    Verify(VerifyArgs),
    /// List the names accepted as builtin:NAME
    ListBuiltins,
}

#[derive(Args)]
struct VerifyArgs {
    /// Fan: path to a JSON file, or builtin:NAME (defaults to the
    /// builtin bundle's own fan)
    #[arg(long)]
    fan: Option<String>,
    /// Bundle: path to a JSON file, or builtin:NAME
    #[arg(long)]
    bundle: Option<String>,
    /// Comma-separated checks to run: lemma1, cocycle, connection,
    /// prop3, or all
    #[arg(long, default_value = "all")]
    checks: String,
    /// Write the JSON report to this path
    #[arg(long)]
    report: Option<PathBuf>,
    /// List the names accepted as builtin:NAME, then exit
    #[arg(long)]
    list_builtins: bool,
}

/// Write to stdout, ignoring a closed pipe instead of panicking.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn print_builtins() {
    let mut out = String::from("fans:\n");
    for name in FAN_NAMES {
        out.push_str(&format!("  {name}\n"));
    }
    out.push_str("bundles:\n");
    for name in BUNDLE_NAMES {
        let b = builtin_bundle(name).expect("registered bundle");
        out.push_str(&format!("  {name:<30} on {:<10} {}\n", b.fan, b.summary));
    }
    emit(&out);
}

struct ParseFailure(String);

impl From<std::io::Error> for ParseFailure {
    fn from(e: std::io::Error) -> Self {
        ParseFailure(e.to_string())
    }
}

fn read_input(source: &str) -> Result<String, ParseFailure> {
    std::fs::read_to_string(Path::new(source))
        .map_err(|e| ParseFailure(format!("cannot read {source}: {e}")))
}

fn resolve_fan(source: &str) -> Result<Fan, ParseFailure> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return builtin_fan(name)
            .ok_or_else(|| ParseFailure(format!("no builtin fan named {name:?}")));
    }
    parse_fan_json(&read_input(source)?).map_err(|e| ParseFailure(e.to_string()))
}

fn resolve_bundle(
    source: &str,
    fan: &Fan,
) -> Result<(KlyachkoData, Tamper), ParseFailure> {
    if let Some(name) = source.strip_prefix("builtin:") {
        let b = builtin_bundle(name)
            .ok_or_else(|| ParseFailure(format!("no builtin bundle named {name:?}")))?;
        return Ok((b.data, b.tamper));
    }
    let data = parse_bundle_json(&read_input(source)?, fan)
        .map_err(|e| ParseFailure(e.to_string()))?;
    Ok((data, Tamper::None))
}

fn run_verify(args: &VerifyArgs) -> i32 {
    if args.list_builtins {
        print_builtins();
        return 0;
    }
    let parse_code = stage_exit_code(Stage::Parse);
    let checks = match CheckSet::parse(&args.checks) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return parse_code;
        }
    };
    let Some(bundle_src) = args.bundle.as_deref() else {
        eprintln!("error: --bundle is required (or use --list-builtins)");
        return parse_code;
    };
    // a builtin bundle implies its fan when none is given
    let fan_src = match (&args.fan, bundle_src.strip_prefix("builtin:")) {
        (Some(f), _) => f.clone(),
        (None, Some(name)) => match builtin_bundle(name) {
            Some(b) => format!("builtin:{}", b.fan),
            None => {
                eprintln!("error: no builtin bundle named {name:?}");
                return parse_code;
            }
        },
        (None, None) => {
            eprintln!("error: --fan is required with a bundle file");
            return parse_code;
        }
    };
    let fan = match resolve_fan(&fan_src) {
        Ok(f) => f,
        Err(ParseFailure(e)) => {
            eprintln!("error: {e}");
            return parse_code;
        }
    };
    let (data, tamper) = match resolve_bundle(bundle_src, &fan) {
        Ok(x) => x,
        Err(ParseFailure(e)) => {
            eprintln!("error: {e}");
            return parse_code;
        }
    };

    let outcome = run_pipeline(&PipelineInput { fan, data, tamper, checks });
    emit(&outcome.report.render_text());
    if let Some(path) = &args.report {
        if let Err(e) = std::fs::write(path, outcome.report.to_json()) {
            eprintln!("error: cannot write report {}: {e}", path.display());
            return parse_code;
        }
    }
    match outcome.failure {
        None => 0,
        Some(f) => {
            eprintln!("failed at stage {:?}: {}", f.stage, f.message);
            stage_exit_code(f.stage)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.cmd {
        Cmd::Verify(args) => run_verify(args),
        Cmd::ListBuiltins => {
            print_builtins();
            0
        }
    };
    ExitCode::from(code as u8)
}
