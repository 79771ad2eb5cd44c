//! The three subcommands, each returning a process exit code.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use duality_core::format::round_sig;
use duality_core::interferometer::InstanceParseError;
use duality_core::measures::hierarchy_report;
use duality_core::sqds::{
    figure3_grid, figure3_max, figure4_curve, sqds_report, sqds_to_generic, write_figure3_csv,
    write_figure4_csv,
};
use duality_core::{Error, InterferometerInstance, SqdsConfig};
use serde_json::{json, Value};

use crate::sweep::{self, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

fn exit_for(err: &Error) -> i32 {
    if err.is_degenerate() {
        EXIT_DEGENERATE
    } else {
        EXIT_INPUT
    }
}

/// Either input schema accepted by `analyze`.
enum AnalyzeInput {
    Instance(InterferometerInstance),
    Sqds(SqdsConfig),
}

fn parse_input(text: &str) -> Result<AnalyzeInput, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| format!("malformed JSON: {e}"))?;
    if value.get("phi_ent").is_some() {
        let cfg: SqdsConfig =
            serde_json::from_value(value).map_err(|e| format!("invalid SQDS config: {e}"))?;
        return Ok(AnalyzeInput::Sqds(cfg));
    }
    InterferometerInstance::from_json(text)
        .map(AnalyzeInput::Instance)
        .map_err(|e| match e {
            InstanceParseError::Syntax(e) => format!("malformed instance: {e}"),
            InstanceParseError::Invalid(e) => format!("invalid instance: {e}"),
        })
}

/// Prints the duality report of an instance file, or for an SQDS
/// configuration file the closed-form report next to the engine's.
pub fn run_analyze(path: &Path, out: &mut dyn Write) -> i32 {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return EXIT_INPUT;
        }
    };
    let input = match parse_input(&text) {
        Ok(i) => i,
        Err(msg) => {
            eprintln!("error: {}: {msg}", path.display());
            return EXIT_INPUT;
        }
    };
    let rendered = match input {
        AnalyzeInput::Instance(inst) => hierarchy_report(&inst).map(|r| r.to_json()),
        AnalyzeInput::Sqds(cfg) => sqds_report(&cfg).and_then(|closed| {
            let engine = hierarchy_report(&sqds_to_generic(&cfg))?;
            let closed = json!({
                "q": round_sig(closed.q),
                "xi_q": round_sig(closed.xi_q),
                "r_q": round_sig(closed.r_q),
                "d_q": round_sig(closed.d_q),
                "v_q": round_sig(closed.v_q),
                "delta": round_sig(closed.delta),
                "chi": round_sig(closed.chi),
            });
            let engine: Value = serde_json::from_str(&engine.to_json()).expect("report JSON");
            Ok(
                serde_json::to_string_pretty(&json!({"sqds": closed, "engine": engine}))
                    .expect("JSON"),
            )
        }),
    };
    match rendered {
        Ok(text) => {
            if writeln!(out, "{text}").is_err() {
                return EXIT_INPUT;
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            exit_for(&e)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> io::Result<()> {
    fs::write(path, contents)
}

fn ensure_dir(dir: &Path) -> Result<(), i32> {
    fs::create_dir_all(dir).map_err(|e| {
        eprintln!("error: cannot create {}: {e}", dir.display());
        EXIT_INPUT
    })
}

/// Runs a sweep, writes `summary.json` and `instances.csv` into `out_dir`
/// and prints a digest including the runtime.
pub fn run_verify(cfg: &SweepConfig, out_dir: &Path, out: &mut dyn Write) -> i32 {
    if let Err(msg) = cfg.validate() {
        eprintln!("error: {msg}");
        return EXIT_INPUT;
    }
    if let Err(code) = ensure_dir(out_dir) {
        return code;
    }
    let (records, summary, runtime) = sweep::run_timed(cfg);
    let summary_text = serde_json::to_string_pretty(&summary.to_json(cfg)).expect("JSON") + "\n";
    for (name, contents) in [
        ("summary.json", summary_text),
        ("instances.csv", sweep::instances_csv(&records)),
    ] {
        let path = out_dir.join(name);
        if let Err(e) = write_file(&path, &contents) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_INPUT;
        }
    }
    let digest = serde_json::to_string_pretty(&summary.digest(runtime)).expect("JSON");
    if writeln!(out, "{digest}").is_err() {
        return EXIT_INPUT;
    }
    if summary.violation_count > 0 {
        eprintln!(
            "{} inequality violation(s); offending instances are in {}",
            summary.violation_count,
            out_dir.join("summary.json").display()
        );
        return EXIT_VIOLATION;
    }
    EXIT_OK
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig3,
    Fig4,
}

/// Writes the requested figure CSVs; prints the written paths and, for
/// Fig. 3, the location and value of the largest `Delta`.
pub fn run_figures(
    which: &[Figure],
    out_dir: &Path,
    resolution: usize,
    samples: usize,
    out: &mut dyn Write,
) -> i32 {
    if let Err(code) = ensure_dir(out_dir) {
        return code;
    }
    let mut written: Vec<PathBuf> = Vec::new();
    let mut report = serde_json::Map::new();
    for fig in which {
        let (path, result) = match fig {
            Figure::Fig3 => {
                let grid = match figure3_grid(resolution) {
                    Ok(g) => g,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_INPUT;
                    }
                };
                if let Some(best) = figure3_max(&grid) {
                    report.insert(
                        "fig3_max".into(),
                        json!({
                            "delta": round_sig(best.delta),
                            "s_d_norm": round_sig(best.s_d_norm),
                            "p_q": round_sig(best.p_q),
                        }),
                    );
                }
                let path = out_dir.join("fig3.csv");
                let res = fs::File::create(&path)
                    .and_then(|f| write_figure3_csv(&grid, io::BufWriter::new(f)));
                (path, res)
            }
            Figure::Fig4 => {
                let curve = match figure4_curve(samples) {
                    Ok(c) => c,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_INPUT;
                    }
                };
                let path = out_dir.join("fig4.csv");
                let res = fs::File::create(&path)
                    .and_then(|f| write_figure4_csv(&curve, io::BufWriter::new(f)));
                (path, res)
            }
        };
        if let Err(e) = result {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_INPUT;
        }
        written.push(path);
    }
    report.insert(
        "files".into(),
        json!(written
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()),
    );
    if writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&Value::Object(report)).expect("JSON")
    )
    .is_err()
    {
        return EXIT_INPUT;
    }
    EXIT_OK
}
