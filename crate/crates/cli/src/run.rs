//! Executes a parsed [`RunConfig`].

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use relbell::bell::{bell_average_mc, corrected_threshold, scan_figure};
use relbell::correlator::correlator_mc;
use relbell::ekert::{run_protocol, EveStrategy, ProtocolConfig};
use serde_json::json;

use crate::args::{EveKind, Format, RunConfig};
use crate::CliError;

/// Environment variable naming the directory that relative `--out` paths resolve against.
pub const OUT_DIR_ENV: &str = "RELBELL_OUT_DIR";

fn resolve(path: &str) -> PathBuf {
    let p = Path::new(path);
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

/// Writes `contents` to `path`, or to `stdout` when `path` is `-`.
fn emit(path: &str, contents: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    if path == "-" {
        stdout.write_all(contents.as_bytes())?;
        return Ok(());
    }
    let target = resolve(path);
    let write = || {
        if let Some(parent) = target.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        fs::write(&target, contents)
    };
    write().map_err(|source| CliError::Write { path: target.clone(), source })
}

/// Runs `config`, writing primary output to `stdout`.
pub fn execute(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    match config {
        RunConfig::Correlate { a, b, beam, samples, seed, format } => {
            let est = correlator_mc(*a, *b, &beam.distribution()?, *samples, *seed)?;
            match format {
                Format::Json => writeln!(stdout, "{}", serde_json::to_string(&est)?)?,
                _ if est.standard_error == 0.0 => writeln!(stdout, "K = {}", est.value)?,
                _ => writeln!(stdout, "K = {} +/- {}", est.value, est.standard_error)?,
            }
            if let Some(w) = &est.warning {
                eprintln!("warning: {w}");
            }
        }
        RunConfig::Bell { directions, beam, samples, seed, format } => {
            let est = bell_average_mc(directions, &beam.distribution()?, *samples, *seed)?;
            match format {
                Format::Json => writeln!(stdout, "{}", serde_json::to_string(&est)?)?,
                _ if est.standard_error == 0.0 => writeln!(stdout, "c = {}", est.value)?,
                _ => writeln!(stdout, "c = {} +/- {}", est.value, est.standard_error)?,
            }
            if let Some(w) = &est.warning {
                eprintln!("warning: {w}");
            }
        }
        RunConfig::Threshold { directions, beam, samples, seed, format } => {
            let t = corrected_threshold(directions, &beam.distribution()?, *samples, *seed)?;
            match format {
                Format::Json => writeln!(stdout, "{}", json!({ "threshold": t }))?,
                _ => writeln!(stdout, "threshold = {t}")?,
            }
        }
        RunConfig::Scan { spec, out, format } => {
            let table = scan_figure(spec)?;
            let text = match format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&table.to_json())?),
                _ => table.to_csv(),
            };
            emit(out, &text, stdout)?;
        }
        RunConfig::Protocol {
            pairs,
            directions,
            beam,
            seed,
            key_axes,
            eve,
            test_fraction,
            significance,
            threshold_mode,
            out,
            format,
        } => {
            let mut cfg = ProtocolConfig::new(*pairs, beam.distribution()?, *seed);
            cfg.bell = *directions;
            cfg.key_axes = key_axes.clone();
            cfg.eve = match eve.kind {
                EveKind::None => EveStrategy::None,
                EveKind::InterceptResend => EveStrategy::InterceptResend {
                    pool: eve.pool.clone().unwrap_or_else(|| {
                        vec![directions.a, directions.a_prime, directions.b, directions.b_prime]
                    }),
                    probability: eve.probability,
                },
            };
            cfg.test_fraction = *test_fraction;
            cfg.significance = *significance;
            cfg.threshold_mode = *threshold_mode;
            let transcript = run_protocol(&cfg)?;
            if let Some(path) = out {
                let text = match format {
                    Format::Csv => transcript.records_csv(),
                    _ => format!("{}\n", transcript.to_json()),
                };
                emit(path, &text, stdout)?;
            }
            if out.as_deref() != Some("-") {
                writeln!(stdout, "{}", transcript.summary_json())?;
            }
        }
    }
    Ok(())
}
