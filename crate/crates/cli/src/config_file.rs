//! Flat `key = value` configuration files.
//!
//! Keys are flag names without the leading dashes; `#` starts a comment.

use std::fs;

use crate::CliError;

const SUBCOMMANDS: [&str; 5] = ["correlate", "bell", "scan", "threshold", "protocol"];

/// Parses file contents into `(key, value)` pairs.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("--config: line {}: expected `key = value`", lineno + 1)));
        };
        let key = key.trim().trim_start_matches('-');
        if key.is_empty() {
            return Err(CliError::Usage(format!("--config: line {}: empty key", lineno + 1)));
        }
        entries.push((key.to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

/// Removes `--config PATH` from `argv` and splices the file's entries in as
/// flags directly after the subcommand.
pub(crate) fn expand(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(arg) = it.next() {
        if arg == "--config" {
            path = Some(it.next().ok_or_else(|| CliError::Usage("--config: missing path".into()))?);
        } else if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("--config: {path}: {e}")))?;
    let entries = parse(&text)?;

    let mut command = None;
    let mut flags = Vec::new();
    for (key, value) in entries {
        if key == "command" {
            command = Some(value);
        } else {
            flags.push(format!("--{key}={value}"));
        }
    }
    let sub_pos = rest.iter().position(|a| SUBCOMMANDS.contains(&a.as_str()));
    let (prefix, suffix) = match sub_pos {
        Some(i) => (rest[..=i].to_vec(), rest[i + 1..].to_vec()),
        None => {
            let cmd = command.ok_or_else(|| {
                CliError::Usage("--config: no subcommand on the command line or `command = ...` in the file".into())
            })?;
            let mut prefix = rest[..1.min(rest.len())].to_vec();
            prefix.push(cmd);
            (prefix, rest[1.min(rest.len())..].to_vec())
        }
    };
    Ok(prefix.into_iter().chain(flags).chain(suffix).collect())
}
