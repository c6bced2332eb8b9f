//! `key=value` config files, spliced into the argument list ahead of the
//! user's own flags so that explicit flags override file entries.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use crate::CliError;

const SWITCHES: &[&str] = &["oracle", "report-length-scale"];

/// Parses config text into `--key=value` tokens.
pub fn parse(text: &str) -> Result<Vec<String>, CliError> {
    let mut tokens = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value, got `{line}`", i + 1)))?;
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        if key == "config" {
            return Err(CliError::Usage("config files cannot include other config files".into()));
        }
        if SWITCHES.contains(&key) {
            match value {
                "true" | "1" | "yes" => tokens.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                _ => {
                    return Err(CliError::Usage(format!(
                        "config line {}: `{key}` takes true or false, got `{value}`",
                        i + 1
                    )))
                }
            }
        } else {
            tokens.push(format!("--{key}={value}"));
        }
    }
    Ok(tokens)
}

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Inserts the entries of `--config PATH` right after the subcommand name.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.to_string_lossy())))?;
    let tokens = parse(&text)?;
    // the subcommand is the first argument after the program name
    let at = if argv.len() > 1 && !argv[1].to_string_lossy().starts_with('-') { 2 } else { 1 };
    let mut out = argv[..at.min(argv.len())].to_vec();
    out.extend(tokens.into_iter().map(OsString::from));
    out.extend(argv[at.min(argv.len())..].iter().cloned());
    Ok(out)
}
