//! Flat `key = value` config files.
//!
//! Keys name long flags of a subcommand (`seed = 7`) or are scoped to one
//! (`train-svm.c = 0.1,1,10`). A key is applied only when the flag is not
//! already on the command line, so flags win over the file and the file
//! wins over environment variables and built-in defaults.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Command};

use crate::error::{Error, Result};
use crate::formats::read_text;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfigFile {
    pub entries: Vec<(String, String)>,
}

pub fn parse_config(text: &str) -> Result<ConfigFile, String> {
    let mut entries = Vec::new();
    let mut seen = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        if let Some(prev) = seen.insert(k.to_string(), i + 1) {
            return Err(format!("line {}: key `{k}` already set on line {prev}", i + 1));
        }
        entries.push((k.to_string(), v.to_string()));
    }
    Ok(ConfigFile { entries })
}

pub fn read_config(path: &Path) -> Result<ConfigFile> {
    parse_config(&read_text(path)?).map_err(|m| Error::Usage(format!("{}: {m}", path.display())))
}

/// Location of `--config` in argv, if any.
fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn subcommand_name(args: &[OsString]) -> Option<String> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            it.next();
        } else if !s.starts_with('-') {
            return Some(s.into_owned());
        }
    }
    None
}

fn flag_present(args: &[OsString], long: &str) -> bool {
    let flag = format!("--{long}");
    let prefix = format!("--{long}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag.as_str() || s.starts_with(&prefix)
    })
}

/// Appends flags from the `--config` file (if any) that the command line
/// does not already set.
pub fn apply_config(args: Vec<OsString>, cli: &Command) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else { return Ok(args) };
    let config = read_config(&path)?;
    let Some(name) = subcommand_name(&args) else { return Ok(args) };
    let Some(sub) = cli.find_subcommand(&name) else { return Ok(args) };

    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in &config.entries {
        let long = match key.split_once('.') {
            Some((scope, k)) if scope == name => k,
            Some(_) => continue,
            None => key.as_str(),
        };
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(long)) else {
            log::debug!("config key `{key}` does not apply to `{name}`");
            continue;
        };
        if flag_present(&args, long) {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => match value.as_str() {
                "true" | "1" | "yes" => extra.push(format!("--{long}").into()),
                "false" | "0" | "no" => {}
                _ => return Err(Error::Usage(format!("config key `{key}` expects true or false"))),
            },
            _ => {
                extra.push(format!("--{long}").into());
                extra.push(value.into());
            }
        }
    }
    let mut out = args;
    out.extend(extra);
    Ok(out)
}
