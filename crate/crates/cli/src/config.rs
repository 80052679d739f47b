//! `key=value` config files and the run record embedded in every report.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Command;
use serde::Serialize;
use serde_json::Value;

use crate::report::Format;

/// Everything needed to reproduce a run.
#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub command: String,
    pub format: Format,
    pub seed: u64,
    pub args: Value,
}

/// Reads `key=value` lines. Blank lines and `#` comments are skipped; keys
/// may be written with or without the leading `--`.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("{}:{}: expected key=value", path.display(), i + 1);
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

fn given(argv: &[String], long: &str) -> bool {
    let flag = format!("--{long}");
    let eq = format!("{flag}=");
    argv.iter().any(|a| a == &flag || a.starts_with(&eq))
}

/// Appends config-file values for flags that the command line leaves unset.
/// Keys must name a flag of some subcommand; keys belonging only to other
/// subcommands are ignored so one file can serve several commands.
pub fn merge_config(cmd: &Command, argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let values = read_config(Path::new(&path))?;
    let sub = argv
        .iter()
        .skip(1)
        .find_map(|a| cmd.get_subcommands().find(|s| s.get_name() == a));
    let known = |c: &Command, key: &str| c.get_arguments().find(|a| a.get_long() == Some(key)).cloned();

    let mut out = argv.clone();
    for (key, value) in values {
        if key == "config" {
            continue;
        }
        let arg = sub
            .and_then(|s| known(s, &key))
            .or_else(|| known(cmd, &key));
        let Some(arg) = arg else {
            if cmd.get_subcommands().any(|s| known(s, &key).is_some()) {
                continue;
            }
            bail!("{path}: unknown key {key:?}");
        };
        if given(&argv, &key) {
            continue;
        }
        if arg.get_action().takes_values() {
            out.push(format!("--{key}={value}"));
        } else {
            match value.as_str() {
                "true" | "1" | "yes" => out.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                other => bail!("{path}: {key} expects true or false, got {other:?}"),
            }
        }
    }
    Ok(out)
}
