use std::ffi::OsString;
use std::fs;

use anyhow::{bail, Context, Result};
use serde_json::Value;

/// Finds `--config <path>` (or `--config=<path>`) in `argv`.
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

fn flag_value(v: &Value) -> Option<String> {
    match v {
        Value::Null | Value::Bool(_) => None,
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Array(items) => Some(items.iter().map(|i| flag_value(i).unwrap_or_default()).collect::<Vec<_>>().join(",")),
        Value::Object(_) => Some(v.to_string()),
    }
}

/// Flags equivalent to a JSON config object. Keys are flag names with either
/// `-` or `_` as separator.
pub fn config_flags(config: &Value) -> Result<Vec<OsString>> {
    let Value::Object(map) = config else {
        bail!("the config file must hold a JSON object");
    };
    let mut out = Vec::new();
    for (key, value) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        if matches!(flag.as_str(), "--config" | "--command") {
            continue;
        }
        match value {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            v => out.push(format!("{flag}={}", flag_value(v).unwrap_or_default()).into()),
        }
    }
    Ok(out)
}

/// Inserts the flags of the `--config` file right after the subcommand, so
/// that flags given on the command line come later and win.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading config {}", path.to_string_lossy()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.to_string_lossy()))?;
    let extra = config_flags(&value)?;
    let Some(sub) = argv.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')) else {
        return Ok(argv);
    };
    let at = sub + 2;
    let mut out = argv[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn flags_from_object() {
        let v: Value = serde_json::json!({"alpha": 0.5, "r_max": 0.9, "real_axis": true, "skip": false, "radii": [0.2, 0.4], "map": "f_alpha"});
        let f = config_flags(&v).unwrap();
        assert_eq!(f, os(&["--alpha=0.5", "--map=f_alpha", "--r-max=0.9", "--radii=0.2,0.4", "--real-axis"]));
        assert!(config_flags(&serde_json::json!([1])).is_err());
    }

    #[test]
    fn config_goes_before_command_line_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"alpha": 0.25}"#).unwrap();
        let argv = os(&["logharm", "verify", "--config", path.to_str().unwrap(), "--alpha", "0.5"]);
        let out = expand(argv).unwrap();
        assert_eq!(out[1], "verify");
        assert_eq!(out[2], "--alpha=0.25");
        assert_eq!(out.last().unwrap(), "0.5");
    }
}
