//! `--config FILE`: `key = value` lines spliced into argv as `--key value`
//! right after the subcommand, so flags given on the command line win.

use std::fs;

/// Removes `--config PATH` / `--config=PATH` from `argv` and returns the path.
fn take_config_path(argv: &mut Vec<String>) -> Result<Option<String>, String> {
    let mut i = 0;
    while i < argv.len() {
        if argv[i] == "--config" {
            if i + 1 >= argv.len() {
                return Err("--config needs a file path".into());
            }
            let path = argv.remove(i + 1);
            argv.remove(i);
            return Ok(Some(path));
        }
        if let Some(path) = argv[i].strip_prefix("--config=") {
            let path = path.to_string();
            argv.remove(i);
            return Ok(Some(path));
        }
        i += 1;
    }
    Ok(None)
}

/// Flags encoded by a config text. `true`/`false` values toggle switches.
pub fn parse_config(text: &str) -> Result<Vec<String>, String> {
    let mut flags = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value, got `{line}`", lineno + 1))?;
        let key = key.trim().trim_start_matches('-');
        let value = value.trim().trim_matches('"');
        if key.is_empty() {
            return Err(format!("config line {}: empty key", lineno + 1));
        }
        let flag = if key.len() == 1 {
            format!("-{key}")
        } else {
            format!("--{key}")
        };
        match value {
            "true" => flags.push(flag),
            "false" => {}
            _ => {
                flags.push(flag);
                flags.push(value.to_string());
            }
        }
    }
    Ok(flags)
}

/// Applies `--config` to `argv`, inserting its flags after the first token
/// naming a subcommand.
pub fn expand_argv(mut argv: Vec<String>, subcommands: &[&str]) -> Result<Vec<String>, String> {
    let Some(path) = take_config_path(&mut argv)? else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config `{path}`: {e}"))?;
    let flags = parse_config(&text)?;
    let at = argv
        .iter()
        .skip(1)
        .position(|a| subcommands.contains(&a.as_str()))
        .map(|p| p + 2)
        .ok_or("no subcommand given")?;
    argv.splice(at..at, flags);
    Ok(argv)
}
