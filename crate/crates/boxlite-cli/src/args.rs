//! Flat flag parsing with config-file support. A config file holds
//! `key value` or `key=value` lines ('#' comments); command-line flags
//! override file values. `BOXLITE_SEED` is the global seed fallback.

use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub struct Args {
    values: BTreeMap<String, String>,
    flags: Vec<String>,
}

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Args {
    /// Parse `--key value` pairs and bare `--switch` flags. A `--config
    /// FILE` is loaded first so explicit flags win.
    pub fn parse(argv: &[String], switches: &[&str]) -> Result<Args, UsageError> {
        let mut out = Args::default();
        let mut i = 0;
        let mut from_cli: Vec<(String, Option<String>)> = Vec::new();
        while i < argv.len() {
            let arg = &argv[i];
            let key = arg
                .strip_prefix("--")
                .ok_or_else(|| UsageError(format!("expected a --flag, got `{arg}`")))?
                .to_string();
            if switches.contains(&key.as_str()) {
                from_cli.push((key, None));
                i += 1;
            } else {
                let val = argv
                    .get(i + 1)
                    .ok_or_else(|| UsageError(format!("--{key} expects a value")))?;
                from_cli.push((key, Some(val.clone())));
                i += 2;
            }
        }
        if let Some((_, Some(path))) = from_cli.iter().find(|(k, _)| k == "config") {
            let text = std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read config `{path}`: {e}")))?;
            for line in text.lines() {
                let body = line.split('#').next().unwrap_or("").trim();
                if body.is_empty() {
                    continue;
                }
                let (k, v) = body
                    .split_once('=')
                    .or_else(|| body.split_once(char::is_whitespace))
                    .ok_or_else(|| UsageError(format!("bad config line `{line}`")))?;
                let (k, v) = (k.trim().to_string(), v.trim().to_string());
                if switches.contains(&k.as_str()) {
                    if v == "true" {
                        out.flags.push(k);
                    }
                } else {
                    out.values.insert(k, v);
                }
            }
        }
        for (k, v) in from_cli {
            match v {
                Some(v) => {
                    out.values.insert(k, v);
                }
                None => out.flags.push(k),
            }
        }
        Ok(out)
    }

    pub fn has(&self, key: &str) -> bool {
        self.flags.iter().any(|f| f == key)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, UsageError> {
        self.get(key).ok_or_else(|| UsageError(format!("missing required --{key}")))
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64, UsageError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| UsageError(format!("--{key}: bad number `{v}`"))),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize, UsageError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| UsageError(format!("--{key}: bad integer `{v}`"))),
        }
    }

    /// Seed resolution order: explicit flag, then BOXLITE_SEED, then the
    /// default.
    pub fn get_seed(&self, key: &str, default: u64) -> Result<u64, UsageError> {
        if let Some(v) = self.get(key) {
            return v.parse().map_err(|_| UsageError(format!("--{key}: bad seed `{v}`")));
        }
        if let Ok(env) = std::env::var("BOXLITE_SEED") {
            return env
                .parse()
                .map_err(|_| UsageError(format!("BOXLITE_SEED: bad seed `{env}`")));
        }
        Ok(default)
    }

    pub fn get_f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, UsageError> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse()
                        .map_err(|_| UsageError(format!("--{key}: bad number `{p}`")))
                })
                .collect(),
        }
    }

    pub fn get_usize_list(&self, key: &str, default: &[usize]) -> Result<Vec<usize>, UsageError> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse()
                        .map_err(|_| UsageError(format!("--{key}: bad integer `{p}`")))
                })
                .collect(),
        }
    }
}
