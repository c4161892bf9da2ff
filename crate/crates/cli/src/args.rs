//! Flat `--key value` flag parsing. Every run is a parameter tuple, so
//! nothing fancier is needed.

use std::collections::BTreeMap;

use crate::CliError;

#[derive(Debug, Clone)]
pub struct Flags {
    values: BTreeMap<String, String>,
}

impl Flags {
    pub fn parse(args: &[String], allowed: &[&str]) -> Result<Flags, CliError> {
        let mut values = BTreeMap::new();
        let mut it = args.iter();
        while let Some(arg) = it.next() {
            let Some(key) = arg.strip_prefix("--") else {
                return Err(CliError::Usage(format!(
                    "unexpected argument '{arg}' (flags are --key value)"
                )));
            };
            if !allowed.contains(&key) {
                return Err(CliError::Usage(format!(
                    "unknown flag --{key}; allowed: {}",
                    allowed
                        .iter()
                        .map(|a| format!("--{a}"))
                        .collect::<Vec<_>>()
                        .join(" ")
                )));
            }
            let Some(value) = it.next() else {
                return Err(CliError::Usage(format!("flag --{key} needs a value")));
            };
            values.insert(key.to_string(), value.clone());
        }
        Ok(Flags { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("--{key}: '{s}' is not a number"))),
        }
    }

    pub fn get_u32(&self, key: &str, default: u32) -> Result<u32, CliError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse::<u32>()
                .map_err(|_| CliError::Input(format!("--{key}: '{s}' is not an integer"))),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse::<usize>()
                .map_err(|_| CliError::Input(format!("--{key}: '{s}' is not an integer"))),
        }
    }

    pub fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::Usage(format!("missing required flag --{key}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn owned(args: &[&str]) -> Vec<String> {
        args.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_flags() {
        let f = Flags::parse(&owned(&["--n", "2", "--out-dir", "x"]), &["n", "out-dir"]).unwrap();
        assert_eq!(f.get_u32("n", 0).unwrap(), 2);
        assert_eq!(f.get("out-dir"), Some("x"));
        assert_eq!(f.get_f64("missing", 1.5).unwrap(), 1.5);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(Flags::parse(&owned(&["--bogus", "1"]), &["n"]).is_err());
        assert!(Flags::parse(&owned(&["n", "1"]), &["n"]).is_err());
        assert!(Flags::parse(&owned(&["--n"]), &["n"]).is_err());
    }
}
