//! Run configuration: an optional `key = value` config file with
//! `[section]` headers, flag-over-file precedence, and the effective-config
//! echo every command writes for reproducibility.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

/// Parsed config file: (section, key) -> value.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<(String, String), String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!(
                    "{}:{}: expected `key = value` or `[section]`",
                    path.display(),
                    lineno + 1
                )));
            };
            values.insert(
                (section.clone(), key.trim().to_string()),
                value.trim().to_string(),
            );
        }
        Ok(ConfigFile { values })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.values
            .get(&(section.to_string(), key.to_string()))
            .map(String::as_str)
    }
}

/// Resolves each setting as flag > config file > default, recording the
/// effective value as it goes.
pub struct Resolver {
    file: ConfigFile,
    effective: Vec<(String, String)>,
}

impl Resolver {
    pub fn new(file: ConfigFile, command: &str) -> Self {
        Resolver {
            file,
            effective: vec![("command".to_string(), command.to_string())],
        }
    }

    pub fn resolve<T>(
        &mut self,
        section: &str,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> CliResult<T>
    where
        T: FromStr + Display,
    {
        let value = match flag {
            Some(v) => v,
            None => match self.file.get(section, key) {
                Some(raw) => raw.parse::<T>().map_err(|_| {
                    CliError::usage(format!("config [{section}] {key}: invalid value {raw:?}"))
                })?,
                None => default,
            },
        };
        self.note(key, &value);
        Ok(value)
    }

    pub fn resolve_opt<T>(
        &mut self,
        section: &str,
        key: &str,
        flag: Option<T>,
    ) -> CliResult<Option<T>>
    where
        T: FromStr + Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.file.get(section, key) {
                Some(raw) => Some(raw.parse::<T>().map_err(|_| {
                    CliError::usage(format!("config [{section}] {key}: invalid value {raw:?}"))
                })?),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.note(key, v);
        }
        Ok(value)
    }

    /// Records a resolved setting that did not come through resolve().
    pub fn note(&mut self, key: &str, value: &impl Display) {
        self.effective.push((key.to_string(), value.to_string()));
    }

    pub fn effective(&self) -> &[(String, String)] {
        &self.effective
    }

    /// Writes the effective-config echo into the output directory.
    pub fn write_echo(&self, out_dir: &Path) -> CliResult<()> {
        let mut text = String::new();
        for (key, value) in &self.effective {
            text.push_str(&format!("{key}={value}\n"));
        }
        fs::write(out_dir.join("effective-config.txt"), text).map_err(CliError::internal)
    }
}
