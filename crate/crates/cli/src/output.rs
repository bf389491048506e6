//! Result files. Each one opens with a block echoing the effective config.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{self, ConfigError, ExperimentConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Echo {
    pub version: String,
    pub subcommand: String,
    pub config_sha256: String,
    pub master_seed: u64,
    pub config: String,
}

impl Echo {
    pub fn new(subcommand: &str, cfg: &ExperimentConfig, master_seed: u64) -> Self {
        let json = config::to_canonical_json(cfg);
        let hash = Sha256::digest(json.as_bytes());
        Echo {
            version: VERSION.to_string(),
            subcommand: subcommand.to_string(),
            config_sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
            master_seed,
            config: json,
        }
    }

    /// `#`-prefixed header for CSV files.
    pub fn comment_block(&self) -> String {
        format!(
            "# geomconc {}\n# subcommand: {}\n# config_sha256: {}\n# master_seed: {}\n# config: {}\n",
            self.version, self.subcommand, self.config_sha256, self.master_seed, self.config
        )
    }
}

/// Recovers the config from a file written with [`Echo::comment_block`].
pub fn parse_echo(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let line = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix("# config: "))
        .ok_or_else(|| ConfigError::new("<echo>", "no config line in comment block"))?;
    config::parse(line)
}

pub struct Writer {
    dir: PathBuf,
    echo: Echo,
}

impl Writer {
    pub fn new(dir: &Path, echo: Echo) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Writer { dir: dir.to_path_buf(), echo })
    }

    pub fn csv(&self, name: &str, body: &str) -> io::Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, format!("{}{body}", self.echo.comment_block()))?;
        Ok(path)
    }

    /// `{"echo": …, "result": …}`.
    pub fn json<R: Serialize>(&self, name: &str, result: &R) -> io::Result<PathBuf> {
        #[derive(Serialize)]
        struct Doc<'a, R> {
            echo: &'a Echo,
            result: &'a R,
        }
        let path = self.dir.join(name);
        let text = serde_json::to_string_pretty(&Doc { echo: &self.echo, result }).map_err(io::Error::other)?;
        fs::write(&path, text + "\n")?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_round_trips() {
        let cfg = config::parse(
            r#"{"master_seed": 3, "model": {"kind": "homogeneous", "rate": 0.1},
                "r_grid": [0.30000000000000004, 2.5e-7]}"#,
        )
        .unwrap();
        let echo = Echo::new("tails", &cfg, 3);
        let text = echo.comment_block() + "r,upper_bound\n0,1\n";
        assert_eq!(parse_echo(&text).unwrap(), cfg);
        assert_eq!(echo.config_sha256.len(), 64);
        assert_ne!(echo.config_sha256, Echo::new("tails", &ExperimentConfig::default(), 3).config_sha256);
    }
}
