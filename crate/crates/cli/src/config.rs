//! Config-file defaults and run logs. Every run writes
//! `<workdir>/run-<command>.log` containing the fully resolved
//! configuration; identical logs mean identical inputs, so artifacts from
//! two such runs hash the same.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::{Cli, CliError};

/// Per-command override sections of the `--config` file. Any subset of the
/// command's flags may appear; explicit flags still win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub synth: toml::Table,
    #[serde(default)]
    pub featurize: toml::Table,
    #[serde(default)]
    pub train: toml::Table,
    #[serde(default)]
    pub eval: toml::Table,
    #[serde(default)]
    pub predict: toml::Table,
}

/// Shared command context: workdir, config-file values, verbosity.
pub struct Context {
    pub workdir: PathBuf,
    pub file: FileConfig,
    pub verbose: u8,
}

impl Context {
    pub fn new(cli: &Cli) -> Result<Context, CliError> {
        let file = match &cli.config {
            None => FileConfig::default(),
            Some(path) => {
                let full = cli.workdir.join(path);
                let text = std::fs::read_to_string(&full).map_err(|e| {
                    CliError::Usage(format!("config file {}: {e}", full.display()))
                })?;
                toml::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("config file {}: {e}", full.display())))?
            }
        };
        Ok(Context {
            workdir: cli.workdir.clone(),
            file,
            verbose: cli.verbose,
        })
    }

    pub fn path(&self, p: &Path) -> PathBuf {
        self.workdir.join(p)
    }

    /// Flag value, else config-file value, else the built-in default.
    pub fn resolve<T: for<'de> Deserialize<'de>>(
        &self,
        section: &toml::Table,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match section.get(key) {
            None => Ok(default),
            Some(value) => value
                .clone()
                .try_into()
                .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}"))),
        }
    }

    /// Write the resolved-config run log for a command.
    pub fn write_run_log(&self, command: &str, resolved: &impl serde::Serialize) -> Result<(), CliError> {
        let text = toml::to_string(resolved)
            .map_err(|e| CliError::Usage(format!("serializing run log: {e}")))?;
        let path = self.workdir.join(format!("run-{command}.log"));
        std::fs::write(&path, format!("command = \"{command}\"\n{text}"))
            .map_err(raga_core::RagaError::from)?;
        Ok(())
    }
}
