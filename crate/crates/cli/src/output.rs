use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

#[derive(Serialize)]
struct Tool {
    name: &'static str,
    version: &'static str,
    engine_version: &'static str,
}

/// Sidecar describing how a CSV was produced.
#[derive(Serialize)]
struct Manifest<'a, C: Serialize, R: Serialize> {
    command: &'a str,
    created: String,
    csv: String,
    argv: Vec<String>,
    threads: usize,
    tool: Tool,
    config: &'a C,
    results: &'a R,
}

pub fn manifest_path(csv: &Path) -> PathBuf {
    let mut name = csv.file_stem().unwrap_or_default().to_os_string();
    name.push(".manifest.toml");
    csv.with_file_name(name)
}

/// Where a command's CSV goes: a file (with manifest) or stdout.
pub struct Sink {
    command: &'static str,
    path: Option<PathBuf>,
}

impl Sink {
    pub fn new(command: &'static str, out: Option<PathBuf>) -> Self {
        let path = match out {
            Some(p) if p.as_os_str() == "-" => None,
            Some(p) => Some(p),
            None => Some(PathBuf::from(format!("{command}.csv"))),
        };
        Self { command, path }
    }

    fn writer(&self) -> anyhow::Result<Box<dyn Write>> {
        Ok(match &self.path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                }
                Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)
            }
            None => Box::new(io::stdout().lock()),
        })
    }

    /// Writes serde rows under a header derived from the row type.
    pub fn rows<S: Serialize>(&self, rows: &[S]) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_writer(self.writer()?);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes an explicit header and string records.
    pub fn records(&self, header: &[String], rows: &[Vec<String>]) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_writer(self.writer()?);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn manifest<C: Serialize, R: Serialize>(&self, config: &C, results: &R) -> anyhow::Result<()> {
        let Some(csv) = &self.path else {
            return Ok(());
        };
        let m = Manifest {
            command: self.command,
            created: chrono::Utc::now().to_rfc3339(),
            csv: csv.display().to_string(),
            argv: std::env::args().collect(),
            threads: rayon::current_num_threads(),
            tool: Tool {
                name: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                engine_version: etc_consensus::VERSION,
            },
            config,
            results,
        };
        let path = manifest_path(csv);
        fs::write(&path, toml::to_string(&m)?).with_context(|| format!("writing {}", path.display()))?;
        log::info!("wrote {} and {}", csv.display(), path.display());
        Ok(())
    }
}

/// Blank for `None`, shortest round-trip decimal otherwise.
pub fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
