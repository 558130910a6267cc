//! CSV and gnuplot writers. Every file opens with `# key = value` metadata
//! lines followed by the echoed config, so a file is self-describing.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default)]
pub struct Metadata {
    entries: Vec<(String, String)>,
    config: String,
}

impl Metadata {
    pub fn new(config_toml: &str) -> Self {
        Metadata {
            entries: Vec::new(),
            config: config_toml.to_string(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
        self
    }

    pub fn with(&self, key: &str, value: impl ToString) -> Self {
        let mut m = self.clone();
        m.set(key, value);
        m
    }

    fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(w, "# {k} = {v}")?;
        }
        writeln!(w, "# config:")?;
        for line in self.config.lines() {
            writeln!(w, "#   {line}")?;
        }
        Ok(())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Shortest round-trip scientific form; deterministic across runs.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn write_csv(
    dir: &Path,
    name: &str,
    meta: &Metadata,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut w = create(&path)?;
    meta.write_to(&mut w).map_err(io_err(&path))?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(header)?;
    for r in rows {
        csv.write_record(r)?;
    }
    csv.flush().map_err(io_err(&path))?;
    Ok(path)
}

/// Two-column blocks separated by blank lines, addressable with gnuplot's `index`.
pub fn write_dat(
    dir: &Path,
    name: &str,
    meta: &Metadata,
    blocks: &[(String, Vec<(f64, f64)>)],
) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut w = create(&path)?;
    let res = (|| -> std::io::Result<()> {
        meta.write_to(&mut w)?;
        for (i, (label, pts)) in blocks.iter().enumerate() {
            if i > 0 {
                writeln!(w)?;
                writeln!(w)?;
            }
            writeln!(w, "# {label}")?;
            for (x, y) in pts {
                writeln!(w, "{} {}", num(*x), num(*y))?;
            }
        }
        w.flush()
    })();
    res.map_err(io_err(&path))?;
    Ok(path)
}

/// Reads a CSV written by [`write_csv`], skipping the comment header.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file);
    let header = rdr.headers()?.iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.map(|r| r.iter().map(String::from).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok((header, rows))
}
