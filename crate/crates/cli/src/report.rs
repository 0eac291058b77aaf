//! Delimited report tables, the run manifest, and atomic writing.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::Format;

/// Bookkeeping used by the simulator when accumulating rule values.
pub const VALUE_ACCOUNTING: &str = "one reward per operational period including the inspection period; \
the event period earns no reward and pays its penalty once";

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem, e.g. `simulation`.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().delimiter(format.delimiter()).from_writer(Vec::new());
        w.write_record(&self.header).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row).expect("writing to memory");
        }
        w.into_inner().expect("writing to memory")
    }
}

/// Everything a successful command produces, held in memory until written.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub tables: Vec<Table>,
    /// Extra `key = value` lines for the manifest.
    pub notes: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.into(), tables: Vec::new(), notes: Vec::new() }
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.notes.push((key.into(), value.to_string()));
    }
}

/// Formats a float so that it parses back to the same value.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` to `dir/name` through a temporary file in the same directory.
fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> std::io::Result<PathBuf> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| e.error)?;
    Ok(path)
}

/// Renders every file of `report` and writes them into `dir`, one atomic
/// rename per file, with the manifest last.
pub fn write_report(
    dir: &Path,
    report: &Report,
    formats: &[Format],
    seed: Option<u64>,
    effective_config: &str,
    config_sha256: &str,
) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    for table in &report.tables {
        for &format in formats {
            files.push((format!("{}.{}", table.name, format.extension()), table.render(format)));
        }
    }
    files.push(("effective_config.toml".into(), effective_config.as_bytes().to_vec()));

    let mut manifest = format!(
        "command = {}\nseed = {}\nconfig_sha256 = {config_sha256}\nvalue_accounting = {VALUE_ACCOUNTING}\n",
        report.command,
        seed.map_or_else(|| "none".to_string(), |s| s.to_string()),
    );
    for (k, v) in &report.notes {
        manifest.push_str(&format!("{k} = {v}\n"));
    }
    for (name, bytes) in &files {
        manifest.push_str(&format!("sha256.{name} = {}\n", sha256(bytes)));
    }
    files.push(("manifest.txt".into(), manifest.into_bytes()));

    fs::create_dir_all(dir)?;
    files.iter().map(|(name, bytes)| write_atomic(dir, name, bytes)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_formats() {
        let mut t = Table::new("x", &["a", "b"]);
        t.push(vec!["1".into(), "two, three".into()]);
        assert_eq!(String::from_utf8(t.render(Format::Csv)).unwrap(), "a,b\n1,\"two, three\"\n");
        assert_eq!(String::from_utf8(t.render(Format::Tsv)).unwrap(), "a\tb\n1\ttwo, three\n");
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 8.3402, 1e-300] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn writes_all_files_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut report = Report::new("demo");
        report.note("answer", 42);
        let mut t = Table::new("t", &["a"]);
        t.push(vec!["1".into()]);
        report.tables.push(t);
        let paths = write_report(dir.path(), &report, &[Format::Csv, Format::Tsv], Some(7), "x = 1\n", "abc").unwrap();
        let names: Vec<_> = paths.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_string()).collect();
        assert_eq!(names, ["t.csv", "t.tsv", "effective_config.toml", "manifest.txt"]);
        let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
        assert!(manifest.starts_with("command = demo\nseed = 7\nconfig_sha256 = abc\n"));
        assert!(manifest.contains("answer = 42\n"));
        assert!(manifest.contains(&format!("sha256.t.csv = {}\n", sha256(b"a\n1\n"))));
        let leftovers = fs::read_dir(dir.path()).unwrap().count();
        assert_eq!(leftovers, 4);
    }
}
