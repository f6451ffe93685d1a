use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Destination directory; every file lands via a temp file and a rename.
pub struct OutputDir {
    dir: PathBuf,
}

impl OutputDir {
    pub fn new(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
        let target = self.dir.join(name);
        let fail = |e: std::io::Error| CliError::internal(format!("writing {}: {e}", target.display()));
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(fail)?;
        tmp.write_all(bytes).map_err(fail)?;
        tmp.as_file().sync_all().map_err(fail)?;
        tmp.persist(&target).map_err(|e| fail(e.error))?;
        Ok(target)
    }

    pub fn write_csv<R: Serialize>(&self, name: &str, rows: &[R]) -> CliResult<PathBuf> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| CliError::internal(format!("csv {name}: {e}")))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::internal(format!("csv {name}: {e}")))?;
        self.write(name, &bytes)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

/// What a command did, in a fixed field order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    /// Parameter name/value pairs in the order the command resolved them.
    pub parameters: Vec<(String, Value)>,
    pub checks: Vec<CheckResult>,
    pub timings: Vec<Timing>,
    pub outputs: Vec<PathBuf>,
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            command,
            parameters: Vec::new(),
            checks: Vec::new(),
            timings: Vec::new(),
            outputs: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.parameters.push((name.to_string(), v));
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckResult {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn output(&mut self, p: PathBuf) {
        self.outputs.push(p);
    }

    /// Runs `f` and records its wall time under `stage`.
    pub fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(Timing {
            stage: stage.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("$ {}\n", self.command.join(" ")));
        for (k, v) in &self.parameters {
            s.push_str(&format!("  {k} = {v}\n"));
        }
        if !self.checks.is_empty() {
            let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            s.push('\n');
            for c in &self.checks {
                let mark = if c.passed { "pass" } else { "FAIL" };
                s.push_str(&format!("  {:width$}  {mark}  {}\n", c.name, c.detail));
            }
        }
        for n in &self.notes {
            s.push_str(&format!("\n{n}\n"));
        }
        if !self.outputs.is_empty() {
            s.push_str("\nwrote:\n");
            for p in &self.outputs {
                s.push_str(&format!("  {}\n", p.display()));
            }
        }
        let total = self.timings.iter().fold(0.0, |a, t| a + t.seconds);
        s.push_str(&format!("\n({total:.3}s)\n"));
        s
    }
}
