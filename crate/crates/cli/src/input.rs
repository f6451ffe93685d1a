//! JSON inputs: sequence files, value lists, partitions and boundary measures.

use std::path::Path;

use hplus_core::error::Error as CoreError;
use hplus_core::geometry::DiscPoint;
use hplus_core::interp::Side;
use hplus_core::measure::{BoundaryMeasure, StepDensity};
use hplus_core::sequence::PointSequence;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// On-disk sequence. Exactly one of the coordinate lists is present:
/// Cartesian `[x, y]`, polar `[r, theta]`, or `[1 - r, theta]` for points
/// too close to the circle to write as `r`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polar: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_polar: Option<Vec<[f64; 2]>>,
}

impl SequenceFile {
    /// Depth/angle form, which round-trips every point exactly.
    pub fn from_sequence(seq: &PointSequence) -> Self {
        Self {
            label: Some(seq.label().to_string()),
            depth_polar: Some(seq.points().iter().map(|z| [z.depth(), z.arg()]).collect()),
            ..Self::default()
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::input(format!("{}: malformed JSON: {e}", path.display())))
}

/// Line (1-based) on which each element of the top-level array `key` starts.
fn element_lines(text: &str, key: &str) -> Vec<usize> {
    let mut lines = Vec::new();
    let mut line = 1;
    let mut depth = 0usize;
    let mut target = None;
    let mut last_string = String::new();
    let mut current = String::new();
    let mut in_string = false;
    let mut escaped = false;
    let mut after_colon = false;
    for ch in text.chars() {
        if ch == '\n' {
            line += 1;
        }
        if in_string {
            if escaped {
                escaped = false;
            } else if ch == '\\' {
                escaped = true;
            } else if ch == '"' {
                in_string = false;
                last_string = std::mem::take(&mut current);
            } else {
                current.push(ch);
            }
            continue;
        }
        match ch {
            '"' => in_string = true,
            ':' => after_colon = depth == 1,
            '[' | '{' => {
                if Some(depth) == target {
                    lines.push(line);
                }
                depth += 1;
                if ch == '[' && after_colon && depth == 2 && last_string == key {
                    target = Some(depth);
                }
                after_colon = false;
            }
            ']' | '}' => {
                if Some(depth) == target {
                    target = None;
                }
                depth = depth.saturating_sub(1);
            }
            _ => {}
        }
    }
    lines
}

pub fn load_sequence(path: &Path) -> CliResult<PointSequence> {
    let text = read(path)?;
    let file: SequenceFile = parse(path, &text)?;
    let label = file.label.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "sequence".into())
    });
    let (key, coords, make): (&str, _, fn(f64, f64) -> Result<DiscPoint, CoreError>) =
        match (&file.points, &file.polar, &file.depth_polar) {
            (Some(p), None, None) => ("points", p, DiscPoint::new),
            (None, Some(p), None) => ("polar", p, DiscPoint::from_polar),
            (None, None, Some(p)) => ("depth_polar", p, DiscPoint::from_depth),
            _ => {
                return Err(CliError::input(format!(
                    "{}: expected exactly one of \"points\", \"polar\", \"depth_polar\"",
                    path.display()
                )))
            }
        };
    let lines = element_lines(&text, key);
    let at = |i: usize| match lines.get(i) {
        Some(l) => format!("{} line {l}", path.display()),
        None => path.display().to_string(),
    };
    let points = coords
        .iter()
        .enumerate()
        .map(|(i, &[a, b])| make(a, b).map_err(|e| CliError::input(format!("{}: point {i}: {e}", at(i)))))
        .collect::<CliResult<Vec<_>>>()?;
    PointSequence::new(label, points).map_err(|e| match e {
        CoreError::DuplicatePoint { first, second } => CliError::input(format!(
            "duplicate point: point {second} ({}) repeats point {first} ({})",
            at(second),
            at(first)
        )),
        e => CliError::input(format!("{}: {e}", path.display())),
    })
}

/// A JSON array of positive numbers.
pub fn load_values(path: &Path) -> CliResult<Vec<f64>> {
    let text = read(path)?;
    parse(path, &text)
}

/// A JSON array of `"T"` / `"S"`.
pub fn load_partition(path: &Path) -> CliResult<Vec<Side>> {
    let text = read(path)?;
    parse(path, &text)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureFile {
    /// `[theta, mass]` pairs.
    Atoms(Vec<[f64; 2]>),
    /// `[start, end, density]` triples; `u = 1` is `[[0, 6.283185307179586, 1]]`.
    Steps(Vec<[f64; 3]>),
}

pub enum LoadedMeasure {
    Atoms(BoundaryMeasure),
    Steps(StepDensity),
}

pub fn load_measure(path: &Path) -> CliResult<LoadedMeasure> {
    let text = read(path)?;
    let file: MeasureFile = parse(path, &text)?;
    let bad = |e: CoreError| CliError::input(format!("{}: {e}", path.display()));
    Ok(match file {
        MeasureFile::Atoms(a) => LoadedMeasure::Atoms(BoundaryMeasure::new(a.iter().map(|&[t, m]| (t, m))).map_err(bad)?),
        MeasureFile::Steps(s) => {
            let cells = s.iter().map(|&[a, b, _]| (a, b - a)).collect();
            let values = s.iter().map(|&[_, _, v]| v).collect();
            LoadedMeasure::Steps(StepDensity::new(cells, values).map_err(bad)?)
        }
    })
}
