//! Parameter grids: `start:stop:step` ranges or explicit value lists.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Range(String),
    Values(Vec<Value>),
}

impl Grid {
    pub fn values(&self) -> Result<Vec<Value>> {
        match self {
            Grid::Values(v) if v.is_empty() => Err(CliError::Config("empty grid".into())),
            Grid::Values(v) => Ok(v.clone()),
            Grid::Range(s) => parse_range(s),
        }
    }
}

/// Inclusive `start:stop:step`; a bare number is a singleton. Values are
/// computed as `start + i * step` and rounded to 12 decimals so that
/// `0:0.9:0.1` yields exactly ten points.
pub fn parse_range(s: &str) -> Result<Vec<Value>> {
    let bad = || CliError::Config(format!("bad grid '{s}', expected start:stop:step"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (start, stop, step) = match parts[..] {
        [v] => (v, v, 1.0),
        [a, b, c] => (a, b, c),
        _ => return Err(bad()),
    };
    if step.is_nan() || step <= 0.0 || stop < start || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    let integral = [start, stop, step].iter().all(|v| v.fract() == 0.0);
    Ok((0..n)
        .map(|i| {
            let v = start + i as f64 * step;
            if integral {
                Value::from(v as i64)
            } else {
                Value::from((v * 1e12).round() / 1e12)
            }
        })
        .collect())
}

/// Writes `value` at a dotted `path` inside a JSON tree.
pub fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut node = root;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("'{path}' does not name a setting")))?;
        if i + 1 == keys.len() {
            if !obj.contains_key(*key) {
                return Err(CliError::Config(format!("unknown setting '{path}'")));
            }
            obj.insert(key.to_string(), value);
            return Ok(());
        }
        node = obj
            .get_mut(*key)
            .ok_or_else(|| CliError::Config(format!("unknown setting '{path}'")))?;
    }
    unreachable!("split yields at least one key")
}

/// Every combination of the grids, in row-major order of `grids`.
pub fn cartesian(grids: &[(String, Vec<Value>)]) -> Vec<Vec<(String, Value)>> {
    let mut rows: Vec<Vec<(String, Value)>> = vec![Vec::new()];
    for (key, values) in grids {
        rows = rows
            .into_iter()
            .flat_map(|row| {
                values.iter().map(move |v| {
                    let mut r = row.clone();
                    r.push((key.clone(), v.clone()));
                    r
                })
            })
            .collect();
    }
    rows
}
