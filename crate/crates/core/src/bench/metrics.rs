use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn pairs(n: u64) -> f64 {
    (n * n.saturating_sub(1)) as f64 / 2.0
}

fn check_lengths(a: &[usize], b: &[usize]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LabelLengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Adjusted Rand index (Hubert and Arabie).
///
/// When the expected and maximum index coincide (both partitions trivial)
/// the result is 1 for identical partitions and 0 otherwise.
pub fn ari(a: &[usize], b: &[usize]) -> Result<f64> {
    check_lengths(a, b)?;
    if a.len() < 2 {
        return Err(Error::TooFewLabels);
    }
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&n| pairs(n)).sum();
    let sum_a: f64 = rows.values().map(|&n| pairs(n)).sum();
    let sum_b: f64 = cols.values().map(|&n| pairs(n)).sum();
    let expected = sum_a * sum_b / pairs(a.len() as u64);
    let max = (sum_a + sum_b) / 2.0;
    if max == expected {
        let identical = table.len() == rows.len() && table.len() == cols.len();
        return Ok(if identical { 1.0 } else { 0.0 });
    }
    Ok((index - expected) / (max - expected))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub acc: f64,
    pub n_mis: usize,
}

pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<Accuracy> {
    check_lengths(pred, truth)?;
    if pred.is_empty() {
        return Err(Error::TooFewLabels);
    }
    let n_mis = pred.iter().zip(truth).filter(|(p, t)| p != t).count();
    Ok(Accuracy {
        acc: 1.0 - n_mis as f64 / pred.len() as f64,
        n_mis,
    })
}
