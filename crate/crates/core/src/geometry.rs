//! Online range tracking, min-max normalization, complement coding and the
//! recursive re-scaling of hyperbox weights when the observed range grows.
//!
//! A weight vector is stored as `[u, 1 - v]` where `[u, v]` is the hyperbox in
//! normalized coordinates. When the range expands, every box is mapped back
//! to raw units with the old range and forward again with the new one, so it
//! keeps describing the same raw-domain region.

use crate::error::{Error, Result};

/// Running per-feature minima and maxima, in raw units.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RangeState {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl RangeState {
    /// Range collapsed onto the first observed sample.
    pub fn new(first: &[f64]) -> Self {
        Self {
            min: first.to_vec(),
            max: first.to_vec(),
        }
    }

    pub fn from_bounds(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() {
            return Err(Error::DimensionMismatch {
                expected: min.len(),
                got: max.len(),
            });
        }
        if let Some(feature) = min.iter().zip(&max).position(|(lo, hi)| lo > hi) {
            return Err(Error::Inconsistent(format!(
                "range minimum exceeds maximum at feature {feature}"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    /// True when every feature has `max == min`.
    pub fn is_degenerate(&self) -> bool {
        self.min.iter().zip(&self.max).all(|(lo, hi)| lo == hi)
    }

    /// Absorbs `x` into the range. Returns whether any bound moved.
    pub fn observe(&mut self, x: &[f64]) -> Result<bool> {
        self.check_dim(x)?;
        let mut expanded = false;
        for ((lo, hi), &xi) in self.min.iter_mut().zip(self.max.iter_mut()).zip(x) {
            if xi < *lo {
                *lo = xi;
                expanded = true;
            }
            if xi > *hi {
                *hi = xi;
                expanded = true;
            }
        }
        Ok(expanded)
    }

    /// True when `other` contains this range in every feature.
    pub fn is_within(&self, other: &RangeState) -> bool {
        self.dim() == other.dim()
            && self
                .min
                .iter()
                .zip(&self.max)
                .zip(other.min.iter().zip(&other.max))
                .all(|((lo, hi), (olo, ohi))| olo <= lo && hi <= ohi)
    }

    /// Min-max normalization of one raw feature value. Degenerate features
    /// map to 0.5; values outside the range are clamped to `[0, 1]`.
    pub fn normalize_feature(&self, i: usize, value: f64) -> f64 {
        let span = self.max[i] - self.min[i];
        if span <= 0.0 {
            0.5
        } else {
            ((value - self.min[i]) / span).clamp(0.0, 1.0)
        }
    }

    /// Inverse of [`normalize_feature`](Self::normalize_feature), unclamped.
    pub fn denormalize_feature(&self, i: usize, value: f64) -> f64 {
        let span = self.max[i] - self.min[i];
        if span <= 0.0 {
            self.min[i]
        } else {
            self.min[i] + value * span
        }
    }

    pub fn normalize(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(x.iter()
            .enumerate()
            .map(|(i, &xi)| self.normalize_feature(i, xi))
            .collect())
    }

    /// Normalized and complement-coded input `[T(x), 1 - T(x)]`.
    pub fn normalize_cc(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(complement_code(&self.normalize(x)?))
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

pub fn complement_code(t: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * t.len());
    out.extend_from_slice(t);
    out.extend(t.iter().map(|v| 1.0 - v));
    out
}

/// Re-expresses complement-coded weights normalized against `old` in terms
/// of `new`, which must contain `old`.
///
/// For non-degenerate features the lower corner follows
/// `u' = (s_old/s_new) u + (min_old - min_new)/s_new` and the complemented
/// upper corner follows `v̄' = (s_old/s_new) v̄ + (max_new - max_old)/s_new`,
/// after which `u' >= 0` and `v' <= 1` are enforced.
pub fn rescale_weights(old: &RangeState, new: &RangeState, weights: &mut [Vec<f64>]) -> Result<()> {
    if old.dim() != new.dim() {
        return Err(Error::DimensionMismatch {
            expected: old.dim(),
            got: new.dim(),
        });
    }
    for i in 0..old.dim() {
        if new.min[i] > old.min[i] || new.max[i] < old.max[i] {
            return Err(Error::ShrinkingRange { feature: i });
        }
    }
    let d = old.dim();
    for w in weights.iter_mut() {
        if w.len() != 2 * d {
            return Err(Error::DimensionMismatch {
                expected: 2 * d,
                got: w.len(),
            });
        }
        for i in 0..d {
            let old_span = old.max[i] - old.min[i];
            let new_span = new.max[i] - new.min[i];
            let (u, vbar) = if new_span <= 0.0 {
                (0.5, 0.5)
            } else if old_span <= 0.0 {
                // The box was a single raw point at old.min.
                let t = (old.min[i] - new.min[i]) / new_span;
                (t, 1.0 - t)
            } else {
                let ratio = old_span / new_span;
                (
                    ratio * w[i] + (old.min[i] - new.min[i]) / new_span,
                    ratio * w[d + i] + (new.max[i] - old.max[i]) / new_span,
                )
            };
            w[i] = u.max(0.0);
            w[d + i] = vbar.max(0.0);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn range(min: &[f64], max: &[f64]) -> RangeState {
        RangeState::from_bounds(min.to_vec(), max.to_vec()).unwrap()
    }

    #[test]
    fn observe_interior_point_leaves_range() {
        let mut r = range(&[0.0], &[1.0]);
        assert!(!r.observe(&[0.5]).unwrap());
        assert_eq!(r, range(&[0.0], &[1.0]));
    }

    #[test]
    fn observe_pushes_bounds() {
        let mut r = range(&[0.0], &[1.0]);
        assert!(r.observe(&[2.0]).unwrap());
        assert_eq!(r.max(), &[2.0]);

        let mut r = range(&[0.0, 0.0], &[1.0, 1.0]);
        assert!(r.observe(&[-1.0, 3.0]).unwrap());
        assert_eq!(r.min(), &[-1.0, 0.0]);
        assert_eq!(r.max(), &[1.0, 3.0]);
    }

    #[test]
    fn observe_rejects_wrong_dimension() {
        let mut r = range(&[0.0], &[1.0]);
        assert!(matches!(
            r.observe(&[0.0, 1.0]),
            Err(Error::DimensionMismatch {
                expected: 1,
                got: 2
            })
        ));
    }

    #[test]
    fn complement_coding_examples() {
        let r = range(&[0.0, 0.0], &[1.0, 1.0]);
        let xa = r.normalize_cc(&[0.3, 0.7]).unwrap();
        for (a, b) in xa.iter().zip([0.3, 0.7, 0.7, 0.3]) {
            assert!((a - b).abs() < 1e-15);
        }
        let r = range(&[0.0], &[2.0]);
        assert_eq!(r.normalize_cc(&[0.0]).unwrap(), vec![0.0, 1.0]);
        let xa = r.normalize_cc(&[1.0]).unwrap();
        assert_eq!(xa, vec![0.5, 0.5]);
        assert_eq!(xa.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn degenerate_feature_maps_to_half() {
        let r = RangeState::new(&[3.0, 4.0]);
        assert_eq!(
            r.normalize_cc(&[3.0, 4.0]).unwrap(),
            vec![0.5, 0.5, 0.5, 0.5]
        );
    }

    #[test]
    fn rescale_examples() {
        let mut w = vec![vec![0.4, 0.2]];
        rescale_weights(&range(&[0.0], &[1.0]), &range(&[0.0], &[2.0]), &mut w).unwrap();
        assert!((w[0][0] - 0.2).abs() < 1e-15);
        assert!((w[0][1] - 0.6).abs() < 1e-15);

        let mut w = vec![vec![0.4, 0.2]];
        rescale_weights(&range(&[0.0], &[1.0]), &range(&[0.0], &[1.0]), &mut w).unwrap();
        assert_eq!(w, vec![vec![0.4, 0.2]]);

        // Box [0, 1] in raw units seen from [-1, 1] is [0.5, 1], i.e. w = [0.5, 0].
        let mut w = vec![vec![0.0, 0.0]];
        rescale_weights(&range(&[0.0], &[1.0]), &range(&[-1.0], &[1.0]), &mut w).unwrap();
        assert_eq!(w, vec![vec![0.5, 0.0]]);
    }

    #[test]
    fn rescale_rejects_shrinking_range() {
        let mut w = vec![vec![0.4, 0.2]];
        let err = rescale_weights(&range(&[0.0], &[2.0]), &range(&[0.0], &[1.0]), &mut w);
        assert_eq!(err, Err(Error::ShrinkingRange { feature: 0 }));
    }

    #[test]
    fn rescale_from_degenerate_range_keeps_point() {
        let old = RangeState::new(&[2.0]);
        let new = range(&[0.0], &[4.0]);
        let mut w = vec![vec![0.5, 0.5]];
        rescale_weights(&old, &new, &mut w).unwrap();
        assert_eq!(w, vec![vec![0.5, 0.5]]);
        let new = range(&[2.0], &[3.0]);
        let mut w = vec![vec![0.5, 0.5]];
        rescale_weights(&old, &new, &mut w).unwrap();
        assert_eq!(w, vec![vec![0.0, 1.0]]);
    }
}
