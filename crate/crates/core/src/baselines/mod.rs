//! Comparison methods sharing a minimal streaming interface.

mod dvfa;
mod nn;
mod skm;
mod topofa;

pub use dvfa::{Dvfa, DvfaParams};
pub use nn::{Metric, NearestNeighbor};
pub use skm::{Seeding, Skm};
pub use topofa::{TopoFa, TopoFaParams};

use crate::error::Result;
use crate::trainer::TopoArtmap;

/// An online clusterer that learns one sample at a time and labels
/// samples with a frozen model.
pub trait StreamClusterer {
    fn learn(&mut self, x: &[f64]) -> Result<()>;

    /// Called once after the stream ends.
    fn finish(&mut self) -> Result<()> {
        Ok(())
    }

    fn predict_one(&self, x: &[f64]) -> Result<usize>;

    fn predict(&self, xs: &[Vec<f64>]) -> Result<Vec<usize>> {
        xs.iter().map(|x| self.predict_one(x)).collect()
    }

    fn n_clusters(&self) -> usize;

    fn n_categories(&self) -> usize;
}

impl StreamClusterer for TopoArtmap {
    fn learn(&mut self, x: &[f64]) -> Result<()> {
        self.step(x, None).map(|_| ())
    }

    fn predict_one(&self, x: &[f64]) -> Result<usize> {
        TopoArtmap::predict_one(self, x)
    }

    fn n_clusters(&self) -> usize {
        TopoArtmap::n_clusters(self)
    }

    fn n_categories(&self) -> usize {
        TopoArtmap::n_categories(self)
    }
}
