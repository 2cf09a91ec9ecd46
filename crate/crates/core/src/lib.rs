//! Streaming clustering with topological fuzzy ART prototypes, an ARTMAP
//! map field and incremental cluster validity indices.
//!
//! ```
//! use topoartmap::bench::{evaluate, gen_synthetic, order_stream, Order, SyntheticSpec};
//! use topoartmap::{Config, IndexKind, TopoArtmap};
//!
//! # fn main() -> topoartmap::Result<()> {
//! let data = gen_synthetic(1, &SyntheticSpec::default())?;
//! let stream = data.permuted(&order_stream(&data.truth, Order::ClassIncremental, 1));
//! let mut model = TopoArtmap::new(Config { icvi: IndexKind::Wb, xi: 500, ..Default::default() })?;
//! for x in &stream.samples {
//!     model.step(x, None)?;
//! }
//! let e = evaluate(&model, &data.samples, &data.truth)?;
//! assert_eq!(e.k_hat, 7);
//! # Ok(())
//! # }
//! ```

pub mod art;
pub mod baselines;
pub mod bench;
pub mod config;
pub mod error;
pub mod geometry;
pub mod icvi;
pub mod mapfield;
pub mod postproc;
pub mod stats;
pub mod trainer;

pub use config::{Config, SplitKind};
pub use error::{Error, Result};
pub use icvi::IndexKind;
pub use trainer::{StepReport, TopoArtmap};
