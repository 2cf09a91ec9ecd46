//! Experiment description, single runs and grid sweeps.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use topoartmap::baselines::{
    Dvfa, DvfaParams, Metric, NearestNeighbor, Seeding, Skm, StreamClusterer, TopoFa, TopoFaParams,
};
use topoartmap::bench::{
    accuracy, evaluate, gen_synthetic, order_stream, Dataset, Order, SyntheticSpec,
};
use topoartmap::{Config, TopoArtmap};

use crate::error::{CliError, Result};
use crate::grid::{cartesian, set_path, Grid};
use crate::ingest::ingest;

/// Environment variable bounding sweep parallelism.
pub const WORKERS_ENV: &str = "TOPOARTMAP_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    Topoartmap,
    Skm,
    Dvfa,
    Topofa,
    Nn,
}

impl std::str::FromStr for ModelKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "topoartmap" | "icvi_topoartmap" => ModelKind::Topoartmap,
            "skm" => ModelKind::Skm,
            "dvfa" | "ws_dvfa" => ModelKind::Dvfa,
            "topofa" | "ws_topofa" => ModelKind::Topofa,
            "nn" => ModelKind::Nn,
            other => return Err(CliError::Config(format!("unknown model '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SeedingKind {
    FirstK,
    #[default]
    Maximin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SkmSettings {
    pub k: usize,
    pub seeding: SeedingKind,
    /// Maximin buffer length; 0 means ten samples per centroid.
    pub buffer: usize,
}

impl Default for SkmSettings {
    fn default() -> Self {
        Self {
            k: 7,
            seeding: SeedingKind::Maximin,
            buffer: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct NnSettings {
    pub metric: Metric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Experiment {
    pub model: ModelKind,
    pub seed: u64,
    pub order: Order,
    /// `"synthetic"` or a CSV path.
    pub dataset: String,
    /// Whether the CSV carries a trailing label column.
    pub has_labels: bool,
    /// Labelled samples per class presented first; 0 runs unsupervised.
    pub labeled_per_class: usize,
    pub synthetic: SyntheticSpec,
    pub topoartmap: Config,
    pub skm: SkmSettings,
    pub dvfa: DvfaParams,
    pub topofa: TopoFaParams,
    pub nn: NnSettings,
    /// Dotted setting path to grid, e.g. `"topoartmap.rho_a" = "0:0.9:0.1"`.
    pub sweep: BTreeMap<String, Grid>,
}

impl Default for Experiment {
    fn default() -> Self {
        Self {
            model: ModelKind::Topoartmap,
            seed: 0,
            order: Order::Random,
            dataset: "synthetic".into(),
            has_labels: true,
            labeled_per_class: 0,
            synthetic: SyntheticSpec::default(),
            topoartmap: Config::default(),
            skm: SkmSettings::default(),
            dvfa: DvfaParams::default(),
            topofa: TopoFaParams::default(),
            nn: NnSettings::default(),
            sweep: BTreeMap::new(),
        }
    }
}

impl Experiment {
    /// Reads a TOML file; a relative dataset path is taken relative to it.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut exp: Experiment = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if exp.dataset != "synthetic" {
            let p = PathBuf::from(&exp.dataset);
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    exp.dataset = dir.join(p).to_string_lossy().into_owned();
                }
            }
        }
        Ok(exp)
    }

    pub fn validate(&self) -> Result<()> {
        self.topoartmap.validate()?;
        if self.model == ModelKind::Nn && self.labeled_per_class == 0 {
            return Err(CliError::Config(
                "the nn model needs labeled_per_class > 0".into(),
            ));
        }
        if self.labeled_per_class > 0
            && !matches!(self.model, ModelKind::Topoartmap | ModelKind::Nn)
        {
            return Err(CliError::Config(
                "only topoartmap and nn support labelled samples".into(),
            ));
        }
        Ok(())
    }

    pub fn load_data(&self) -> Result<Dataset> {
        if self.dataset == "synthetic" {
            Ok(gen_synthetic(self.seed, &self.synthetic)?)
        } else {
            ingest(Path::new(&self.dataset), self.has_labels)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Metrics {
    pub ari: Option<f64>,
    pub acc: Option<f64>,
    pub n_mis: Option<usize>,
    pub k_hat: usize,
    pub p: usize,
}

impl Metrics {
    /// Sweep ranking key.
    pub fn score(&self) -> f64 {
        self.acc.or(self.ari).unwrap_or(f64::NEG_INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: u64,
    pub cluster: usize,
    pub k: usize,
    pub p: usize,
    pub rho_a: Option<f64>,
    pub v: Option<u64>,
    pub icvi_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResults {
    pub metrics: Metrics,
    pub n_samples: usize,
    pub runtime_s: f64,
    pub config: Experiment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub results: RunResults,
    pub trace: Vec<TraceRow>,
}

fn stream(exp: &Experiment, data: &Dataset) -> Result<Dataset> {
    if data.truth.is_empty() && exp.order != Order::Random {
        return Err(CliError::Config(format!(
            "order '{}' needs labelled data",
            exp.order
        )));
    }
    let truth = if data.truth.is_empty() {
        vec![0; data.len()]
    } else {
        data.truth.clone()
    };
    let mut s = data.permuted(&order_stream(&truth, exp.order, exp.seed));
    if data.truth.is_empty() {
        s.truth.clear();
    }
    Ok(s)
}

fn build_baseline(exp: &Experiment) -> Result<Box<dyn StreamClusterer>> {
    Ok(match exp.model {
        ModelKind::Skm => {
            let s = exp.skm;
            let seeding = match s.seeding {
                SeedingKind::FirstK => Seeding::FirstK,
                SeedingKind::Maximin => Seeding::MaximinBuffer {
                    size: if s.buffer == 0 { 10 * s.k } else { s.buffer },
                },
            };
            Box::new(Skm::new(s.k, seeding)?)
        }
        ModelKind::Dvfa => Box::new(Dvfa::new(exp.dvfa)?),
        ModelKind::Topofa => Box::new(TopoFa::new(exp.topofa)?),
        ModelKind::Topoartmap | ModelKind::Nn => unreachable!("handled by the caller"),
    })
}

fn trace_row(r: &topoartmap::StepReport) -> TraceRow {
    TraceRow {
        t: r.t,
        cluster: r.cluster,
        k: r.k,
        p: r.p,
        rho_a: Some(r.rho_a),
        v: Some(r.v),
        icvi_value: r.value,
    }
}

/// Trains on the ordered stream and evaluates on the full data set.
pub fn run(exp: &Experiment) -> Result<RunOutput> {
    exp.validate()?;
    let start = Instant::now();
    let data = exp.load_data()?;
    let stream = stream(exp, &data)?;
    let (metrics, trace) = if exp.labeled_per_class > 0 {
        run_semi_supervised(exp, &stream)?
    } else {
        run_unsupervised(exp, &data, &stream)?
    };
    Ok(RunOutput {
        results: RunResults {
            metrics,
            n_samples: data.len(),
            runtime_s: start.elapsed().as_secs_f64(),
            config: exp.clone(),
        },
        trace,
    })
}

fn ari_if_labelled(data: &Dataset, pred: &[usize]) -> Result<Option<f64>> {
    if data.truth.is_empty() || data.len() < 2 {
        return Ok(None);
    }
    Ok(Some(topoartmap::bench::ari(pred, &data.truth)?))
}

fn run_unsupervised(
    exp: &Experiment,
    data: &Dataset,
    stream: &Dataset,
) -> Result<(Metrics, Vec<TraceRow>)> {
    let mut trace = Vec::with_capacity(stream.len());
    if exp.model == ModelKind::Topoartmap {
        let mut model = TopoArtmap::new(exp.topoartmap.clone())?;
        for x in &stream.samples {
            trace.push(trace_row(&model.step(x, None)?));
        }
        let metrics = Metrics {
            ari: ari_if_labelled(data, &model.predict(&data.samples)?)?,
            k_hat: model.n_clusters(),
            p: model.n_categories(),
            ..Default::default()
        };
        return Ok((metrics, trace));
    }
    let mut model = build_baseline(exp)?;
    for (t, x) in stream.samples.iter().enumerate() {
        model.learn(x)?;
        let cluster = model.predict_one(x).unwrap_or(0);
        trace.push(TraceRow {
            t: t as u64 + 1,
            cluster,
            k: model.n_clusters(),
            p: model.n_categories(),
            rho_a: None,
            v: None,
            icvi_value: None,
        });
    }
    model.finish()?;
    let metrics = if data.truth.is_empty() {
        Metrics {
            k_hat: model.n_clusters(),
            p: model.n_categories(),
            ..Default::default()
        }
    } else {
        let e = evaluate(model.as_ref(), &data.samples, &data.truth)?;
        Metrics {
            ari: Some(e.ari),
            k_hat: e.k_hat,
            p: e.p,
            ..Default::default()
        }
    };
    Ok((metrics, trace))
}

/// Splits the ordered stream into the first `l` samples of every class
/// and the rest, both in presentation order.
pub fn labelled_split(stream: &Dataset, l: usize) -> (Dataset, Dataset) {
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    let (mut train, mut test) = (Dataset::default(), Dataset::default());
    for (x, &y) in stream.samples.iter().zip(&stream.truth) {
        let n = seen.entry(y).or_default();
        let part = if *n < l { &mut train } else { &mut test };
        *n += 1;
        part.samples.push(x.clone());
        part.truth.push(y);
    }
    (train, test)
}

/// Labelled samples first, then the remainder streamed unlabelled; the
/// score is the accuracy of the label each model gives the remainder.
fn run_semi_supervised(exp: &Experiment, stream: &Dataset) -> Result<(Metrics, Vec<TraceRow>)> {
    if stream.truth.is_empty() {
        return Err(CliError::Config(
            "labeled_per_class needs labelled data".into(),
        ));
    }
    let (train, test) = labelled_split(stream, exp.labeled_per_class);
    if test.is_empty() {
        return Err(CliError::Config("no samples left for testing".into()));
    }
    let mut trace = Vec::new();
    let (pred, k_hat, p) = match exp.model {
        ModelKind::Nn => {
            let mut nn = NearestNeighbor::new(exp.nn.metric);
            for (x, &y) in train.samples.iter().zip(&train.truth) {
                nn.add(x, y)?;
            }
            let k = train
                .truth
                .iter()
                .collect::<std::collections::BTreeSet<_>>()
                .len();
            (nn.classify_all(&test.samples)?, k, nn.len())
        }
        _ => {
            let mut model = TopoArtmap::new(exp.topoartmap.clone())?;
            for (x, &y) in train.samples.iter().zip(&train.truth) {
                trace.push(trace_row(&model.step(x, Some(y))?));
            }
            let mut pred = Vec::with_capacity(test.len());
            for x in &test.samples {
                let r = model.step(x, None)?;
                pred.push(r.cluster);
                trace.push(trace_row(&r));
            }
            (pred, model.n_clusters(), model.n_categories())
        }
    };
    let a = accuracy(&pred, &test.truth)?;
    let metrics = Metrics {
        ari: None,
        acc: Some(a.acc),
        n_mis: Some(a.n_mis),
        k_hat,
        p,
    };
    Ok((metrics, trace))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub params: BTreeMap<String, Value>,
    pub metrics: Metrics,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    /// Index into `rows` of the best score; earliest on ties.
    pub best: usize,
    pub rows: Vec<SweepRow>,
    pub config: Experiment,
}

impl SweepOutput {
    pub fn best_row(&self) -> &SweepRow {
        &self.rows[self.best]
    }
}

/// Experiment for one grid point.
pub fn instantiate(base: &Experiment, point: &[(String, Value)]) -> Result<Experiment> {
    let mut tree = serde_json::to_value(base).map_err(|e| CliError::Config(e.to_string()))?;
    for (key, value) in point {
        set_path(&mut tree, key, value.clone())?;
    }
    let mut exp: Experiment =
        serde_json::from_value(tree).map_err(|e| CliError::Config(e.to_string()))?;
    exp.sweep.clear();
    Ok(exp)
}

fn workers() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()?
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

/// Runs every point of the Cartesian product of `exp.sweep`, in parallel.
pub fn sweep(exp: &Experiment) -> Result<SweepOutput> {
    let grids = exp
        .sweep
        .iter()
        .map(|(k, g)| Ok((k.clone(), g.values()?)))
        .collect::<Result<Vec<_>>>()?;
    let points = cartesian(&grids);
    let experiments = points
        .iter()
        .map(|p| instantiate(exp, p))
        .collect::<Result<Vec<_>>>()?;
    for e in &experiments {
        e.validate()?;
    }
    let job = || -> Result<Vec<SweepRow>> {
        experiments
            .par_iter()
            .zip(&points)
            .map(|(e, p)| {
                let out = run(e)?;
                Ok(SweepRow {
                    params: p.iter().cloned().collect(),
                    metrics: out.results.metrics,
                    runtime_s: out.results.runtime_s,
                })
            })
            .collect()
    };
    let rows = match workers() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(job)?,
        None => job()?,
    };
    let mut best = 0;
    for (i, r) in rows.iter().enumerate() {
        if r.metrics.score() > rows[best].metrics.score() {
            best = i;
        }
    }
    Ok(SweepOutput {
        best,
        rows,
        config: exp.clone(),
    })
}
