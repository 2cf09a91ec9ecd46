use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use topoartmap::bench::Order;
use topoartmap::IndexKind;
use topoartmap_cli::grid::Grid;
use topoartmap_cli::{experiment, output, CliError, Experiment, ModelKind};

#[derive(Parser)]
#[command(
    name = "topoartmap",
    version,
    about = "Streaming clustering experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and evaluate one model; runs a sweep when grids are given.
    Run(Opts),
    /// Run every point of the configured grids.
    Sweep(Opts),
}

#[derive(Args)]
struct Opts {
    /// TOML experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// topoartmap, skm, dvfa, topofa or nn.
    #[arg(long)]
    model: Option<ModelKind>,
    /// Validity index: ich, iwb, ipbm, ixb, idb or iconn.
    #[arg(long)]
    icvi: Option<IndexKind>,
    /// class_incremental, mixed or random.
    #[arg(long)]
    order: Option<Order>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of skm centroids.
    #[arg(long)]
    k: Option<usize>,
    /// `synthetic` or a CSV file.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Extra grid, e.g. `topoartmap.rho_a=0:0.9:0.1`. Repeatable.
    #[arg(long, value_name = "KEY=GRID")]
    sweep: Vec<String>,
}

impl Opts {
    fn experiment(&self) -> Result<Experiment, CliError> {
        let mut exp = match &self.config {
            Some(p) => Experiment::load(p)?,
            None => Experiment::default(),
        };
        if let Some(m) = self.model {
            exp.model = m;
        }
        if let Some(i) = self.icvi {
            exp.topoartmap.icvi = i;
        }
        if let Some(o) = self.order {
            exp.order = o;
        }
        if let Some(s) = self.seed {
            exp.seed = s;
        }
        if let Some(k) = self.k {
            exp.skm.k = k;
        }
        if let Some(d) = &self.dataset {
            exp.dataset = d.clone();
        }
        for s in &self.sweep {
            let (key, grid) = s
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--sweep expects KEY=GRID, got '{s}'")))?;
            exp.sweep
                .insert(key.trim().to_string(), Grid::Range(grid.trim().to_string()));
        }
        Ok(exp)
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (opts, force_sweep) = match &cli.command {
        Command::Run(o) => (o, false),
        Command::Sweep(o) => (o, true),
    };
    let exp = opts.experiment()?;
    if force_sweep && exp.sweep.is_empty() {
        return Err(CliError::Config("sweep needs at least one grid".into()));
    }
    if exp.sweep.is_empty() {
        let out = experiment::run(&exp)?;
        output::write_run(&opts.out_dir, &out)?;
        let m = out.results.metrics;
        println!(
            "ari={} acc={} k_hat={} p={} runtime_s={:.3}",
            m.ari.map_or("-".into(), output::fmt_f64),
            m.acc.map_or("-".into(), output::fmt_f64),
            m.k_hat,
            m.p,
            out.results.runtime_s
        );
    } else {
        let out = experiment::sweep(&exp)?;
        output::write_sweep(&opts.out_dir, &out)?;
        let best = out.best_row();
        let params: Vec<String> = best
            .params
            .iter()
            .map(|(k, v)| match v {
                serde_json::Value::String(s) => format!("{k}={s}"),
                v => format!("{k}={v}"),
            })
            .collect();
        println!(
            "{} points; best {} score={}",
            out.rows.len(),
            params.join(" "),
            output::fmt_f64(best.metrics.score())
        );
    }
    log::info!("results written to {}", opts.out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
