use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qwalk_core::Tolerances;
use qwalk_experiment::{
    audit_states, fit_scalings, read_csv, run_preset, run_sweep, ExperimentConfig, ExperimentError, FitRanges, Preset,
    Result,
};

/// Monitored single-particle quantum walk: figure presets, sweeps, fits and audits.
#[derive(Parser, Debug)]
#[command(name = "qwalk", version)]
struct Cli {
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for trajectory ensembles.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (overrides the config file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Full chain length and trajectory counts instead of desk scale.
    #[arg(long, global = true)]
    paper_scale: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate the data of a figure preset (or a custom run).
    Run(GridArgs),
    /// Maximal and final mean coherence over a (k, eta) grid.
    Sweep(GridArgs),
    /// Power-law and exponential fits of a `cn_max` table.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        k_min: f64,
        #[arg(long, default_value_t = 0.5)]
        eta_max: f64,
    },
    /// Check every stored state snapshot for physicality.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args, Debug)]
struct GridArgs {
    /// JSON config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<Preset>,
    /// Comma-separated measurement strengths.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<f64>>,
    /// Comma-separated efficiencies.
    #[arg(long, value_delimiter = ',')]
    eta: Option<Vec<f64>>,
    #[arg(long)]
    chain_length: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    trajectories: Option<usize>,
    #[arg(long)]
    sample_stride: Option<usize>,
    #[arg(long)]
    init_site: Option<usize>,
    #[arg(long)]
    emit_states: bool,
    /// Use the single-operator Kraus scheme without propagator splitting.
    #[arg(long)]
    plain: bool,
}

fn build_config(cli: &Cli, args: &GridArgs) -> Result<ExperimentConfig> {
    let mut cfg = match (&args.config, args.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(p)) => ExperimentConfig::for_preset(p),
        (None, None) => return Err(ExperimentError::Config("either --config or --preset is required".into())),
    };
    if let (Some(_), Some(p)) = (&args.config, args.preset) {
        cfg.preset = p;
    }
    if let Some(k) = &args.k {
        cfg.k = k.clone();
    }
    if let Some(eta) = &args.eta {
        cfg.eta = eta.clone();
    }
    cfg.chain_length = args.chain_length.or(cfg.chain_length);
    let o = &mut cfg.overrides;
    o.dt = args.dt.or(o.dt);
    o.t_final = args.t_final.or(o.t_final);
    o.n_traj = args.trajectories.or(o.n_traj);
    o.sample_stride = args.sample_stride.or(o.sample_stride);
    o.init_site = args.init_site.or(o.init_site);
    cfg.emit_states |= args.emit_states;
    cfg.plain_scheme |= args.plain;
    cfg.paper_scale |= cli.paper_scale;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| ExperimentError::Io { path: dir.to_path_buf(), source })?;
    }
    let f = File::create(path).map_err(|source| ExperimentError::Io { path: path.to_path_buf(), source })?;
    serde_json::to_writer_pretty(f, value).map_err(|source| ExperimentError::Json { path: path.to_path_buf(), source })
}

fn execute(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Run(args) | Command::Sweep(args) => {
            let cfg = build_config(cli, args)?;
            let outcome = match cli.command {
                Command::Sweep(_) => run_sweep(&cfg)?,
                _ => run_preset(&cfg)?,
            };
            for path in outcome.write(&cfg.output_dir)? {
                println!("{}", path.display());
            }
            let failed = outcome.failed_cells();
            if failed > 0 {
                eprintln!("{failed} of {} cells failed; see the metadata sidecar", outcome.metadata.cells.len());
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fit { input, k_min, eta_max } => {
            let table = read_csv(input)?;
            let report = fit_scalings(&table, FitRanges { k_min: *k_min, eta_max: *eta_max })?;
            for f in &report.power_laws {
                println!("eta={}: C ~ k^-{:.6} (R^2 = {:.6}, {} points)", f.eta, f.exponent, f.r_squared, f.points);
            }
            for f in &report.exponentials {
                println!("k={}: C ~ exp({:.6} eta) (R^2 = {:.6}, {} points)", f.k, f.rate, f.r_squared, f.points);
            }
            for n in &report.notices {
                eprintln!("note: {n}");
            }
            let out = cli.out.clone().unwrap_or_else(|| input.with_extension("fit.json"));
            let path = if cli.out.is_some() { out.join("fit.json") } else { out };
            write_json(&report, &path)?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { input } => {
            let table = read_csv(input)?;
            let report = audit_states(&table, &Tolerances::default())?;
            println!("{} states checked, {} violations", report.states_checked, report.violations.len());
            for v in &report.violations {
                println!("k={} eta={} t={}: {}", v.k, v.eta, v.t, v.failed.join(", "));
            }
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
