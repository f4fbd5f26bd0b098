use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lais::config::{Algorithm, RunConfig};
use lais::runner;
use lais::Result;

#[derive(Parser)]
#[command(name = "lais", version, about = "Langevin annealed importance sampling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plain AIS replications.
    RunAis(Common),
    /// Autonormalized AIS replications.
    RunAnais(Common),
    /// Gaussian weight-variance experiment.
    RunGaussian(Common),
    /// One run per value of `sweep_param`.
    Sweep(Common),
    /// Eigenvalues, mixing times and C_P(T) per temperature.
    SpectralReport(Common),
    /// Calibrate the rule constants and print them as JSON.
    Calibrate(Common),
}

/// Flags mirror config keys and override values from the file.
#[derive(Args)]
struct Common {
    /// `key = value` config file, or a CSV emitted by an earlier run.
    config: Option<PathBuf>,
    /// Write the output here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the per-function diagnostics report as JSON.
    #[arg(long)]
    report_json: Option<PathBuf>,
    /// Arbitrary `key=value` assignment, applied after the named flags.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    potential: Option<String>,
    #[arg(long)]
    asymmetry: Option<String>,
    #[arg(long = "epsilon_target", alias = "epsilon-target")]
    epsilon_target: Option<String>,
    #[arg(long = "epsilon_1", alias = "epsilon-1")]
    epsilon_1: Option<String>,
    #[arg(long)]
    nu: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long = "override_T", alias = "override-t")]
    override_t: Option<String>,
    #[arg(long = "override_N", alias = "override-n")]
    override_n: Option<String>,
    #[arg(long = "override_K", alias = "override-k")]
    override_k: Option<String>,
    #[arg(long = "step_size_factor", alias = "step-size-factor")]
    step_size_factor: Option<String>,
    #[arg(long = "master_seed", alias = "master-seed")]
    master_seed: Option<String>,
    #[arg(long = "n_replications", alias = "n-replications")]
    n_replications: Option<String>,
    #[arg(long = "sobolev_s", alias = "sobolev-s")]
    sobolev_s: Option<String>,
    #[arg(long = "fourier_n_max", alias = "fourier-n-max")]
    fourier_n_max: Option<String>,
    #[arg(long = "grid_points", alias = "grid-points")]
    grid_points: Option<String>,
    #[arg(long)]
    modes: Option<String>,
    #[arg(long = "burn_in", alias = "burn-in")]
    burn_in: Option<String>,
    #[arg(long = "pilot_chains", alias = "pilot-chains")]
    pilot_chains: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    #[arg(long)]
    timing: Option<String>,
    #[arg(long = "cache_dir", alias = "cache-dir")]
    cache_dir: Option<String>,
    /// Recompute the calibration even if a cached copy exists.
    #[arg(long = "no-cache", alias = "no_cache")]
    no_cache: bool,
    #[arg(long = "eps_list", alias = "eps-list")]
    eps_list: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long = "n_samples", alias = "n-samples")]
    n_samples: Option<String>,
    #[arg(long = "sweep_param", alias = "sweep-param")]
    sweep_param: Option<String>,
    #[arg(long = "sweep_values", alias = "sweep-values")]
    sweep_values: Option<String>,
}

impl Common {
    fn resolve(&self, algorithm: Option<Algorithm>) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::parse(&fs::read_to_string(path)?)?,
            None => RunConfig::default(),
        };
        if let Some(a) = algorithm {
            cfg.algorithm = a;
        }
        let named = [
            ("potential", &self.potential),
            ("asymmetry", &self.asymmetry),
            ("epsilon_target", &self.epsilon_target),
            ("epsilon_1", &self.epsilon_1),
            ("nu", &self.nu),
            ("delta", &self.delta),
            ("alpha", &self.alpha),
            ("override_T", &self.override_t),
            ("override_N", &self.override_n),
            ("override_K", &self.override_k),
            ("step_size_factor", &self.step_size_factor),
            ("master_seed", &self.master_seed),
            ("n_replications", &self.n_replications),
            ("sobolev_s", &self.sobolev_s),
            ("fourier_n_max", &self.fourier_n_max),
            ("grid_points", &self.grid_points),
            ("modes", &self.modes),
            ("burn_in", &self.burn_in),
            ("pilot_chains", &self.pilot_chains),
            ("threads", &self.threads),
            ("timing", &self.timing),
            ("cache_dir", &self.cache_dir),
            ("eps_list", &self.eps_list),
            ("d", &self.d),
            ("mode", &self.mode),
            ("n_samples", &self.n_samples),
            ("sweep_param", &self.sweep_param),
            ("sweep_values", &self.sweep_values),
        ];
        for (key, value) in named {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for assignment in &self.set {
            let (k, v) = assignment
                .split_once('=')
                .ok_or_else(|| lais::Error::Config {
                    key: assignment.clone(),
                    reason: "expected KEY=VALUE".into(),
                })?;
            cfg.set(k.trim(), v.trim())?;
        }
        if self.no_cache {
            cfg.no_cache = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::RunAis(c) => sampler(c, Algorithm::Ais),
        Command::RunAnais(c) => sampler(c, Algorithm::Anais),
        Command::RunGaussian(c) => {
            let cfg = c.resolve(Some(Algorithm::Gaussian))?;
            c.emit(&runner::run_gaussian(&cfg)?.0)
        }
        Command::Sweep(c) => {
            let cfg = c.resolve(None)?;
            let (text, outs) = runner::sweep(&cfg)?;
            if let Some(path) = &c.report_json {
                let reports: Vec<_> = outs.iter().map(|o| &o.reports).collect();
                fs::write(path, serde_json::to_string_pretty(&reports)?)?;
            }
            c.emit(&text)
        }
        Command::SpectralReport(c) => {
            let cfg = c.resolve(None)?;
            c.emit(&runner::spectral_report(&cfg)?.0)
        }
        Command::Calibrate(c) => {
            let cfg = c.resolve(None)?;
            c.emit(&runner::calibrate_json(&cfg)?)
        }
    }
}

fn sampler(c: Common, algorithm: Algorithm) -> Result<()> {
    let cfg = c.resolve(Some(algorithm))?;
    let (text, out) = runner::run_csv(&cfg)?;
    if let Some(path) = &c.report_json {
        fs::write(path, serde_json::to_string_pretty(&out.reports)?)?;
    }
    c.emit(&text)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lais: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
