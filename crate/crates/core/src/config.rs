//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. The runner echoes the
//! resolved configuration at the top of every CSV as `# key = value` lines
//! after a `# lais <command>` marker, and [`RunConfig::parse`] accepts such a
//! file back, so an output reproduces its own run.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::gaussian::LevelChoice;

/// First line of every emitted file.
pub const ECHO_MARKER: &str = "# lais ";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Ais,
    Anais,
    Gaussian,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Ais => "ais",
            Algorithm::Anais => "anais",
            Algorithm::Gaussian => "gaussian",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "ais" => Ok(Algorithm::Ais),
            "anais" => Ok(Algorithm::Anais),
            "gaussian" => Ok(Algorithm::Gaussian),
            other => Err(Error::config("algorithm", format!("expected ais, anais or gaussian, got {other:?}"))),
        }
    }
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    EpsilonTarget,
    Delta,
    T,
    N,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::EpsilonTarget => "epsilon_target",
            SweepParam::Delta => "delta",
            SweepParam::T => "T",
            SweepParam::N => "N",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "epsilon_target" => Ok(SweepParam::EpsilonTarget),
            "delta" => Ok(SweepParam::Delta),
            "T" => Ok(SweepParam::T),
            "N" => Ok(SweepParam::N),
            other => Err(Error::config(
                "sweep_param",
                format!("expected epsilon_target, delta, T or N, got {other:?}"),
            )),
        }
    }
}

/// Gaussian experiment mode; `Both` runs one-shot and annealed per `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussianMode {
    One(LevelChoice),
    Both,
}

impl GaussianMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GaussianMode::One(c) => c.as_str(),
            GaussianMode::Both => "both",
        }
    }

    pub fn choices(self) -> Vec<LevelChoice> {
        match self {
            GaussianMode::One(c) => vec![c],
            GaussianMode::Both => vec![LevelChoice::OneShot, LevelChoice::Annealed],
        }
    }

    fn parse(s: &str) -> Result<Self> {
        if s == "both" {
            Ok(GaussianMode::Both)
        } else {
            LevelChoice::parse(s).map(GaussianMode::One)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub potential: String,
    pub asymmetry: f64,
    pub epsilon_target: f64,
    pub epsilon_1: f64,
    pub nu: f64,
    pub delta: f64,
    pub alpha: f64,
    pub algorithm: Algorithm,
    pub override_t: Option<f64>,
    pub override_n: Option<usize>,
    pub override_k: Option<usize>,
    pub step_size_factor: f64,
    pub master_seed: u64,
    pub n_replications: usize,
    pub sobolev_s: f64,
    pub fourier_n_max: usize,
    pub grid_points: usize,
    pub modes: usize,
    /// Run `P_1` for `T` from the first well before the first transition.
    pub burn_in: bool,
    pub pilot_chains: usize,
    pub pilot_seed: u64,
    pub threads: usize,
    pub timing: bool,
    pub cache_dir: PathBuf,
    pub no_cache: bool,
    pub eps_list: Vec<f64>,
    pub d: usize,
    pub mode: GaussianMode,
    pub n_samples: usize,
    pub sweep_param: Option<SweepParam>,
    pub sweep_values: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            potential: "double_well_1d".into(),
            asymmetry: 0.0,
            epsilon_target: 0.1,
            epsilon_1: 1.0,
            nu: 1.0,
            delta: 0.2,
            alpha: 0.1,
            algorithm: Algorithm::Ais,
            override_t: None,
            override_n: None,
            override_k: None,
            step_size_factor: 1.0,
            master_seed: 0,
            n_replications: 20,
            sobolev_s: 1.0,
            fourier_n_max: 64,
            grid_points: 4096,
            modes: 16,
            burn_in: true,
            pilot_chains: 2000,
            pilot_seed: 0x0070_696c_6f74,
            threads: 1,
            timing: false,
            cache_dir: PathBuf::from(".lais-cache"),
            no_cache: false,
            eps_list: vec![0.5, 0.25, 0.125],
            d: 1,
            mode: GaussianMode::Both,
            n_samples: 100_000,
            sweep_param: None,
            sweep_values: Vec::new(),
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| Error::config(key, format!("cannot parse {value:?}: {e}")))
}

fn optional<T: std::str::FromStr>(key: &str, value: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if value == "none" {
        Ok(None)
    } else {
        num(key, value).map(Some)
    }
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::config(key, format!("expected true or false, got {other:?}"))),
    }
}

fn list(key: &str, value: &str) -> Result<Vec<f64>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| num(key, v.trim())).collect()
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn show<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or("none".to_string(), T::to_string)
}

impl RunConfig {
    /// Parses a config file, or the echoed header of an emitted CSV.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Applies the assignments in `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let echoed = text.trim_start().starts_with(ECHO_MARKER);
        for (lineno, raw) in text.lines().enumerate() {
            let line = if echoed {
                match raw.strip_prefix("# ") {
                    Some(rest) if !rest.starts_with("lais ") && !rest.starts_with("resolved.") => rest,
                    Some(_) => continue,
                    // the echoed block ends at the first data line
                    None => break,
                }
            } else {
                raw.split('#').next().unwrap_or("")
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}", lineno + 1), format!("expected `key = value`, got {line:?}"))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Sets one key; unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "potential" => self.potential = value.to_string(),
            "asymmetry" => self.asymmetry = num(key, value)?,
            "epsilon_target" => self.epsilon_target = num(key, value)?,
            "epsilon_1" => self.epsilon_1 = num(key, value)?,
            "nu" => self.nu = num(key, value)?,
            "delta" => self.delta = num(key, value)?,
            "alpha" => self.alpha = num(key, value)?,
            "algorithm" => self.algorithm = Algorithm::parse(value)?,
            "override_T" => self.override_t = optional(key, value)?,
            "override_N" => self.override_n = optional(key, value)?,
            "override_K" => self.override_k = optional(key, value)?,
            "step_size_factor" => self.step_size_factor = num(key, value)?,
            "master_seed" => self.master_seed = num(key, value)?,
            "n_replications" => self.n_replications = num(key, value)?,
            "sobolev_s" => self.sobolev_s = num(key, value)?,
            "fourier_n_max" => self.fourier_n_max = num(key, value)?,
            "grid_points" => self.grid_points = num(key, value)?,
            "modes" => self.modes = num(key, value)?,
            "burn_in" => self.burn_in = boolean(key, value)?,
            "pilot_chains" => self.pilot_chains = num(key, value)?,
            "pilot_seed" => self.pilot_seed = num(key, value)?,
            "threads" => self.threads = num(key, value)?,
            "timing" => self.timing = boolean(key, value)?,
            "cache_dir" => self.cache_dir = PathBuf::from(value),
            "no_cache" => self.no_cache = boolean(key, value)?,
            "eps_list" => self.eps_list = list(key, value)?,
            "d" => self.d = num(key, value)?,
            "mode" => self.mode = GaussianMode::parse(value)?,
            "n_samples" => self.n_samples = num(key, value)?,
            "sweep_param" => {
                self.sweep_param = if value == "none" { None } else { Some(SweepParam::parse(value)?) }
            }
            "sweep_values" => self.sweep_values = list(key, value)?,
            other => return Err(Error::config(other, "unknown key")),
        }
        Ok(())
    }

    /// Every key with its current value, in a fixed order.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("algorithm", self.algorithm.as_str().into()),
            ("potential", self.potential.clone()),
            ("asymmetry", self.asymmetry.to_string()),
            ("epsilon_target", self.epsilon_target.to_string()),
            ("epsilon_1", self.epsilon_1.to_string()),
            ("nu", self.nu.to_string()),
            ("delta", self.delta.to_string()),
            ("alpha", self.alpha.to_string()),
            ("override_T", show(&self.override_t)),
            ("override_N", show(&self.override_n)),
            ("override_K", show(&self.override_k)),
            ("step_size_factor", self.step_size_factor.to_string()),
            ("master_seed", self.master_seed.to_string()),
            ("n_replications", self.n_replications.to_string()),
            ("sobolev_s", self.sobolev_s.to_string()),
            ("fourier_n_max", self.fourier_n_max.to_string()),
            ("grid_points", self.grid_points.to_string()),
            ("modes", self.modes.to_string()),
            ("burn_in", self.burn_in.to_string()),
            ("pilot_chains", self.pilot_chains.to_string()),
            ("pilot_seed", self.pilot_seed.to_string()),
            ("timing", self.timing.to_string()),
            ("eps_list", join(&self.eps_list)),
            ("d", self.d.to_string()),
            ("mode", self.mode.as_str().into()),
            ("n_samples", self.n_samples.to_string()),
            ("sweep_param", self.sweep_param.map_or("none".into(), |p| p.as_str().into())),
            ("sweep_values", join(&self.sweep_values)),
        ]
    }

    /// The `# key = value` block opening every emitted file. `threads`,
    /// `cache_dir` and `no_cache` are left out: they never change the output.
    pub fn echo(&self, command: &str) -> String {
        let mut out = format!("{ECHO_MARKER}{command}\n");
        for (k, v) in self.pairs() {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out
    }

    /// Field-level validation of everything the runner relies on.
    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be positive and finite, got {v}")))
            }
        };
        positive("epsilon_target", self.epsilon_target)?;
        positive("epsilon_1", self.epsilon_1)?;
        if self.algorithm != Algorithm::Gaussian && !(self.epsilon_target < self.epsilon_1) {
            return Err(Error::config(
                "epsilon_target",
                format!("must be below epsilon_1 = {}, got {}", self.epsilon_1, self.epsilon_target),
            ));
        }
        positive("nu", self.nu)?;
        positive("delta", self.delta)?;
        positive("alpha", self.alpha)?;
        positive("step_size_factor", self.step_size_factor)?;
        positive("sobolev_s", self.sobolev_s)?;
        if let Some(t) = self.override_t {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::config("override_T", format!("must be nonnegative and finite, got {t}")));
            }
        }
        if self.override_n == Some(0) {
            return Err(Error::config("override_N", "must be at least 1"));
        }
        if self.override_k == Some(0) {
            return Err(Error::config("override_K", "must be at least 1"));
        }
        if self.n_replications == 0 {
            return Err(Error::config("n_replications", "must be at least 1"));
        }
        if self.threads == 0 {
            return Err(Error::config("threads", "must be at least 1"));
        }
        if self.pilot_chains < 2 {
            return Err(Error::config("pilot_chains", "must be at least 2"));
        }
        if self.fourier_n_max == 0 || 2 * self.fourier_n_max >= self.grid_points {
            return Err(Error::config(
                "fourier_n_max",
                format!("must be positive and below grid_points/2, got {}", self.fourier_n_max),
            ));
        }
        if self.grid_points < 64 || !self.grid_points.is_multiple_of(2) {
            return Err(Error::config("grid_points", format!("must be even and ≥ 64, got {}", self.grid_points)));
        }
        if self.modes < 4 || 2 * self.modes > self.grid_points {
            return Err(Error::config("modes", format!("must be in [4, grid_points/2], got {}", self.modes)));
        }
        if self.d == 0 {
            return Err(Error::config("d", "must be at least 1"));
        }
        if self.n_samples < 2 {
            return Err(Error::config("n_samples", "must be at least 2"));
        }
        if let Some(bad) = self.eps_list.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
            return Err(Error::config("eps_list", format!("entries must be positive, got {bad}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let cfg = RunConfig::parse(
            "# header\npotential = double_well_1d\nepsilon_target = 0.15 # trailing\noverride_K = 3\n\nthreads=4\n",
        )
        .unwrap();
        assert_eq!(cfg.epsilon_target, 0.15);
        assert_eq!(cfg.override_k, Some(3));
        assert_eq!(cfg.threads, 4);
        cfg.validate().unwrap();
    }

    #[test]
    fn field_errors() {
        let err = RunConfig::parse("override_K = 0").unwrap().validate().unwrap_err();
        assert!(matches!(&err, Error::Config { key, .. } if key == "override_K"), "{err}");
        assert_eq!(err.exit_code(), 2);
        assert!(matches!(RunConfig::parse("bogus = 1"), Err(Error::Config { .. })));
        assert!(matches!(RunConfig::parse("delta = abc"), Err(Error::Config { .. })));
        assert!(matches!(RunConfig::parse("just words"), Err(Error::Config { .. })));
        let cfg = RunConfig { epsilon_target: 2.0, ..RunConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig { n_replications: 0, ..RunConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn echo_round_trips() {
        let cfg = RunConfig {
            epsilon_target: 0.1 + 0.2,
            override_t: Some(1.0 / 3.0),
            eps_list: vec![0.5, 1e-3],
            sweep_param: Some(SweepParam::N),
            sweep_values: vec![10.0, 20.0],
            ..RunConfig::default()
        };
        let mut text = cfg.echo("run-ais");
        text.push_str("# resolved.K = 10\nreplication,eps_target\n0,0.3\n# not a key line\n");
        let back = RunConfig::parse(&text).unwrap();
        // keys left out of the echo keep their defaults
        assert_eq!(back, RunConfig { threads: 1, ..cfg });
    }
}
