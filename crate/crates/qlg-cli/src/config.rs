//! Run configuration: defaults mirroring the reference parameter set, a flat
//! key=value config file, and command-line overrides. Precedence is
//! CLI > file > defaults.

use anyhow::{anyhow, bail, Context, Result};
use qlg_core::model::{ModelParams, Prep};
use std::path::{Path, PathBuf};

/// Environment variable that re-roots relative output paths.
pub const OUT_DIR_VAR: &str = "QML_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTarget {
    Simulate,
    Witness,
    Nonmarkov,
}

impl SweepTarget {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "simulate" => Ok(Self::Simulate),
            "witness" => Ok(Self::Witness),
            "nonmarkov" => Ok(Self::Nonmarkov),
            other => bail!("run must be simulate, witness, or nonmarkov, got {other}"),
        }
    }
}

/// Flat configuration document shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub j_hz: f64,
    pub theta_rad: f64,
    pub gamma_per_s: f64,
    pub epsilon: f64,
    pub t_max_s: f64,
    pub dt_s: f64,
    pub prep: Prep,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub schedule: Option<PathBuf>,
    pub j_eff_hz: f64,
    pub reps: usize,
    pub run: SweepTarget,
    pub sweep_key: Option<String>,
    pub sweep_values: Vec<f64>,
    pub base: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            j_hz: 215.06,
            theta_rad: std::f64::consts::FRAC_PI_3,
            gamma_per_s: 0.0,
            epsilon: 1.0,
            t_max_s: 10e-3,
            dt_s: 250e-6,
            prep: Prep::Plus,
            csv: None,
            svg: None,
            trace: None,
            schedule: None,
            j_eff_hz: 30.0,
            reps: 10,
            run: SweepTarget::Witness,
            sweep_key: None,
            sweep_values: Vec::new(),
            base: None,
        }
    }
}

/// Optional values collected from the command line; `None` means "not given".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub j_hz: Option<f64>,
    pub theta_rad: Option<f64>,
    pub gamma_per_s: Option<f64>,
    pub epsilon: Option<f64>,
    pub t_max_s: Option<f64>,
    pub dt_s: Option<f64>,
    pub prep: Option<String>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub schedule: Option<PathBuf>,
    pub j_eff_hz: Option<f64>,
    pub reps: Option<usize>,
    pub run: Option<String>,
    pub sweep_key: Option<String>,
    pub sweep_values: Option<String>,
    pub base: Option<PathBuf>,
}

fn parse_prep(s: &str) -> Result<Prep> {
    match s {
        "plus" => Ok(Prep::Plus),
        "minus" => Ok(Prep::Minus),
        other => bail!("prep must be plus or minus, got {other}"),
    }
}

fn parse_values(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("bad sweep value {v}"))
        })
        .collect()
}

impl RunConfig {
    /// Apply one key=value pair from a config file.
    fn apply_pair(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "J_hz" => self.j_hz = value.parse().context("J_hz")?,
            "theta_rad" => self.theta_rad = value.parse().context("theta_rad")?,
            "gamma_per_s" => self.gamma_per_s = value.parse().context("gamma_per_s")?,
            "epsilon" => self.epsilon = value.parse().context("epsilon")?,
            "t_max_s" => self.t_max_s = value.parse().context("t_max_s")?,
            "dt_s" => self.dt_s = value.parse().context("dt_s")?,
            "prep" => self.prep = parse_prep(value)?,
            "csv" => self.csv = Some(PathBuf::from(value)),
            "svg" => self.svg = Some(PathBuf::from(value)),
            "trace" => self.trace = Some(PathBuf::from(value)),
            "schedule" => self.schedule = Some(PathBuf::from(value)),
            "J_eff_hz" => self.j_eff_hz = value.parse().context("J_eff_hz")?,
            "reps" => self.reps = value.parse().context("reps")?,
            "run" => self.run = SweepTarget::parse(value)?,
            "sweep_key" => self.sweep_key = Some(value.to_string()),
            "sweep_values" => self.sweep_values = parse_values(value)?,
            "base" => self.base = Some(PathBuf::from(value)),
            other => bail!("unknown config key {other}"),
        }
        Ok(())
    }

    /// Parse a flat key=value document. Blank lines and `#` comments are
    /// ignored.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key=value", lineno + 1))?;
            self.apply_pair(key.trim(), value.trim())
                .with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, ov: &Overrides) -> Result<()> {
        if let Some(v) = ov.j_hz {
            self.j_hz = v;
        }
        if let Some(v) = ov.theta_rad {
            self.theta_rad = v;
        }
        if let Some(v) = ov.gamma_per_s {
            self.gamma_per_s = v;
        }
        if let Some(v) = ov.epsilon {
            self.epsilon = v;
        }
        if let Some(v) = ov.t_max_s {
            self.t_max_s = v;
        }
        if let Some(v) = ov.dt_s {
            self.dt_s = v;
        }
        if let Some(v) = &ov.prep {
            self.prep = parse_prep(v)?;
        }
        if let Some(v) = &ov.csv {
            self.csv = Some(v.clone());
        }
        if let Some(v) = &ov.svg {
            self.svg = Some(v.clone());
        }
        if let Some(v) = &ov.trace {
            self.trace = Some(v.clone());
        }
        if let Some(v) = &ov.schedule {
            self.schedule = Some(v.clone());
        }
        if let Some(v) = ov.j_eff_hz {
            self.j_eff_hz = v;
        }
        if let Some(v) = ov.reps {
            self.reps = v;
        }
        if let Some(v) = &ov.run {
            self.run = SweepTarget::parse(v)?;
        }
        if let Some(v) = &ov.sweep_key {
            self.sweep_key = Some(v.clone());
        }
        if let Some(v) = &ov.sweep_values {
            self.sweep_values = parse_values(v)?;
        }
        if let Some(v) = &ov.base {
            self.base = Some(v.clone());
        }
        Ok(())
    }

    /// Validate the numeric fields shared by all commands.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("J_hz", self.j_hz),
            ("theta_rad", self.theta_rad),
            ("gamma_per_s", self.gamma_per_s),
            ("epsilon", self.epsilon),
            ("t_max_s", self.t_max_s),
            ("dt_s", self.dt_s),
            ("J_eff_hz", self.j_eff_hz),
        ] {
            if !v.is_finite() {
                bail!("{name} must be finite, got {v}");
            }
        }
        if self.dt_s <= 0.0 {
            bail!("dt_s must be > 0, got {}", self.dt_s);
        }
        if self.t_max_s < self.dt_s {
            bail!("t_max_s must be >= dt_s, got {} < {}", self.t_max_s, self.dt_s);
        }
        // Physical-parameter constraints mirror the model layer.
        self.model_params().map(|_| ())
    }

    pub fn model_params(&self) -> Result<ModelParams> {
        ModelParams::new(self.j_hz, self.theta_rad, self.gamma_per_s, self.epsilon)
            .map_err(|e| anyhow!("{e}"))
    }

    /// Re-root a relative output path when `QML_OUT_DIR` is set.
    pub fn resolve_out(path: &Path) -> PathBuf {
        if path.is_absolute() {
            return path.to_path_buf();
        }
        match std::env::var_os(OUT_DIR_VAR) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(path),
            _ => path.to_path_buf(),
        }
    }
}
