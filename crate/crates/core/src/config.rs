//! Flat `key = value` experiment configuration.
//!
//! Frequencies are ordinary frequencies in MHz and times are in μs, the units
//! the experiment is quoted in; [`ExperimentConfig::setup`] converts to rad/s
//! and seconds. Lines starting with `#` and blank lines are ignored. Lists are
//! comma separated.
//!
//! ```text
//! delta2_mhz = 45
//! shots = 7500
//! transition_t_ramps_us = 0.5, 1, 2
//! ```

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::chern::{coarse_delta2_grid, fine_delta2_grid, ExperimentSetup, ThetaPoints};
use crate::engine::DecoherenceParams;
use crate::error::{Error, Result};
use crate::model::ManifoldParams;
use crate::oracle::LatticeGrid;
use crate::scalar::us_to_s;
use crate::tomography::{PreparationModel, ShotModel};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub delta1_mhz: f64,
    pub omega1_mhz: f64,
    pub delta2_mhz: f64,
    pub t_ramp_us: f64,
    pub theta_points: ThetaPoints,
    /// `None`: automatic step control.
    pub n_steps: Option<usize>,
    pub t1_us: f64,
    pub t2_star_us: f64,
    pub dissipation: bool,
    pub fidelity: f64,
    /// `None`: exact expectation values.
    pub shots: Option<u64>,
    pub seed: u64,
    /// Δ₂/Δ₁ values of the transition sweep; the C₁ plateau averages use these.
    pub delta2_ratios: Vec<f64>,
    /// Extra Δ₂/Δ₁ values resolving the transition width.
    pub delta2_ratios_fine: Vec<f64>,
    /// Ramp times at which the transition sweep is repeated.
    pub transition_t_ramps_us: Vec<f64>,
    /// Ramp times of the ramp-rate sweep.
    pub ramp_t_ramps_us: Vec<f64>,
    /// Ramp times of the adiabatic-consistency report.
    pub oracle_t_ramps_us: Vec<f64>,
    /// Plaquettes per axis of the lattice Chern computation.
    pub lattice_size: usize,
    /// θ samples of the analytic curvature table.
    pub oracle_points: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            delta1_mhz: 30.0,
            omega1_mhz: 10.0,
            delta2_mhz: 0.3,
            t_ramp_us: 1.0,
            theta_points: ThetaPoints::Auto,
            n_steps: None,
            t1_us: 22.0,
            t2_star_us: 9.0,
            dissipation: true,
            fidelity: 0.988,
            shots: None,
            seed: 1,
            delta2_ratios: coarse_delta2_grid(),
            delta2_ratios_fine: fine_delta2_grid(),
            transition_t_ramps_us: vec![0.5, 1.0, 2.0],
            ramp_t_ramps_us: (1..=30).map(|k| k as f64 / 10.0).collect(),
            oracle_t_ramps_us: vec![0.25, 1.0, 4.0],
            lattice_size: 48,
            oracle_points: 101,
        }
    }
}

/// Every accepted key, in header order.
pub const KEYS: &[&str] = &[
    "delta1_mhz",
    "omega1_mhz",
    "delta2_mhz",
    "t_ramp_us",
    "theta_points",
    "n_steps",
    "t1_us",
    "t2_star_us",
    "dissipation",
    "fidelity",
    "shots",
    "seed",
    "delta2_ratios",
    "delta2_ratios_fine",
    "transition_t_ramps_us",
    "ramp_t_ramps_us",
    "oracle_t_ramps_us",
    "lattice_size",
    "oracle_points",
];

fn parse_num<V: FromStr>(key: &str, value: &str) -> Result<V> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

fn parse_auto(key: &str, value: &str) -> Result<Option<usize>> {
    if value.eq_ignore_ascii_case("auto") {
        Ok(None)
    } else {
        parse_num(key, value).map(Some)
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::config(
            key,
            format!("expected true or false, got `{value}`"),
        )),
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

impl ExperimentConfig {
    /// Defaults overridden by the lines of `text`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}", lineno + 1), "expected `key = value`"))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "delta1_mhz" => self.delta1_mhz = parse_num(key, value)?,
            "omega1_mhz" => self.omega1_mhz = parse_num(key, value)?,
            "delta2_mhz" => self.delta2_mhz = parse_num(key, value)?,
            "t_ramp_us" => self.t_ramp_us = parse_num(key, value)?,
            "theta_points" => {
                self.theta_points = match parse_auto(key, value)? {
                    None => ThetaPoints::Auto,
                    Some(n) => ThetaPoints::Fixed(n),
                }
            }
            "n_steps" => self.n_steps = parse_auto(key, value)?,
            "t1_us" => self.t1_us = parse_num(key, value)?,
            "t2_star_us" => self.t2_star_us = parse_num(key, value)?,
            "dissipation" => self.dissipation = parse_bool(key, value)?,
            "fidelity" => self.fidelity = parse_num(key, value)?,
            "shots" => {
                self.shots = if value.eq_ignore_ascii_case("exact") {
                    None
                } else {
                    Some(parse_num(key, value)?)
                }
            }
            "seed" => self.seed = parse_num(key, value)?,
            "delta2_ratios" => self.delta2_ratios = parse_list(key, value)?,
            "delta2_ratios_fine" => self.delta2_ratios_fine = parse_list(key, value)?,
            "transition_t_ramps_us" => self.transition_t_ramps_us = parse_list(key, value)?,
            "ramp_t_ramps_us" => self.ramp_t_ramps_us = parse_list(key, value)?,
            "oracle_t_ramps_us" => self.oracle_t_ramps_us = parse_list(key, value)?,
            "lattice_size" => self.lattice_size = parse_num(key, value)?,
            "oracle_points" => self.oracle_points = parse_num(key, value)?,
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Text form of one key, as accepted by [`set`](Self::set).
    pub fn get(&self, key: &str) -> Option<String> {
        let auto = |n: Option<usize>| n.map_or("auto".to_string(), |n| n.to_string());
        Some(match key {
            "delta1_mhz" => self.delta1_mhz.to_string(),
            "omega1_mhz" => self.omega1_mhz.to_string(),
            "delta2_mhz" => self.delta2_mhz.to_string(),
            "t_ramp_us" => self.t_ramp_us.to_string(),
            "theta_points" => match self.theta_points {
                ThetaPoints::Auto => "auto".to_string(),
                ThetaPoints::Fixed(n) => n.to_string(),
            },
            "n_steps" => auto(self.n_steps),
            "t1_us" => self.t1_us.to_string(),
            "t2_star_us" => self.t2_star_us.to_string(),
            "dissipation" => self.dissipation.to_string(),
            "fidelity" => self.fidelity.to_string(),
            "shots" => self.shots.map_or("exact".to_string(), |n| n.to_string()),
            "seed" => self.seed.to_string(),
            "delta2_ratios" => join(&self.delta2_ratios),
            "delta2_ratios_fine" => join(&self.delta2_ratios_fine),
            "transition_t_ramps_us" => join(&self.transition_t_ramps_us),
            "ramp_t_ramps_us" => join(&self.ramp_t_ramps_us),
            "oracle_t_ramps_us" => join(&self.oracle_t_ramps_us),
            "lattice_size" => self.lattice_size.to_string(),
            "oracle_points" => self.oracle_points.to_string(),
            _ => return None,
        })
    }

    /// `# key = value` lines for every key; parsing them back (without the
    /// `# `) reproduces this config.
    pub fn header(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            writeln!(out, "# {key} = {}", self.get(key).expect("listed key")).unwrap();
        }
        out
    }

    pub fn manifold(&self) -> Result<ManifoldParams<f64>> {
        ManifoldParams::from_mhz(self.delta1_mhz, self.omega1_mhz, self.delta2_mhz)
            .map_err(|e| Error::config("delta1_mhz/omega1_mhz/delta2_mhz", e.to_string()))
    }

    pub fn decoherence(&self) -> Result<DecoherenceParams<f64>> {
        if !self.dissipation {
            return Ok(DecoherenceParams::coherent());
        }
        DecoherenceParams::from_us(self.t1_us, self.t2_star_us)
            .map_err(|e| Error::config("t1_us/t2_star_us", e.to_string()))
    }

    pub fn preparation(&self) -> Result<PreparationModel<f64>> {
        PreparationModel::new(self.fidelity).map_err(|e| Error::config("fidelity", e.to_string()))
    }

    pub fn shot_model(&self) -> Result<Option<ShotModel>> {
        self.shots
            .map(|n| ShotModel::new(n, self.seed))
            .transpose()
            .map_err(|e| Error::config("shots", e.to_string()))
    }

    /// Single-ramp setup at `t_ramp_us`.
    pub fn setup_at(&self, t_ramp_us: f64) -> Result<ExperimentSetup<f64>> {
        if !(t_ramp_us > 0.0 && t_ramp_us.is_finite()) {
            return Err(Error::config("t_ramp_us", "must be positive"));
        }
        if let ThetaPoints::Fixed(n) = self.theta_points {
            if n < 3 {
                return Err(Error::config("theta_points", "need at least 3"));
            }
        }
        if self.n_steps == Some(0) {
            return Err(Error::config("n_steps", "must be at least 1"));
        }
        Ok(ExperimentSetup {
            params: self.manifold()?,
            t_ramp: us_to_s(t_ramp_us),
            theta_points: self.theta_points,
            n_steps: self.n_steps,
            decoherence: self.decoherence()?,
            preparation: self.preparation()?,
            shots: self.shot_model()?,
        })
    }

    pub fn setup(&self) -> Result<ExperimentSetup<f64>> {
        self.setup_at(self.t_ramp_us)
    }

    pub fn lattice(&self) -> Result<LatticeGrid> {
        LatticeGrid::square(self.lattice_size).map_err(|e| Error::config("lattice_size", e.to_string()))
    }

    /// Checks a sweep list: non-empty, finite, and positive if `positive`.
    pub fn sweep<'a>(&self, key: &'static str, values: &'a [f64], positive: bool) -> Result<&'a [f64]> {
        if values.is_empty() {
            return Err(Error::EmptySweep(key));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || (positive && **v <= 0.0)) {
            return Err(Error::config(key, format!("invalid value {v}")));
        }
        Ok(values)
    }
}
