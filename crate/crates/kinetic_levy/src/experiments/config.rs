use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetic_process::{SplitConfig, FLIGHT_PREFACTOR};
use crate::levy_calculus::measure::alpha_delta;
use crate::levy_calculus::{levy_exponent, JumpScale, LevyExponent, LevyMeasureSpec, Regime, TauMoment};
use crate::spectral::{Branch, ModeState};

/// Parameters shared by the Monte-Carlo experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(rename = "B")]
    pub b: f64,
    pub gamma: f64,
    pub delta: f64,
    #[serde(rename = "N")]
    pub n_list: Vec<f64>,
    /// Macroscopic time horizon t.
    pub t: f64,
    /// Ensemble size M.
    pub ensemble: usize,
    pub seed: u64,
    #[serde(default = "defaults::start_k")]
    pub start_k: f64,
    #[serde(default = "defaults::start_branch")]
    pub start_branch: u8,
    /// Finite-size allowance ε_N added to every statistical interval.
    #[serde(default = "defaults::allowance")]
    pub allowance: f64,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default = "defaults::jump_scale")]
    pub jump_scale: JumpScale,
    #[serde(default = "defaults::flight_prefactor")]
    pub flight_prefactor: f64,
}

mod defaults {
    use super::*;

    pub fn start_k() -> f64 {
        0.3
    }
    pub fn start_branch() -> u8 {
        1
    }
    pub fn allowance() -> f64 {
        0.02
    }
    pub fn jump_scale() -> JumpScale {
        JumpScale::Model
    }
    pub fn flight_prefactor() -> f64 {
        FLIGHT_PREFACTOR
    }
}

impl ExperimentConfig {
    /// Standard settings for the given physical parameters: start (0.3, 1),
    /// ε_N = 0.02, model jump scale, prefactor 1/(2π).
    pub fn new(b: f64, gamma: f64, delta: f64, n_list: Vec<f64>, t: f64, ensemble: usize, seed: u64) -> Self {
        Self {
            b,
            gamma,
            delta,
            n_list,
            t,
            ensemble,
            seed,
            start_k: defaults::start_k(),
            start_branch: defaults::start_branch(),
            allowance: defaults::allowance(),
            split: SplitConfig::default(),
            jump_scale: defaults::jump_scale(),
            flight_prefactor: defaults::flight_prefactor(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.gamma > 0.0) || !(self.b >= 0.0) || !(self.delta >= 0.0) {
            return bad(format!("need gamma > 0, B >= 0, delta >= 0; got {}, {}, {}", self.gamma, self.b, self.delta));
        }
        if self.ensemble < 100 {
            return bad(format!("ensemble size must be >= 100, got {}", self.ensemble));
        }
        if self.n_list.is_empty() || self.n_list.iter().any(|&n| !(n >= 10.0 && n.is_finite())) {
            return bad("every N must be finite and >= 10".into());
        }
        if self.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return bad("N list must be sorted increasing".into());
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return bad(format!("t must be >= 0, got {}", self.t));
        }
        if !(self.allowance >= 0.0) || !(self.flight_prefactor > 0.0) {
            return bad("allowance must be >= 0 and the flight prefactor > 0".into());
        }
        self.start()?;
        if self.regime() != Regime::DeltaGtHalf && !(self.b > 0.0) {
            return bad("B must be > 0 for delta <= 1/2".into());
        }
        Ok(())
    }

    pub fn start(&self) -> Result<ModeState> {
        let x = ModeState::new(self.start_k, Branch::from_index(self.start_branch)?)?;
        if x.k == 0.0 {
            return Err(Error::InvalidParameter("start state needs k != 0".into()));
        }
        Ok(x)
    }

    pub fn regime(&self) -> Regime {
        Regime::from_delta(self.delta)
    }

    pub fn alpha(&self) -> f64 {
        alpha_delta(self.delta)
    }

    /// Φ_δ for the configured regime and jump scale.
    pub fn exponent(&self) -> Result<LevyExponent> {
        Ok(levy_exponent(LevyMeasureSpec::new(
            self.regime(),
            self.b,
            self.gamma,
            self.jump_scale,
            TauMoment::TailExponent,
        )?))
    }

    /// Φ at the wave number seen by the simulated displacement: changing the
    /// prefactor rescales every jump by `2π·prefactor`.
    pub fn phi(&self, exponent: &LevyExponent, theta: f64) -> Result<f64> {
        exponent.eval(theta * self.flight_prefactor / FLIGHT_PREFACTOR)
    }

    /// Jump cap: 16 times the expected count plus 6σ of a Poisson count.
    pub fn jump_cap(&self, expected: f64) -> u64 {
        let e = expected.ceil();
        (16.0 * e + 6.0 * e.sqrt()).ceil() as u64
    }
}

/// One estimate with its interval and the theory value it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    #[serde(rename = "N")]
    pub n: f64,
    /// Which quantity: "Z", "Y", "exceedance", "mean_S", "f", "discrepancy", ...
    pub variant: String,
    /// Abscissa (θ, u, k, …) or NaN.
    pub x: f64,
    pub estimate: f64,
    pub estimate_im: f64,
    pub std_error: f64,
    /// Half-width of the acceptance interval around the estimate.
    pub radius: f64,
    pub theory: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    /// Experiment-level checks beyond single rows, with their outcomes.
    pub checks: Vec<(String, bool)>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass) && self.checks.iter().all(|(_, ok)| *ok)
    }
}
