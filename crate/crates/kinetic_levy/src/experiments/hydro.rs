use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentReport, ReportRow};
use super::ensemble::{ensemble_map, stream_base};
use crate::error::{Error, Result};
use crate::fractional_pde::{init_profile, Multiplier, ProfileKind};
use crate::kinetic_process::FlightSimulator;
use crate::numerics::gauss::gauss_legendre;
use crate::spectral::{Branch, ModeState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HydroOptions {
    /// Macroscopic position u.
    pub u: f64,
    /// Spatial profile of the initial condition.
    pub profile: ProfileKind,
    /// `φ_i(k) = ½(1 + a_i cos 2πk)`, so `∫φ_i dk = ½` and `Σ_i ∫φ_i = 1`.
    pub amplitudes: [f64; 2],
    /// Second start state for the independence check.
    pub second_start: (f64, u8),
    /// Gauss–Legendre node counts per branch for the discrepancy.
    pub k_nodes: Vec<usize>,
    /// Trajectories per node in the discrepancy.
    pub per_node: usize,
    /// Half-width and size of the grid solving the limit equation.
    pub pde_half_width: f64,
    pub pde_points: usize,
}

impl Default for HydroOptions {
    fn default() -> Self {
        Self {
            u: 0.0,
            profile: ProfileKind::Mollifier { lambda: 1.0, radius: 1.0 },
            amplitudes: [0.5, 0.25],
            second_start: (0.1, 2),
            k_nodes: vec![32, 64],
            per_node: 2000,
            pde_half_width: 64.0,
            pde_points: 1 << 14,
        }
    }
}

impl HydroOptions {
    fn phi(&self, x: ModeState) -> f64 {
        let a = self.amplitudes[(x.branch.index() - 1) as usize];
        0.5 * (1.0 + a * (2.0 * std::f64::consts::PI * x.k).cos())
    }

    /// Initial datum `f⁰(u, k, i) = J(u)·φ_i(k)`.
    pub fn initial(&self, u: f64, x: ModeState) -> f64 {
        self.profile.eval(u) * self.phi(x)
    }
}

/// Limit value `ρ(t, u)·∫φ_i dk = ½ρ(t, u)`, where ρ solves the fractional
/// equation started from the spatial profile.
pub fn hydro_reference(cfg: &ExperimentConfig, opts: &HydroOptions) -> Result<f64> {
    let exponent = cfg.exponent()?;
    let profile = init_profile(opts.profile, opts.pde_half_width, opts.pde_points)?;
    let mult = Multiplier::from_fn(opts.pde_half_width, opts.pde_points, |theta| cfg.phi(&exponent, theta))?;
    Ok(0.5 * mult.evolve(&profile, cfg.t)?.value_at(opts.u))
}

/// Samples of `f⁰_N(Z_{Nu}(N^α t), K, I)` for `count` trajectories from `x0`.
struct Sampler<'a> {
    cfg: &'a ExperimentConfig,
    opts: &'a HydroOptions,
    sim: FlightSimulator,
    horizon: f64,
    cap: u64,
    scale: f64,
}

impl Sampler<'_> {
    fn run(&self, ni: usize, local: u64, x0: ModeState, count: usize) -> Result<Vec<f64>> {
        ensemble_map(self.cfg.seed, stream_base(ni, local), count, |_, rng| {
            let a = self.sim.run_to_time(x0, self.horizon, self.cap, rng, None)?;
            Ok(self.opts.initial(self.opts.u - self.scale * a.displacement, a.state))
        })
        .into_iter()
        .collect()
    }
}

const DISCREPANCY_STREAMS: u64 = 16;

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Monte-Carlo `f_N(N^α t, Nu, k, i)` from two start states per N against
/// `½ρ(t, u)`, plus the k-averaged discrepancy at the largest N on each
/// Gauss–Legendre grid. Rows pass within `3σ + ε_N`.
pub fn hydro_limit_f(cfg: &ExperimentConfig, opts: &HydroOptions) -> Result<ExperimentReport> {
    cfg.validate()?;
    opts.profile.validate()?;
    if opts.amplitudes.iter().any(|a| !(a.abs() <= 1.0)) {
        return Err(Error::InvalidParameter("amplitudes must lie in [-1, 1]".into()));
    }
    let starts = [cfg.start()?, ModeState::new(opts.second_start.0, Branch::from_index(opts.second_start.1)?)?];
    let theory = hydro_reference(cfg, opts)?;
    let alpha = cfg.alpha();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (ni, &n) in cfg.n_list.iter().enumerate() {
        let horizon = n.powf(alpha) * cfg.t;
        let expected = 2.0 * cfg.gamma * horizon;
        let sampler = Sampler {
            cfg,
            opts,
            sim: FlightSimulator::new(cfg.b * n.powf(-cfg.delta), cfg.gamma, expected.max(1.0), &cfg.split)?,
            horizon,
            cap: cfg.jump_cap(expected),
            scale: cfg.flight_prefactor / n,
        };
        let mut est = Vec::new();
        for (s, &x0) in starts.iter().enumerate() {
            let (mean, se) = mean_se(&sampler.run(ni, 3 + s as u64, x0, cfg.ensemble)?);
            let radius = 3.0 * se + cfg.allowance;
            est.push((mean, se));
            rows.push(ReportRow {
                n,
                variant: format!("f(k={},i={})", x0.k, x0.branch.index()),
                x: opts.u,
                estimate: mean,
                estimate_im: 0.0,
                std_error: se,
                radius,
                theory,
                pass: (mean - theory).abs() <= radius,
            });
        }
        if ni + 1 < cfg.n_list.len() {
            continue;
        }
        let ((m0, s0), (m1, s1)) = (est[0], est[1]);
        checks.push(("start-state independence".into(), (m0 - m1).abs() <= 3.0 * (s0 + s1)));

        let mut discrepancies = Vec::new();
        for &nodes in &opts.k_nodes {
            let (x, w) = gauss_legendre(nodes);
            let mut total = 0.0;
            let mut noise = 0.0;
            for branch in Branch::BOTH {
                for (&xj, &wj) in x.iter().zip(&w) {
                    let k = 0.5 * xj;
                    // Common random numbers: every node and grid replays the same
                    // streams, so the Monte-Carlo error is shared and the grid
                    // comparison isolates the quadrature.
                    let (mean, se) = mean_se(&sampler.run(ni, DISCREPANCY_STREAMS, ModeState::new(k, branch)?, opts.per_node)?);
                    total += 0.5 * wj * (mean - theory).abs();
                    noise += 0.5 * wj * se;
                }
            }
            discrepancies.push(total);
            rows.push(ReportRow {
                n,
                variant: format!("discrepancy_{nodes}"),
                x: opts.u,
                estimate: total,
                estimate_im: 0.0,
                std_error: noise,
                radius: 3.0 * noise + cfg.allowance,
                theory: 0.0,
                pass: total <= 3.0 * noise + cfg.allowance,
            });
        }
        if let [d0, .., d1] = discrepancies[..] {
            checks.push(("k-grid refinement changes discrepancy by < 10%".into(), (d1 - d0).abs() <= 0.1 * d0.abs().max(d1.abs())));
        }
    }
    Ok(ExperimentReport {
        experiment: "hydro".into(),
        config: cfg.clone(),
        rows,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_profile_averages_to_half() {
        let opts = HydroOptions::default();
        let (x, w) = gauss_legendre(24);
        for branch in Branch::BOTH {
            let avg: f64 = x
                .iter()
                .zip(&w)
                .map(|(&xj, &wj)| 0.5 * wj * opts.phi(ModeState::new(0.5 * xj, branch).unwrap()))
                .sum();
            assert!((avg - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_time_reproduces_initial_datum() {
        let mut cfg = ExperimentConfig::new(1.0, 1.0, 0.75, vec![100.0], 0.0, 100, 1);
        cfg.start_k = 0.3;
        let opts = HydroOptions {
            u: 0.4,
            k_nodes: vec![4],
            per_node: 100,
            ..HydroOptions::default()
        };
        let rep = hydro_limit_f(&cfg, &opts).unwrap();
        let expected = opts.initial(0.4, cfg.start().unwrap());
        assert!((rep.rows[0].estimate - expected).abs() < 1e-14 * expected);
        assert!(rep.rows[0].std_error < 1e-15);
    }

    #[test]
    fn reference_at_zero_time_is_half_profile() {
        let mut cfg = ExperimentConfig::new(1.0, 1.0, 0.5, vec![100.0], 0.0, 100, 1);
        cfg.t = 0.0;
        let opts = HydroOptions {
            u: 0.25,
            pde_points: 1 << 12,
            ..HydroOptions::default()
        };
        let r = hydro_reference(&cfg, &opts).unwrap();
        assert!((r - 0.5 * opts.profile.eval(0.25)).abs() < 1e-12);
    }
}
