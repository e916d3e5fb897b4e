//! Tails of the flight function Ψ under the invariant law π, exact (by
//! quadrature over the super-level set) and Monte-Carlo, and the scaled-tail
//! limits `N^{α_δ} π(Ψ_{B_N} > N r) → κ_δ(r)`.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetic_process::sample_pi;
use crate::levy_calculus::constants::{kappa_1_published, kappa_2_published, tail_constant_gt_half, tail_constant_lt_half};
use crate::levy_calculus::measure::{alpha_delta, Regime};
use crate::levy_calculus::{primitive_h_closed_form, RootBranch};
use crate::numerics::{bisect, linear_fit, Quadrature};
use crate::spectral::{mode_data, Branch, SpectralParams};

const MONOTONE_GRID: usize = 10_000;

fn psi(b: f64, gamma: f64, k: f64, i: Branch) -> f64 {
    let md = mode_data(b, gamma, k, i);
    md.velocity * md.lambda
}

/// Checks that Ψ(·, i) is strictly decreasing on a uniform grid of (0, 1/2).
pub fn check_flight_monotone(b: f64, gamma: f64) -> Result<()> {
    for i in Branch::BOTH {
        let mut prev = f64::INFINITY;
        for j in 1..MONOTONE_GRID {
            let k = 0.5 * j as f64 / MONOTONE_GRID as f64;
            let v = psi(b, gamma, k, i);
            if !(v < prev) {
                return Err(Error::Bracketing(format!(
                    "flight function of branch {} is not decreasing near k = {k} (B = {b})",
                    i.index()
                )));
            }
            prev = v;
        }
    }
    Ok(())
}

/// The `k* ∈ (0, 1/2)` with `Ψ(k*, i) = level > 0`, by bisection in `ln k`.
pub fn flight_boundary(b: f64, gamma: f64, i: Branch, level: f64) -> Result<f64> {
    if !(level > 0.0) {
        return Err(Error::InvalidParameter(format!("level must be > 0, got {level}")));
    }
    let target = level.ln();
    let u = bisect(|u| psi(b, gamma, u.exp(), i).ln() - target, -300.0, 0.5f64.ln(), 1e-15)?;
    Ok(u.exp())
}

fn positive_tail(b: f64, gamma: f64, level: f64) -> Result<f64> {
    let q = Quadrature::relative(1e-12);
    let mut total = 0.0;
    for i in Branch::BOTH {
        let kc = flight_boundary(b, gamma, i, level)?;
        total += q
            .integrate(|k| if k == 0.0 { 0.0 } else { mode_data(b, gamma, k, i).pi }, 0.0, kc)?
            .value;
    }
    Ok(total)
}

fn scale_n(params: &SpectralParams) -> f64 {
    params.scaling.map_or(1.0, |s| s.n)
}

/// `π(Ψ_{B_N} > N r)` by quadrature over the super-level set. For r < 0 the
/// oddness of Ψ gives `1 − π(Ψ > N|r|)`.
pub fn tail_exact(params: &SpectralParams, r: f64) -> Result<f64> {
    params.validate()?;
    if r == 0.0 || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("r must be finite and nonzero, got {r}")));
    }
    let (b, gamma) = (params.b_eff(), params.gamma);
    check_flight_monotone(b, gamma)?;
    let level = scale_n(params) * r.abs();
    let t = positive_tail(b, gamma, level)?;
    Ok(if r > 0.0 { t } else { 1.0 - t })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub p: f64,
    pub se: f64,
    pub lo: f64,
    pub hi: f64,
    pub n_samples: u64,
}

/// Fraction of π-draws with `Ψ > N r`, with a binomial 3σ interval.
pub fn tail_empirical<R: Rng + ?Sized>(params: &SpectralParams, r: f64, n_samples: u64, rng: &mut R) -> Result<TailEstimate> {
    params.validate()?;
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
    }
    let (b, gamma) = (params.b_eff(), params.gamma);
    let level = scale_n(params) * r;
    let mut hits = 0u64;
    for _ in 0..n_samples {
        let x = sample_pi(params, rng);
        if psi(b, gamma, x.k, x.branch) > level {
            hits += 1;
        }
    }
    let n = n_samples as f64;
    let p = hits as f64 / n;
    let se = (p * (1.0 - p) / n).sqrt();
    Ok(TailEstimate {
        p,
        se,
        lo: (p - 3.0 * se).max(0.0),
        hi: (p + 3.0 * se).min(1.0),
        n_samples,
    })
}

/// Which limiting tail function a report compares against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailTheory {
    /// The closed forms as published: κ_1 r^{-3/2}γ^{-3/2}, h_{B,−}(r) + h_{B,+}(r),
    /// γ^{-5/3}κ_2 B^{-1/3} r^{-5/3}.
    Published,
    /// The limit of the model with jumps measured in units `c`: the
    /// published shapes evaluated at `r/c`, with the δ < 1/2 constant taken
    /// from the integrated B → ∞ density. `c = 4` is the model's own limit.
    Scaled(f64),
}

impl TailTheory {
    pub fn label(&self) -> String {
        match self {
            TailTheory::Published => "published".into(),
            TailTheory::Scaled(c) => format!("scaled_c{c}"),
        }
    }
}

/// κ_δ(r) for r > 0.
pub fn tail_theory(theory: TailTheory, delta: f64, b: f64, gamma: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("r must be > 0, got {r}")));
    }
    let regime = Regime::from_delta(delta);
    let c = match theory {
        TailTheory::Published => 1.0,
        TailTheory::Scaled(c) => c,
    };
    Ok(match regime {
        Regime::DeltaGtHalf => {
            let k1 = match theory {
                TailTheory::Published => kappa_1_published(),
                TailTheory::Scaled(c) => tail_constant_gt_half(c),
            };
            k1 * (gamma * r).powf(-1.5)
        }
        Regime::DeltaEqHalf => {
            let rs = r / c;
            primitive_h_closed_form(RootBranch::Minus, b, gamma, rs)? + primitive_h_closed_form(RootBranch::Plus, b, gamma, rs)?
        }
        Regime::DeltaLtHalf => {
            let k2 = match theory {
                TailTheory::Published => kappa_2_published(),
                TailTheory::Scaled(c) => tail_constant_lt_half(c),
            };
            k2 * gamma.powf(-5.0 / 3.0) * b.powf(-1.0 / 3.0) * r.powf(-5.0 / 3.0)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRow {
    #[serde(rename = "N")]
    pub n: f64,
    pub r: f64,
    pub tail: f64,
    pub scaled: f64,
    pub theory: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    #[serde(rename = "B")]
    pub b: f64,
    pub gamma: f64,
    pub delta: f64,
    pub alpha: f64,
    pub theory: TailTheory,
    pub rows: Vec<TailRow>,
}

impl TailReport {
    pub fn rows_at_n(&self, n: f64) -> impl Iterator<Item = &TailRow> {
        self.rows.iter().filter(move |row| row.n == n)
    }

    /// Least-squares exponent α in `tail ∝ N^{-α}` at fixed r.
    pub fn fit_n_exponent(&self, r: f64) -> Result<f64> {
        let (x, y): (Vec<f64>, Vec<f64>) = self.rows.iter().filter(|row| row.r == r).map(|row| (row.n.ln(), row.tail.ln())).unzip();
        if x.len() < 2 {
            return Err(Error::InvalidParameter(format!("need two N values at r = {r}")));
        }
        Ok(-linear_fit(&x, &y).1)
    }

    /// Least-squares slope of `ln(scaled)` against `ln r` at fixed N.
    pub fn fit_r_slope(&self, n: f64) -> Result<f64> {
        let (x, y): (Vec<f64>, Vec<f64>) = self.rows_at_n(n).map(|row| (row.r.ln(), row.scaled.ln())).unzip();
        if x.len() < 2 {
            return Err(Error::InvalidParameter(format!("need two r values at N = {n}")));
        }
        Ok(linear_fit(&x, &y).1)
    }
}

/// Scaled tails `N^{α_δ} π(Ψ_{B N^{-δ}} > N r)` on an (N, r) grid.
pub fn scaled_tail_limit(
    b: f64,
    gamma: f64,
    delta: f64,
    r_grid: &[f64],
    n_sequence: &[f64],
    theory: TailTheory,
) -> Result<TailReport> {
    if n_sequence.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("N sequence must be increasing".into()));
    }
    let alpha = alpha_delta(delta);
    let mut rows = Vec::with_capacity(r_grid.len() * n_sequence.len());
    for &n in n_sequence {
        let params = SpectralParams::scaled(b, gamma, delta, n)?;
        for &r in r_grid {
            let tail = tail_exact(&params, r)?;
            let scaled = n.powf(alpha) * tail;
            let th = tail_theory(theory, delta, b, gamma, r)?;
            rows.push(TailRow {
                n,
                r,
                tail,
                scaled,
                theory: th,
                rel_err: (scaled - th).abs() / th,
            });
        }
    }
    Ok(TailReport {
        b,
        gamma,
        delta,
        alpha,
        theory,
        rows,
    })
}

/// `x = 2 sin(π k*) N^{1/2}` at the branch boundaries for δ = 1/2, the
/// variable in which the critical-scaling roots are written.
pub fn boundary_x(b: f64, gamma: f64, n: f64, r: f64) -> Result<[f64; 2]> {
    let params = SpectralParams::scaled(b, gamma, 0.5, n)?;
    let be = params.b_eff();
    let mut out = [0.0; 2];
    for (slot, i) in out.iter_mut().zip(Branch::BOTH) {
        let k = flight_boundary(be, gamma, i, n * r)?;
        *slot = 2.0 * (PI * k).sin() * n.sqrt();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_calculus::solve_x;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tail_bounds_symmetry_and_monotonicity() {
        let p = SpectralParams::scaled(1.0, 1.0, 0.75, 1e3).unwrap();
        let mut prev = 0.5;
        for r in [1e-6, 1e-3, 0.01, 0.1, 1.0, 10.0, 1e3] {
            let t = tail_exact(&p, r).unwrap();
            assert!((0.0..=0.5).contains(&t) && t <= prev);
            assert!((tail_exact(&p, -r).unwrap() - (1.0 - t)).abs() < 1e-15);
            prev = t;
        }
        assert!(tail_exact(&p, 1e12).unwrap() < 1e-20);
        assert!((tail_exact(&p, 1e-12).unwrap() - 0.5).abs() < 1e-6);
        assert!(tail_exact(&p, 0.0).is_err());
    }

    #[test]
    fn empirical_tail_matches_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (b, delta, r) in [(1.0, 0.75, 0.002), (1.0, 0.5, 0.001), (2.0, 0.25, 0.003)] {
            let p = SpectralParams::scaled(b, 1.0, delta, 100.0).unwrap();
            let exact = tail_exact(&p, r).unwrap();
            let est = tail_empirical(&p, r, 1_000_000, &mut rng).unwrap();
            assert!(est.lo <= exact && exact <= est.hi, "δ={delta}: {exact} not in [{}, {}]", est.lo, est.hi);
        }
    }

    #[test]
    fn boundary_matches_critical_roots() {
        let n = 1e10;
        for r in [0.3, 1.0, 3.0] {
            let x = boundary_x(1.0, 1.0, n, r).unwrap();
            let (xp, _) = solve_x(RootBranch::Plus, 1.0, 1.0, r / 4.0).unwrap();
            let (xm, _) = solve_x(RootBranch::Minus, 1.0, 1.0, r / 4.0).unwrap();
            assert!((x[0] / xp - 1.0).abs() < 1e-6, "{} {xp}", x[0]);
            assert!((x[1] / xm - 1.0).abs() < 1e-6, "{} {xm}", x[1]);
        }
    }

    #[test]
    fn three_halves_slope_in_r() {
        let rep = scaled_tail_limit(1.0, 1.0, 0.75, &[0.5, 1.0, 2.0], &[1e6], TailTheory::Scaled(4.0)).unwrap();
        assert!((rep.fit_r_slope(1e6).unwrap() + 1.5).abs() < 0.03);
        for row in &rep.rows {
            assert!(row.rel_err < 0.05, "{row:?}");
        }
    }

    #[test]
    fn published_constant_is_off_by_the_jump_scale() {
        let rep = scaled_tail_limit(1.0, 1.0, 0.75, &[1.0], &[1e6], TailTheory::Published).unwrap();
        let ratio = rep.rows[0].scaled / rep.rows[0].theory;
        assert!((ratio - 8.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn critical_scaling_converges_to_h_at_quarter_radius() {
        let rep = scaled_tail_limit(1.0, 1.0, 0.5, &[0.5, 1.0, 2.0], &[1e6], TailTheory::Scaled(4.0)).unwrap();
        for row in &rep.rows {
            assert!(row.rel_err < 0.03, "{row:?}");
        }
    }

    #[test]
    fn subcritical_exponent_in_n() {
        let rep = scaled_tail_limit(1.0, 1.0, 0.25, &[1.0], &[1e4, 1e5, 1e6], TailTheory::Scaled(4.0)).unwrap();
        let a = rep.fit_n_exponent(1.0).unwrap();
        assert!((a / ((5.0 - 0.25) / 3.0) - 1.0).abs() < 0.02, "{a}");
    }
}
