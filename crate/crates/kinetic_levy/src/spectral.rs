//! Dispersion relations, scattering rates and derived jump-process data of
//! the magnetised chain, plus a finite-lattice eigenmode check.
//!
//! Every closed form has a quadrature twin (`*_quadrature`) used by tests.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Quadrature;

/// Field-scaling pair: the effective field is `B·N^{-δ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub delta: f64,
    pub n: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub b: f64,
    pub gamma: f64,
    pub scaling: Option<Scaling>,
}

impl SpectralParams {
    pub fn new(b: f64, gamma: f64) -> Result<Self> {
        let p = Self { b, gamma, scaling: None };
        p.validate()?;
        Ok(p)
    }

    pub fn scaled(b: f64, gamma: f64, delta: f64, n: f64) -> Result<Self> {
        let p = Self {
            b,
            gamma,
            scaling: Some(Scaling { delta, n }),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidParameter(format!("B must be >= 0, got {}", self.b)));
        }
        if let Some(s) = self.scaling {
            if !(s.n >= 1.0 && s.n.is_finite()) {
                return Err(Error::InvalidParameter(format!("N must be >= 1, got {}", s.n)));
            }
            if !(s.delta >= 0.0 && s.delta.is_finite()) {
                return Err(Error::InvalidParameter(format!("delta must be >= 0, got {}", s.delta)));
            }
        }
        Ok(())
    }

    /// Field actually felt by the chain: `B` or `B·N^{-δ}`.
    pub fn b_eff(&self) -> f64 {
        match self.scaling {
            Some(s) => self.b * s.n.powf(-s.delta),
            None => self.b,
        }
    }

    /// Same γ, unscaled field `b_eff()`.
    pub fn effective(&self) -> Self {
        Self {
            b: self.b_eff(),
            gamma: self.gamma,
            scaling: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    One,
    Two,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::One, Branch::Two];

    pub fn index(self) -> u8 {
        match self {
            Branch::One => 1,
            Branch::Two => 2,
        }
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Branch::One),
            2 => Ok(Branch::Two),
            _ => Err(Error::InvalidParameter(format!("branch must be 1 or 2, got {i}"))),
        }
    }
}

/// A phonon mode (k, i) with k ∈ [-1/2, 1/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    pub k: f64,
    pub branch: Branch,
}

impl ModeState {
    pub fn new(k: f64, branch: Branch) -> Result<Self> {
        if !(-0.5..0.5).contains(&k) {
            return Err(Error::InvalidParameter(format!("k must lie in [-1/2, 1/2), got {k}")));
        }
        Ok(Self { k, branch })
    }
}

/// Maps any real wave number onto the torus [-1/2, 1/2).
pub fn wrap_torus(k: f64) -> f64 {
    let w = k - k.round();
    if w >= 0.5 {
        w - 1.0
    } else {
        w
    }
}

pub fn alpha_hat(k: f64) -> f64 {
    let s = (PI * k).sin();
    4.0 * s * s
}

pub fn alpha_hat_prime(k: f64) -> f64 {
    4.0 * PI * (2.0 * PI * k).sin()
}

/// `(W, ω_1, ω_2)` with `W = √(α̂ + B²/4)`; ω_2 is formed without cancellation.
fn omegas(b: f64, k: f64) -> (f64, f64, f64) {
    let a = alpha_hat(k);
    let w = (a + 0.25 * b * b).sqrt();
    let w1 = w + 0.5 * b;
    let w2 = if w1 > 0.0 { a / w1 } else { 0.0 };
    (w, w1, w2)
}

pub fn omega(params: &SpectralParams, k: f64, i: Branch) -> f64 {
    let (_, w1, w2) = omegas(params.b_eff(), k);
    match i {
        Branch::One => w1,
        Branch::Two => w2,
    }
}

/// θ²_i at field `b`; callers guarantee (k, b) ≠ (0, 0).
#[inline]
pub(crate) fn theta_sq_raw(b: f64, k: f64, i: Branch) -> f64 {
    let (w, w1, w2) = omegas(b, k);
    match i {
        Branch::One => w1 / (2.0 * w),
        Branch::Two => w2 / (2.0 * w),
    }
}

pub fn theta_sq(params: &SpectralParams, k: f64, i: Branch) -> Result<f64> {
    let b = params.b_eff();
    if k == 0.0 && b == 0.0 {
        return Err(Error::Degenerate("theta undefined at k = 0 with B = 0".into()));
    }
    Ok(theta_sq_raw(b, k, i))
}

#[inline]
pub(crate) fn velocity_raw(b: f64, k: f64) -> f64 {
    if b == 0.0 {
        2.0 * PI * k.signum() * (PI * k).cos()
    } else {
        alpha_hat_prime(k) / (2.0 * (alpha_hat(k) + 0.25 * b * b).sqrt())
    }
}

/// Common group velocity of both branches.
pub fn group_velocity(params: &SpectralParams, k: f64) -> Result<f64> {
    let b = params.b_eff();
    if k == 0.0 && b == 0.0 {
        return Err(Error::Degenerate("group velocity undefined at k = 0 with B = 0".into()));
    }
    Ok(velocity_raw(b, k))
}

pub fn scattering_r(k: f64, k2: f64) -> f64 {
    let (s, s2) = ((PI * k).sin(), (PI * k2).sin());
    16.0 * s * s * s2 * s2
}

pub fn total_rate_r(k: f64) -> f64 {
    let s = (PI * k).sin();
    8.0 * s * s
}

pub fn r_bar() -> f64 {
    4.0
}

pub fn total_rate_r_quadrature(k: f64) -> Result<f64> {
    Ok(Quadrature::absolute(1e-13)
        .integrate(|k2| scattering_r(k, k2), -0.5, 0.5)?
        .value)
}

pub fn r_bar_quadrature() -> Result<f64> {
    Ok(Quadrature::absolute(1e-13).integrate(total_rate_r, -0.5, 0.5)?.value)
}

/// λ, Ψ and the π density at field `b`, with k ≠ 0 guaranteed by the caller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ModeData {
    pub lambda: f64,
    pub velocity: f64,
    pub pi: f64,
}

#[inline]
pub(crate) fn mode_data(b: f64, gamma: f64, k: f64, i: Branch) -> ModeData {
    let (s, c) = (PI * k).sin_cos();
    mode_data_sc(b, gamma, s, c, i)
}

/// [`mode_data`] from `s = sin(πk)`, `c = cos(πk)`, with a single square root.
#[inline]
pub(crate) fn mode_data_sc(b: f64, gamma: f64, s: f64, c: f64, i: Branch) -> ModeData {
    let s2 = s * s;
    let a = 4.0 * s2;
    let w = (a + 0.25 * b * b).sqrt();
    let w1 = w + 0.5 * b;
    let th = match i {
        Branch::One => w1 / (2.0 * w),
        Branch::Two => a / (2.0 * w * w1),
    };
    ModeData {
        lambda: 1.0 / (gamma * th * 8.0 * s2),
        velocity: 4.0 * PI * s * c / w,
        pi: 2.0 * th * s2,
    }
}

fn check_k(k: f64) -> Result<()> {
    if k == 0.0 {
        Err(Error::Singularity("lambda and psi diverge at k = 0".into()))
    } else {
        Ok(())
    }
}

/// Mean holding time λ_B(k, i) = [γ θ² R(k)]⁻¹.
pub fn lambda_holding(params: &SpectralParams, state: ModeState) -> Result<f64> {
    check_k(state.k)?;
    Ok(mode_data(params.b_eff(), params.gamma, state.k, state.branch).lambda)
}

/// Flight function Ψ = v·λ.
pub fn psi_flight(params: &SpectralParams, state: ModeState) -> Result<f64> {
    check_k(state.k)?;
    let d = mode_data(params.b_eff(), params.gamma, state.k, state.branch);
    Ok(d.velocity * d.lambda)
}

/// Density of π_B with respect to dk ⊗ counting measure.
pub fn pi_density(params: &SpectralParams, state: ModeState) -> f64 {
    if state.k == 0.0 {
        return 0.0;
    }
    mode_data(params.b_eff(), params.gamma, state.k, state.branch).pi
}

/// Σ_i ∫ π density dk by adaptive quadrature (should be 1).
pub fn pi_normalization_quadrature(params: &SpectralParams) -> Result<f64> {
    let q = Quadrature::absolute(1e-12);
    let mut total = 0.0;
    let b = params.b_eff();
    let scale = (b / 8.0).min(0.25);
    for i in Branch::BOTH {
        let f = |k: f64| pi_density(params, ModeState { k, branch: i });
        let mut pts = vec![-0.5, 0.0, 0.5];
        if scale > 0.0 && scale < 0.25 {
            pts = vec![-0.5, -scale, 0.0, scale, 0.5];
        }
        total += q.integrate_breaks(f, &pts)?.value;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenmodeCheck {
    pub k: f64,
    pub residual: f64,
    pub psi_norm: f64,
}

impl EigenmodeCheck {
    pub fn relative(&self) -> f64 {
        if self.psi_norm > 0.0 {
            self.residual / self.psi_norm
        } else {
            self.residual
        }
    }
}

/// Builds a random configuration of an `L`-site periodic chain, applies the
/// deterministic vector field `q̇ = p`, `ṗ = Δ_d q + Bσp` in real space,
/// Fourier-transforms at `k = m/L`, and returns `|dψ̂_i/dt + iω_i ψ̂_i|`.
pub fn verify_eigenmode(params: &SpectralParams, l: usize, m: usize, i: Branch, seed: u64) -> Result<EigenmodeCheck> {
    if l < 2 || m >= l {
        return Err(Error::InvalidParameter(format!("need L >= 2 and 0 <= m < L, got L={l}, m={m}")));
    }
    let k = wrap_torus(m as f64 / l as f64);
    let b = params.b_eff();
    let th2 = theta_sq(params, k, i)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = vec![[0.0f64; 2]; l];
    let mut p = vec![[0.0f64; 2]; l];
    for x in 0..l {
        for c in 0..2 {
            q[x][c] = rng.random_range(-1.0..1.0);
            p[x][c] = rng.random_range(-1.0..1.0);
        }
    }
    let mut qd = vec![[0.0f64; 2]; l];
    let mut pd = vec![[0.0f64; 2]; l];
    for x in 0..l {
        let (xl, xr) = ((x + l - 1) % l, (x + 1) % l);
        for c in 0..2 {
            qd[x][c] = p[x][c];
            pd[x][c] = q[xl][c] + q[xr][c] - 2.0 * q[x][c];
        }
        // σ = [[0, 1], [-1, 0]]
        pd[x][0] += b * p[x][1];
        pd[x][1] -= b * p[x][0];
    }
    let dft = |v: &[[f64; 2]], c: usize| -> Complex64 {
        v.iter()
            .enumerate()
            .map(|(x, e)| e[c] * Complex64::from_polar(1.0, -2.0 * PI * k * x as f64))
            .sum()
    };
    let (_, w1, w2) = omegas(b, k);
    let th = th2.sqrt();
    let ii = Complex64::i();
    let mode = |q1: Complex64, q2: Complex64, p1: Complex64, p2: Complex64| -> Complex64 {
        match i {
            Branch::One => th * (p1 - ii * w2 * q1 + ii * p2 + w2 * q2),
            Branch::Two => th * (p1 - ii * w1 * q1 - ii * p2 - w1 * q2),
        }
    };
    let psi = mode(dft(&q, 0), dft(&q, 1), dft(&p, 0), dft(&p, 1));
    let dpsi = mode(dft(&qd, 0), dft(&qd, 1), dft(&pd, 0), dft(&pd, 1));
    let om = match i {
        Branch::One => w1,
        Branch::Two => w2,
    };
    Ok(EigenmodeCheck {
        k,
        residual: (dpsi + ii * om * psi).norm(),
        psi_norm: psi.norm(),
    })
}
