//! Fourier-multiplier evolution `ℱ[ρ(t)](ξ) = exp(tΦ(2πξ))ℱ[ρ(0)](ξ)` of the
//! limiting equations `∂_t ρ = 𝔏_δ ρ`, and the B → 0 / B → ∞ comparison with
//! the fractional heat equations of index 3/2 and 5/3.
//!
//! The line is replaced by the periodic box `[-L, L)`; the fractional
//! Laplacian has symbol `−|2πξ|^α`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy_calculus::{levy_exponent, limit_constants, JumpScale, LevyExponent, LevyMeasureSpec, Regime, TauMoment};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridProfile {
    pub half_width: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    /// `J^{λ,r}(u) = exp(−λ/(r² − u²))` on `(−r, r)`, zero elsewhere.
    Mollifier { lambda: f64, radius: f64 },
    /// `exp(−u²/(2σ²))`; not compactly supported.
    Gaussian { sigma: f64 },
}

impl ProfileKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ProfileKind::Mollifier { lambda, radius } if !(lambda > 0.0 && radius > 0.0) => Err(Error::InvalidParameter(
                format!("mollifier needs lambda > 0 and r > 0, got {lambda}, {radius}"),
            )),
            ProfileKind::Gaussian { sigma } if !(sigma > 0.0) => {
                Err(Error::InvalidParameter(format!("gaussian width must be > 0, got {sigma}")))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            ProfileKind::Mollifier { lambda, radius } => mollifier(lambda, radius, u),
            ProfileKind::Gaussian { sigma } => (-0.5 * (u / sigma).powi(2)).exp(),
        }
    }
}

pub fn mollifier(lambda: f64, radius: f64, u: f64) -> f64 {
    let d = radius * radius - u * u;
    if d <= 0.0 {
        0.0
    } else {
        (-lambda / d).exp()
    }
}

impl GridProfile {
    pub fn n_points(&self) -> usize {
        self.values.len()
    }

    pub fn du(&self) -> f64 {
        2.0 * self.half_width / self.n_points() as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let du = self.du();
        (0..self.n_points()).map(|j| -self.half_width + j as f64 * du).collect()
    }

    /// Frequencies ξ_m in cycles per unit length, in FFT order.
    pub fn frequencies(&self) -> Vec<f64> {
        frequencies(self.n_points(), self.half_width)
    }

    pub fn mass(&self) -> f64 {
        self.du() * self.values.iter().sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.du() * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// Value at `u` by linear interpolation between nodes.
    pub fn value_at(&self, u: f64) -> f64 {
        let x = (u + self.half_width) / self.du();
        let j = x.floor();
        let n = self.n_points() as isize;
        let j0 = (j as isize).rem_euclid(n) as usize;
        let j1 = (j as isize + 1).rem_euclid(n) as usize;
        let w = x - j;
        (1.0 - w) * self.values[j0] + w * self.values[j1]
    }

    /// Samples `ℱ[ρ](ξ_m) ≈ ∫ρ(u)e^{-2πiξ_m u}du` in FFT order.
    pub fn fourier(&self) -> Vec<Complex64> {
        let du = self.du();
        let mut buf = forward(&self.values);
        for (c, xi) in buf.iter_mut().zip(self.frequencies()) {
            *c *= Complex64::from_polar(du, 2.0 * PI * xi * self.half_width);
        }
        buf
    }
}

pub fn frequencies(n: usize, half_width: f64) -> Vec<f64> {
    let len = 2.0 * half_width;
    (0..n)
        .map(|m| {
            let mm = if m < n.div_ceil(2) { m as f64 } else { m as f64 - n as f64 };
            mm / len
        })
        .collect()
}

fn forward(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

fn inverse_real(mut buf: Vec<Complex64>) -> (Vec<f64>, f64) {
    let n = buf.len() as f64;
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    let max_imag = buf.iter().fold(0.0f64, |m, c| m.max(c.im.abs())) / n;
    (buf.iter().map(|c| c.re / n).collect(), max_imag)
}

fn check_grid(half_width: f64, n_points: usize) -> Result<()> {
    if !(half_width > 0.0) || !n_points.is_power_of_two() || n_points < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid needs L > 0 and a power-of-two point count, got L = {half_width}, n = {n_points}"
        )));
    }
    Ok(())
}

pub fn init_profile(kind: ProfileKind, half_width: f64, n_points: usize) -> Result<GridProfile> {
    kind.validate()?;
    check_grid(half_width, n_points)?;
    let du = 2.0 * half_width / n_points as f64;
    Ok(GridProfile {
        half_width,
        values: (0..n_points).map(|j| kind.eval(-half_width + j as f64 * du)).collect(),
    })
}

/// Values of Φ(2πξ_m) on a grid, computed once per half spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Multiplier {
    pub half_width: f64,
    pub phi: Vec<f64>,
}

impl Multiplier {
    pub fn new(exponent: &LevyExponent, half_width: f64, n_points: usize) -> Result<Self> {
        Self::from_fn(half_width, n_points, |theta| exponent.eval(theta))
    }

    /// `Φ(θ) = −coefficient·|θ|^α`.
    pub fn power_law(coefficient: f64, alpha: f64, half_width: f64, n_points: usize) -> Result<Self> {
        Self::from_fn(half_width, n_points, |theta| Ok(-coefficient * theta.abs().powf(alpha)))
    }

    /// Multiplier from an arbitrary symbol `θ ↦ Φ(θ)`.
    pub fn from_fn<F: FnMut(f64) -> Result<f64>>(half_width: f64, n_points: usize, mut f: F) -> Result<Self> {
        check_grid(half_width, n_points)?;
        let xi = frequencies(n_points, half_width);
        let mut phi = vec![0.0; n_points];
        for m in 0..=n_points / 2 {
            phi[m] = f(2.0 * PI * xi[m].abs())?;
        }
        for m in n_points / 2 + 1..n_points {
            phi[m] = phi[n_points - m];
        }
        Ok(Self { half_width, phi })
    }

    /// Same multiplier with time rescaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            half_width: self.half_width,
            phi: self.phi.iter().map(|p| p * factor).collect(),
        }
    }

    fn check(&self, profile: &GridProfile) -> Result<()> {
        if self.phi.len() != profile.n_points() || self.half_width != profile.half_width {
            return Err(Error::GridMismatch(format!(
                "multiplier grid (L = {}, n = {}) vs profile (L = {}, n = {})",
                self.half_width,
                self.phi.len(),
                profile.half_width,
                profile.n_points()
            )));
        }
        Ok(())
    }

    pub fn evolve(&self, profile: &GridProfile, t: f64) -> Result<GridProfile> {
        self.check(profile)?;
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
        }
        let mut buf = forward(&profile.values);
        for (c, p) in buf.iter_mut().zip(&self.phi) {
            *c *= (t * p).exp();
        }
        let (values, max_imag) = inverse_real(buf);
        debug_assert!(max_imag <= 1e-10 * values.iter().fold(1.0f64, |m, v| m.max(v.abs())));
        Ok(GridProfile {
            half_width: profile.half_width,
            values,
        })
    }
}

/// Evolves `profile` for time `t` under `∂_t ρ = 𝔏ρ` with symbol Φ.
pub fn evolve(profile: &GridProfile, exponent: &LevyExponent, t: f64) -> Result<GridProfile> {
    Multiplier::new(exponent, profile.half_width, profile.n_points())?.evolve(profile, t)
}

fn check_same_grid(a: &GridProfile, b: &GridProfile) -> Result<()> {
    if a.half_width != b.half_width || a.n_points() != b.n_points() {
        return Err(Error::GridMismatch(format!(
            "(L = {}, n = {}) vs (L = {}, n = {})",
            a.half_width,
            a.n_points(),
            b.half_width,
            b.n_points()
        )));
    }
    Ok(())
}

/// Discrete 𝕃² distance `(Δu Σ|a_j − b_j|²)^{1/2}`.
pub fn l2_distance(a: &GridProfile, b: &GridProfile) -> Result<f64> {
    check_same_grid(a, b)?;
    Ok((a.du() * a.values.iter().zip(&b.values).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()).sqrt())
}

/// The same distance computed from the DFTs (Parseval).
pub fn l2_distance_spectral(a: &GridProfile, b: &GridProfile) -> Result<f64> {
    check_same_grid(a, b)?;
    let diff: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
    let n = diff.len() as f64;
    Ok((a.du() / n * forward(&diff).iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt())
}

/// Discrete 𝕃¹ distance.
pub fn l1_distance(a: &GridProfile, b: &GridProfile) -> Result<f64> {
    check_same_grid(a, b)?;
    Ok(a.du() * a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitDirection {
    /// B → 0, compared with ρ_0 at the same time.
    Zero,
    /// B → ∞, ρ̃_B at time `B^{1/3}t` compared with ρ_∞ at time t.
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudyRow {
    #[serde(rename = "B")]
    pub b: f64,
    /// `∫_0^T ‖ρ̃_B − ρ_lim‖_{𝕃²} dt`.
    pub l2_distance: f64,
    /// `∫_0^T ‖ρ_lim‖_{𝕃²} dt`.
    pub l2_reference: f64,
    pub l2_relative: f64,
    pub l1_distance: f64,
    pub l1_reference: f64,
    pub l1_relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationStudy {
    pub direction: LimitDirection,
    pub gamma: f64,
    pub scale: JumpScale,
    pub t_grid: Vec<f64>,
    pub limit_coefficient: f64,
    pub limit_alpha: f64,
    pub rows: Vec<StudyRow>,
    /// Whether the 𝕃² distances decrease strictly along the sequence.
    pub monotone: bool,
}

fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2).zip(y.windows(2)).map(|(tt, yy)| 0.5 * (tt[1] - tt[0]) * (yy[0] + yy[1])).sum()
}

/// Compares the critical-scaling evolution ρ̃_B with the fractional heat
/// limits along a monotone sequence of fields. Decreasing sequences study
/// B → 0, increasing ones B → ∞.
pub fn interpolation_limit_study(
    b_sequence: &[f64],
    gamma: f64,
    profile: &GridProfile,
    t_grid: &[f64],
    scale: JumpScale,
) -> Result<InterpolationStudy> {
    if b_sequence.len() < 2 {
        return Err(Error::InvalidParameter("need at least two field values".into()));
    }
    let direction = if b_sequence.windows(2).all(|w| w[1] < w[0]) {
        LimitDirection::Zero
    } else if b_sequence.windows(2).all(|w| w[1] > w[0]) {
        LimitDirection::Infinity
    } else {
        return Err(Error::InvalidParameter("field sequence must be strictly monotone".into()));
    };
    if t_grid.len() < 2 || t_grid.windows(2).any(|w| w[1] <= w[0]) || t_grid[0] < 0.0 {
        return Err(Error::InvalidParameter("time grid must be increasing and nonnegative".into()));
    }
    let c = scale.value();
    let lc = limit_constants(gamma)?;
    // A measure scaled by c has exponent Φ(cθ).
    let (coef, alpha) = match direction {
        LimitDirection::Zero => (lc.phi_zero_coefficient * c.powf(1.5), 1.5),
        LimitDirection::Infinity => (lc.phi_infinity_coefficient * c.powf(5.0 / 3.0), 5.0 / 3.0),
    };
    let (l, n) = (profile.half_width, profile.n_points());
    let limit = Multiplier::power_law(coef, alpha, l, n)?;
    let f0 = forward(&profile.values);
    let du = profile.du();
    let nf = n as f64;
    // Parseval: ‖ρ‖² = (Δu/n) Σ|ρ̂|²; 𝕃¹ needs the physical profiles.
    let limit_profiles: Vec<GridProfile> = t_grid.iter().map(|&t| limit.evolve(profile, t)).collect::<Result<_>>()?;
    let ref_l2: Vec<f64> = limit_profiles.iter().map(|p| p.l2_norm()).collect();
    let ref_l1: Vec<f64> = limit_profiles.iter().map(|p| du * p.values.iter().map(|v| v.abs()).sum::<f64>()).collect();
    let mut rows = Vec::with_capacity(b_sequence.len());
    for &b in b_sequence {
        let spec = LevyMeasureSpec::new(Regime::DeltaEqHalf, b, gamma, scale, TauMoment::TailExponent)?;
        let mut mult = Multiplier::new(&levy_exponent(spec), l, n)?;
        if direction == LimitDirection::Infinity {
            mult = mult.scaled(b.cbrt());
        }
        let mut d2 = Vec::with_capacity(t_grid.len());
        let mut d1 = Vec::with_capacity(t_grid.len());
        for (&t, lim) in t_grid.iter().zip(&limit_profiles) {
            let s: f64 = f0
                .iter()
                .zip(mult.phi.iter().zip(&limit.phi))
                .map(|(f, (p, q))| f.norm_sqr() * ((t * p).exp() - (t * q).exp()).powi(2))
                .sum();
            d2.push((du / nf * s).sqrt());
            d1.push(l1_distance(&mult.evolve(profile, t)?, lim)?);
        }
        let (l2d, l2r) = (trapezoid(t_grid, &d2), trapezoid(t_grid, &ref_l2));
        let (l1d, l1r) = (trapezoid(t_grid, &d1), trapezoid(t_grid, &ref_l1));
        rows.push(StudyRow {
            b,
            l2_distance: l2d,
            l2_reference: l2r,
            l2_relative: l2d / l2r,
            l1_distance: l1d,
            l1_reference: l1r,
            l1_relative: l1d / l1r,
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].l2_distance < w[0].l2_distance);
    Ok(InterpolationStudy {
        direction,
        gamma,
        scale,
        t_grid: t_grid.to_vec(),
        limit_coefficient: coef,
        limit_alpha: alpha,
        rows,
        monotone,
    })
}
