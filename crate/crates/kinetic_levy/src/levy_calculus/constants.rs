//! Closed-form constants of the limiting Lévy measures, plus quadrature
//! versions of the stable integrals `∫_0^∞ (1 − cos r) r^{-1-α} dr`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::Result;
use crate::numerics::{Estimate, Quadrature};

/// κ_0 = (1/(2¹⁰π²))^{1/2} = 1/(32π).
pub fn kappa_0() -> f64 {
    (1.0 / (1024.0 * PI * PI)).sqrt()
}

/// κ_∞ = (1/(2¹³·27·π³))^{1/3}.
pub fn kappa_infinity() -> f64 {
    (1.0 / (8192.0 * 27.0 * PI.powi(3))).cbrt()
}

/// Published δ > 1/2 tail constant, √π/(3·2^{7/2}).
pub fn kappa_1_published() -> f64 {
    PI.sqrt() / (3.0 * 2f64.powf(3.5))
}

/// Published δ < 1/2 tail constant, π^{2/3}/(2^{11/3}·3).
pub fn kappa_2_published() -> f64 {
    PI.powf(2.0 / 3.0) / (2f64.powf(11.0 / 3.0) * 3.0)
}

/// Limit of `N^{3/2}·π(Ψ > N r)·r^{3/2}γ^{3/2}` for δ > 1/2 when jumps are
/// measured with scale `c` (c = 1 reproduces the published κ_1; the model
/// itself has c = 4).
pub fn tail_constant_gt_half(c: f64) -> f64 {
    c.powf(1.5) * kappa_1_published()
}

/// Limit of `N^{α}·π(Ψ > N r)·r^{5/3}γ^{5/3}B^{1/3}` for δ < 1/2 with scale
/// `c`: the integrated B → ∞ density, `c^{5/3}(3/5)(π²/(2¹¹·27))^{1/3}`.
pub fn tail_constant_lt_half(c: f64) -> f64 {
    c.powf(5.0 / 3.0) * 0.6 * (PI * PI / (2048.0 * 27.0)).cbrt()
}

/// `∫_0^∞ (1 − cos r) r^{-1-α} dr = −Γ(−α) cos(πα/2)` for 0 < α < 2.
pub fn stable_integral(alpha: f64) -> f64 {
    -libm::tgamma(-alpha) * (PI * alpha / 2.0).cos()
}

/// `∫_S^∞ cos(r) r^{-β} dr` from the integration-by-parts series, together
/// with the magnitude of the first omitted term.
pub(crate) fn cos_power_tail(s: f64, beta: f64) -> (f64, f64) {
    let (sn, cs) = s.sin_cos();
    let mut value = 0.0;
    let mut coef = 1.0;
    let mut b = beta;
    // C_β = −sin S·S^{-β} + β cos S·S^{-β-1} + β(β+1) sin S·S^{-β-2} − …
    let pattern = [(-1.0, sn), (1.0, cs), (1.0, sn), (-1.0, cs)];
    for (j, (sign, trig)) in pattern.iter().cycle().take(8).enumerate() {
        value += sign * coef * trig * s.powf(-(beta + j as f64));
        coef *= b;
        b += 1.0;
    }
    (value, coef * s.powf(-(beta + 8.0)))
}

/// Quadrature of `∫_0^∞ (1 − cos r) r^{-1-α} dr`: body on `[0, S]`,
/// analytic power-law closure beyond `S`.
pub fn stable_integral_quadrature(alpha: f64) -> Result<Estimate> {
    let q = Quadrature::relative(1e-13).with_max_intervals(20000);
    let mut s = 2.0 * PI * 16.0;
    loop {
        let (osc, omitted) = cos_power_tail(s, 1.0 + alpha);
        let closure = s.powf(-alpha) / alpha - osc;
        let mut breaks = vec![0.0, 1.0];
        let mut x = 2.0 * PI;
        while x < s {
            breaks.push(x);
            x += 2.0 * PI;
        }
        breaks.push(s);
        breaks.dedup();
        let body = q.integrate_breaks(
            |r: f64| {
                let h = (0.5 * r).sin();
                2.0 * h * h * r.powf(-1.0 - alpha)
            },
            &breaks,
        )?;
        let total = body.value + closure;
        if omitted <= 1e-12 * total.abs() {
            return Ok(Estimate {
                value: total,
                error: body.error + omitted,
                intervals: body.intervals,
            });
        }
        s *= 2.0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitConstants {
    pub d_zero: f64,
    pub d_zero_error: f64,
    pub d_infinity: f64,
    pub d_infinity_error: f64,
    /// Γ(1+3/2)·γ^{-1/2}·D_0: coefficient of |θ|^{3/2} in −Φ_0.
    pub phi_zero_coefficient: f64,
    /// Γ(1+5/3)·γ^{-2/3}·D_∞: coefficient of |θ|^{5/3} in −Φ_∞ (B = 1).
    pub phi_infinity_coefficient: f64,
}

/// D_0 = 2κ_0∫(1−cos r)r^{-5/2}dr and D_∞ = 2κ_∞∫(1−cos r)r^{-8/3}dr, by quadrature.
pub fn limit_constants(gamma: f64) -> Result<LimitConstants> {
    let i0 = stable_integral_quadrature(1.5)?;
    let i1 = stable_integral_quadrature(5.0 / 3.0)?;
    let d_zero = 2.0 * kappa_0() * i0.value;
    let d_infinity = 2.0 * kappa_infinity() * i1.value;
    Ok(LimitConstants {
        d_zero,
        d_zero_error: 2.0 * kappa_0() * i0.error,
        d_infinity,
        d_infinity_error: 2.0 * kappa_infinity() * i1.error,
        phi_zero_coefficient: libm::tgamma(2.5) * gamma.powf(-0.5) * d_zero,
        phi_infinity_coefficient: libm::tgamma(8.0 / 3.0) * gamma.powf(-2.0 / 3.0) * d_infinity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_constants_arithmetic() {
        assert!((kappa_0() - 1.0 / (32.0 * PI)).abs() < 1e-16);
        assert!((kappa_0() - 0.0099472).abs() < 1e-7);
        assert!((kappa_infinity() - 2f64.powf(-13.0 / 3.0) / (3.0 * PI)).abs() < 1e-16);
        assert!((kappa_1_published() - 0.05222).abs() < 1e-5);
    }

    #[test]
    fn stable_integral_three_halves() {
        let exact = 2.0 / 3.0 * (2.0 * PI).sqrt();
        assert!((stable_integral(1.5) - exact).abs() < 1e-14);
        let q = stable_integral_quadrature(1.5).unwrap();
        assert!((q.value - exact).abs() < 1e-10, "{}", q.value - exact);
    }

    #[test]
    fn stable_integral_five_thirds() {
        let q = stable_integral_quadrature(5.0 / 3.0).unwrap();
        assert!((q.value / stable_integral(5.0 / 3.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn d_zero_identity() {
        let c = limit_constants(1.0).unwrap();
        assert!((c.d_zero - 2.0 * kappa_0() * 2.0 / 3.0 * (2.0 * PI).sqrt()).abs() < 1e-10);
        assert!((c.d_zero - 0.033_245_1).abs() < 1e-7);
        assert!(c.d_zero_error <= 1e-10 && c.d_infinity_error <= 1e-10);
    }
}
