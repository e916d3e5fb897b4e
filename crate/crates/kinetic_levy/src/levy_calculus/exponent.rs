//! Lévy exponents Φ_δ(θ) = 2∫_0^∞ (cos θs − 1) ν_δ(s) ds.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::constants::{cos_power_tail, stable_integral};
use super::measure::{LevyMeasureSpec, Regime};
use crate::error::Result;
use crate::numerics::{Estimate, Quadrature};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevyExponent {
    pub spec: LevyMeasureSpec,
    /// `c_δ` in `Φ(θ) = −c_δ|θ|^α` when ν is a pure power law.
    pub closed_form_coefficient: Option<f64>,
}

/// One CSV row of an exponent table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentRow {
    pub theta: f64,
    pub phi: f64,
    pub regime: &'static str,
    #[serde(rename = "B")]
    pub b: f64,
    pub gamma: f64,
}

pub fn levy_exponent(spec: LevyMeasureSpec) -> LevyExponent {
    let closed_form_coefficient = spec
        .power_law_prefactor()
        .map(|cc| 2.0 * cc * stable_integral(spec.alpha_tail()));
    LevyExponent {
        spec,
        closed_form_coefficient,
    }
}

impl LevyExponent {
    pub fn regime(&self) -> Regime {
        self.spec.regime
    }

    /// Φ(θ). Closed form for power-law measures; for δ = 1/2 the τ-average is
    /// done analytically, `E[cos(aτ) − 1] = −a²/(1+a²)`, leaving
    /// `Φ(θ) = −(γ/π) Σ_± ∫ w_± x² q/(1+q) dx`, `q = (θ c r_±(x)/2π)²`.
    pub fn eval(&self, theta: f64) -> Result<f64> {
        if theta == 0.0 {
            return Ok(0.0);
        }
        if let Some(cd) = self.closed_form_coefficient {
            return Ok(-cd * theta.abs().powf(self.spec.alpha_tail()));
        }
        let a = theta.abs() * self.spec.c() / (2.0 * PI);
        // r ≈ 1/a is where q/(1+q) turns over.
        let s_ref = self.spec.c() / (2.0 * PI * a) * 1.0;
        let est = self.spec.x_integral(
            |_, r| {
                let q = (a * r) * (a * r);
                q / (1.0 + q)
            },
            s_ref,
            &Quadrature::relative(1e-12),
        )?;
        Ok(-self.spec.gamma / PI * est.value)
    }

    /// Φ(θ) by direct quadrature of `2∫_0^∞(cos θs − 1)ν(s)ds`: body on
    /// `[0, S]` (S a whole number of periods), exact tail mass ν((S,∞)), and
    /// integration by parts for `∫_S^∞ cos(θs)ν(s)ds`.
    pub fn eval_quadrature(&self, theta: f64) -> Result<Estimate> {
        if theta == 0.0 {
            return Ok(Estimate {
                value: 0.0,
                error: 0.0,
                intervals: 0,
            });
        }
        let th = theta.abs();
        let period = 2.0 * PI / th;
        let periods = 48usize;
        let s_max = period * periods as f64;
        let q = Quadrature::relative(1e-12).with_max_intervals(40000);
        let mut breaks = vec![0.0];
        // resolve the near-origin singularity separately from the oscillations
        for j in (1..=6).rev() {
            breaks.push(period * 10f64.powi(-j));
        }
        for j in 1..=periods {
            breaks.push(period * j as f64);
        }
        let spec = self.spec;
        let body = q.integrate_breaks(
            |s: f64| {
                if s <= 0.0 {
                    return 0.0;
                }
                let h = (0.5 * th * s).sin();
                2.0 * h * h * spec.density(s).unwrap_or(f64::NAN)
            },
            &breaks,
        )?;
        let tail_mass = spec.tail(s_max)?;
        let (osc, omitted) = match spec.power_law_prefactor() {
            Some(cc) => {
                // ∫_S^∞ cos(θs) C s^{-β} ds = C θ^{β-1} ∫_{θS}^∞ cos(u) u^{-β} du
                let beta = 1.0 + spec.alpha_tail();
                let (v, o) = cos_power_tail(th * s_max, beta);
                (cc * th.powf(beta - 1.0) * v, cc * th.powf(beta - 1.0) * o)
            }
            None => {
                // two integration-by-parts terms; cos(θS) = 1, sin(θS) = 0
                let d1 = spec.density_derivative(s_max)?;
                let v = -d1 / (th * th);
                (v, v.abs() * (3.0 / (th * s_max)))
            }
        };
        let value = -2.0 * (body.value + tail_mass - osc);
        Ok(Estimate {
            value,
            error: 2.0 * (body.error + omitted),
            intervals: body.intervals,
        })
    }

    pub fn table(&self, thetas: &[f64]) -> Result<Vec<ExponentRow>> {
        thetas
            .iter()
            .map(|&theta| {
                Ok(ExponentRow {
                    theta,
                    phi: self.eval(theta)?,
                    regime: self.spec.regime.label(),
                    b: self.spec.b,
                    gamma: self.spec.gamma,
                })
            })
            .collect()
    }
}

/// Applies the generator 𝔏_δ to Fourier samples: `ℱ[𝔏ρ](ξ) = Φ(2πξ)ℱ[ρ](ξ)`
/// with `ℱ[f](ξ) = ∫ f(u) e^{-2πiξu} du`, i.e. the fractional Laplacian has
/// symbol `−|2πξ|^α`.
pub fn interpolation_generator_apply(exponent: &LevyExponent, freqs: &[f64], values: &[Complex64]) -> Result<Vec<Complex64>> {
    freqs
        .iter()
        .zip(values)
        .map(|(&xi, &v)| {
            if v == Complex64::new(0.0, 0.0) {
                return Ok(v);
            }
            Ok(v * exponent.eval(2.0 * PI * xi)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_calculus::constants::{kappa_0, kappa_infinity};
    use crate::levy_calculus::measure::{JumpScale, TauMoment};

    fn exp(regime: Regime, b: f64, scale: JumpScale) -> LevyExponent {
        levy_exponent(LevyMeasureSpec::new(regime, b, 1.0, scale, TauMoment::TailExponent).unwrap())
    }

    #[test]
    fn basic_properties() {
        for regime in [Regime::DeltaGtHalf, Regime::DeltaEqHalf, Regime::DeltaLtHalf] {
            let e = exp(regime, 1.0, JumpScale::Model);
            assert_eq!(e.eval(0.0).unwrap(), 0.0);
            for th in [0.3, 2.0] {
                let v = e.eval(th).unwrap();
                assert!(v < 0.0);
                assert_eq!(v, e.eval(-th).unwrap());
            }
        }
        let e = exp(Regime::DeltaGtHalf, 1.0, JumpScale::Model);
        assert!((e.eval(2.0).unwrap() / e.eval(1.0).unwrap() - 2f64.powf(1.5)).abs() < 1e-14);
    }

    #[test]
    fn literal_closed_form_uses_d_zero() {
        let e = exp(Regime::DeltaGtHalf, 1.0, JumpScale::Literal);
        let d0 = 2.0 * kappa_0() * 2.0 / 3.0 * (2.0 * PI).sqrt();
        let expect = -libm::tgamma(2.5) * d0;
        assert!((e.eval(1.0).unwrap() / expect - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quadrature_route_matches_closed_form() {
        for regime in [Regime::DeltaGtHalf, Regime::DeltaLtHalf] {
            let e = exp(regime, 1.0, JumpScale::Model);
            for th in [0.01, 1.0, 100.0] {
                let q = e.eval_quadrature(th).unwrap().value;
                let c = e.eval(th).unwrap();
                assert!((q / c - 1.0).abs() < 1e-8, "{regime:?} θ={th}: {q} {c}");
            }
        }
    }

    #[test]
    fn quadrature_route_matches_x_representation_at_critical_scaling() {
        let e = exp(Regime::DeltaEqHalf, 1.0, JumpScale::Model);
        for th in [0.5, 1.0, 2.0] {
            let q = e.eval_quadrature(th).unwrap().value;
            let c = e.eval(th).unwrap();
            assert!((q / c - 1.0).abs() < 1e-6, "θ={th}: {q} {c}");
        }
    }

    #[test]
    fn critical_exponent_interpolates_between_the_power_laws() {
        let small = exp(Regime::DeltaEqHalf, 1e-4, JumpScale::Literal);
        let zero = exp(Regime::DeltaGtHalf, 1.0, JumpScale::Literal);
        let large = exp(Regime::DeltaEqHalf, 1e4, JumpScale::Literal);
        let inf_coef = libm::tgamma(8.0 / 3.0) * 2.0 * kappa_infinity() * stable_integral(5.0 / 3.0);
        for th in [0.5, 1.0, 2.0] {
            let r0 = small.eval(th).unwrap() / zero.eval(th).unwrap();
            assert!((r0 - 1.0).abs() < 1e-3, "{r0}");
            let rinf = large.eval(th).unwrap() * 1e4f64.cbrt() / (-inf_coef * th.powf(5.0 / 3.0));
            assert!((rinf - 1.0).abs() < 1e-3, "{rinf}");
        }
    }

    #[test]
    fn generator_on_pure_mode() {
        let e = exp(Regime::DeltaGtHalf, 1.0, JumpScale::Literal);
        let out = interpolation_generator_apply(&e, &[0.0, 0.25], &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)]).unwrap();
        assert_eq!(out[0], Complex64::new(0.0, 0.0));
        let expect = e.closed_form_coefficient.unwrap() * (2.0 * PI * 0.25f64).powf(1.5);
        assert!((out[1].im + 2.0 * expect).abs() < 1e-14);
    }
}
