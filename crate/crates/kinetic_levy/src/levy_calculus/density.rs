use std::f64::consts::PI;

use super::roots::{branch_weight, solve_x, RootBranch};
use crate::error::Result;
use crate::numerics::Quadrature;

/// Lévy density `g_{B,±}(r) = −(x′/4π)·w_±(x)·x²` at `x = x_{B,±}(|r|)`.
pub fn density_g(branch: RootBranch, b: f64, gamma: f64, r: f64) -> Result<f64> {
    let (x, dx) = solve_x(branch, b, gamma, r.abs())?;
    Ok(-dx / (4.0 * PI) * branch_weight(branch, b, x) * x * x)
}

/// `h_{B,±}(r) = (1/4π) ∫_0^{x(|r|)} w_±(y) y² dy`, by quadrature.
pub fn primitive_h(branch: RootBranch, b: f64, gamma: f64, r: f64) -> Result<f64> {
    let (x, _) = solve_x(branch, b, gamma, r.abs())?;
    let est = Quadrature::relative(1e-13).integrate(|y| branch_weight(branch, b, y) * y * y, 0.0, x)?;
    Ok(est.value / (4.0 * PI))
}

/// Closed form of [`primitive_h`]:
/// `(1/4π)[X³/6 ± (B/8)(X√(X²+b²) − b² asinh(X/b))]`, `b = B/2`.
pub fn primitive_h_closed_form(branch: RootBranch, b: f64, gamma: f64, r: f64) -> Result<f64> {
    let (x, _) = solve_x(branch, b, gamma, r.abs())?;
    let half = 0.5 * b;
    let corr = if half > 0.0 {
        (b / 8.0) * (x * (x * x + half * half).sqrt() - half * half * (x / half).asinh())
    } else {
        0.0
    };
    Ok((x * x * x / 6.0 + branch.sign() * corr) / (4.0 * PI))
}

/// B → 0 limit `g_0(r) = (π/(2¹¹γ³))^{1/2}|r|^{-5/2}`.
pub fn g_zero(gamma: f64, r: f64) -> f64 {
    (PI / (2048.0 * gamma.powi(3))).sqrt() * r.abs().powf(-2.5)
}

/// B → ∞ limit of `B^{1/3} g_{B,−}`: `(π²/(2¹¹·27·γ⁵))^{1/3}|r|^{-8/3}`.
pub fn g_infinity(gamma: f64, r: f64) -> f64 {
    (PI * PI / (2048.0 * 27.0 * gamma.powi(5))).cbrt() * r.abs().powf(-8.0 / 3.0)
}

/// B → 0 limit of `x_{B,±}(r)`.
pub fn x_zero_asymptote(gamma: f64, r: f64) -> f64 {
    r.signum() * (PI / (2.0 * gamma)).sqrt() * r.abs().powf(-0.5)
}

/// B → ∞ limit of `B·x_{B,+}(r)`.
pub fn bx_plus_asymptote(gamma: f64, r: f64) -> f64 {
    r.signum() * PI / (2.0 * gamma) / r.abs()
}

/// B → ∞ limit of `B^{-1/3}·x_{B,−}(r)`.
pub fn x_minus_asymptote(gamma: f64, r: f64) -> f64 {
    r.signum() * (PI / (2.0 * gamma)).cbrt() * r.abs().powf(-1.0 / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_and_positive() {
        for br in RootBranch::BOTH {
            for &b in &[0.0, 1.0, 30.0] {
                let g = density_g(br, b, 1.0, 0.7).unwrap();
                assert!(g > 0.0);
                assert_eq!(g, density_g(br, b, 1.0, -0.7).unwrap());
            }
        }
    }

    #[test]
    fn primitive_matches_closed_form_and_derivative() {
        for br in RootBranch::BOTH {
            for &b in &[0.0, 0.5, 3.0] {
                for &r in &[0.05, 1.0, 20.0] {
                    let h = primitive_h(br, b, 1.2, r).unwrap();
                    let hc = primitive_h_closed_form(br, b, 1.2, r).unwrap();
                    assert!((h / hc - 1.0).abs() < 1e-10, "{br:?} B={b} r={r}: {h} {hc}");
                    let eps = 1e-5 * r;
                    let fd = (primitive_h(br, b, 1.2, r - eps).unwrap() - primitive_h(br, b, 1.2, r + eps).unwrap()) / (2.0 * eps);
                    let g = density_g(br, b, 1.2, r).unwrap();
                    assert!((fd / g - 1.0).abs() < 1e-6, "{br:?} B={b} r={r}");
                }
            }
        }
    }

    #[test]
    fn h_vanishes_at_infinity() {
        assert!(primitive_h(RootBranch::Plus, 1.0, 1.0, 1e12).unwrap() < 1e-15);
    }
}
