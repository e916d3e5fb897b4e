use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bisect_newton, RootOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootBranch {
    Plus,
    Minus,
}

impl RootBranch {
    pub const BOTH: [RootBranch; 2] = [RootBranch::Plus, RootBranch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            RootBranch::Plus => 1.0,
            RootBranch::Minus => -1.0,
        }
    }
}

/// `(2√(x²+B²/4) ± B)` for x ≥ 0, without cancellation on the minus branch.
#[inline]
pub(crate) fn bracket_factor(branch: RootBranch, b: f64, x: f64) -> f64 {
    let w2 = 2.0 * (x * x + 0.25 * b * b).sqrt();
    match branch {
        RootBranch::Plus => w2 + b,
        RootBranch::Minus => {
            let den = w2 + b;
            if den > 0.0 {
                4.0 * x * x / den
            } else {
                0.0
            }
        }
    }
}

/// Branch weight `w_±(x) = 1/2 ± B/(4√(x²+B²/4))`.
#[inline]
pub(crate) fn branch_weight(branch: RootBranch, b: f64, x: f64) -> f64 {
    let w = (x * x + 0.25 * b * b).sqrt();
    match branch {
        RootBranch::Plus => 0.5 + b / (4.0 * w),
        RootBranch::Minus => {
            // (2W − B)/(4W) = x² / (W (2W + B))
            x * x / (w * (2.0 * w + b))
        }
    }
}

/// Explicit inverse `r_±(x)` of the root map, for x > 0.
#[inline]
pub(crate) fn r_of_x(branch: RootBranch, b: f64, gamma: f64, x: f64) -> f64 {
    PI / (gamma * x * bracket_factor(branch, b, x))
}

/// Left-hand side `F(x) = (2√(x²+B²/4) ± B)·x` and its derivative.
#[inline]
fn lhs(branch: RootBranch, b: f64, x: f64) -> (f64, f64) {
    let w = (x * x + 0.25 * b * b).sqrt();
    let fac = bracket_factor(branch, b, x);
    let d = if w > 0.0 { fac + 2.0 * x * x / w } else { fac };
    (fac * x, d)
}

/// Defining-relation residual `|F(x) − π/(γr)|` relative to `π/(γ|r|)`.
pub fn root_residual(branch: RootBranch, b: f64, gamma: f64, r: f64, x: f64) -> f64 {
    let target = PI / (gamma * r.abs());
    let (f, _) = lhs(branch, b, x.abs());
    (f - target).abs() / target
}

/// Solves `(2√(x²+B²/4) ± B)·x = π/(γr)` for `x_{B,±}(r)` and returns
/// `(x, x′)` with `x′` from implicit differentiation.
pub fn solve_x(branch: RootBranch, b: f64, gamma: f64, r: f64) -> Result<(f64, f64)> {
    if r == 0.0 || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("r must be finite and nonzero, got {r}")));
    }
    if !(b >= 0.0) || !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("need B >= 0 and gamma > 0 (B={b}, gamma={gamma})")));
    }
    let ra = r.abs();
    let target = PI / (gamma * ra);
    let mut hi = match branch {
        RootBranch::Plus => (PI / (2.0 * gamma * ra)).sqrt(),
        RootBranch::Minus => (PI / (gamma * ra)).sqrt().max((PI * b / (gamma * ra)).cbrt()),
    };
    // The bounds above are proven; the loop only guards against rounding.
    let mut guard = 0;
    while lhs(branch, b, hi).0 < target {
        hi *= 2.0;
        guard += 1;
        if guard > 64 {
            return Err(Error::NonConvergence(format!("no bracket for r={r}")));
        }
    }
    let x = bisect_newton(
        |x| {
            let (f, d) = lhs(branch, b, x);
            (f - target, d)
        },
        0.0,
        hi,
        RootOptions::default(),
    )?;
    let (_, d) = lhs(branch, b, x);
    let dx = -target / (ra * d);
    Ok((x * r.signum(), dx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_root() {
        for br in RootBranch::BOTH {
            let (x, _) = solve_x(br, 0.0, 1.0, 1.0).unwrap();
            assert!((x - (PI / 2.0).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn unit_field_roots() {
        let (xp, _) = solve_x(RootBranch::Plus, 1.0, 1.0, 1.0).unwrap();
        let (xm, _) = solve_x(RootBranch::Minus, 1.0, 1.0, 1.0).unwrap();
        assert!((xp - 0.981_058_197_856).abs() < 1e-10, "{xp}");
        assert!((xm - 1.479_501_968_233).abs() < 1e-10, "{xm}");
    }

    #[test]
    fn odd_in_r_and_derivative_matches_differences() {
        for br in RootBranch::BOTH {
            for &b in &[0.0, 0.3, 50.0] {
                let (x, dx) = solve_x(br, b, 1.7, 0.8).unwrap();
                let (xm, dxm) = solve_x(br, b, 1.7, -0.8).unwrap();
                assert_eq!(xm, -x);
                assert_eq!(dxm, dx);
                let h = 1e-6;
                let fd = (solve_x(br, b, 1.7, 0.8 + h).unwrap().0 - solve_x(br, b, 1.7, 0.8 - h).unwrap().0) / (2.0 * h);
                assert!((fd / dx - 1.0).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn inverse_map_round_trips() {
        for br in RootBranch::BOTH {
            for &r in &[1e-5, 0.3, 7.0, 1e5] {
                let (x, _) = solve_x(br, 2.5, 0.7, r).unwrap();
                assert!((r_of_x(br, 2.5, 0.7, x) / r - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_radius_rejected() {
        assert!(solve_x(RootBranch::Plus, 1.0, 1.0, 0.0).is_err());
    }
}
