//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Subintervals are refined in order of decreasing error estimate until the
//! summed estimate falls below `max(abs_tol, rel_tol·|I|)`. Running out of
//! subdivisions is reported as an error rather than a silently degraded value.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    res_abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_k = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    if !kronrod.is_finite() {
        return Err(Error::Quadrature(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_k * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment {
        a,
        b,
        value,
        error: err,
        res_abs,
    })
}

impl Quadrature {
    pub fn absolute(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol: 0.0,
            ..Self::default()
        }
    }

    pub fn relative(rel_tol: f64) -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn with_max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    /// ∫_a^b f.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        self.integrate_breaks(f, &[a, b])
    }

    /// Integral over `[breaks[0], breaks[last]]` with the given points as
    /// initial subdivision (useful at kinks and near-singular features).
    pub fn integrate_breaks<F: FnMut(f64) -> f64>(&self, mut f: F, breaks: &[f64]) -> Result<Estimate> {
        if breaks.len() < 2 {
            return Err(Error::Quadrature("need at least two break points".into()));
        }
        let mut heap = BinaryHeap::new();
        let mut frozen_value = 0.0;
        let mut frozen_error = 0.0;
        for w in breaks.windows(2) {
            if !(w[0].is_finite() && w[1].is_finite()) {
                return Err(Error::Quadrature("infinite limits; use integrate_semi_infinite".into()));
            }
            if w[1] == w[0] {
                continue;
            }
            heap.push(gk15(&mut f, w[0], w[1])?);
        }
        let mut count = heap.len();
        loop {
            let (value, error) = heap
                .iter()
                .fold((frozen_value, frozen_error), |(v, e), s| (v + s.value, e + s.error));
            if error <= self.tolerance(value) {
                return Ok(Estimate {
                    value,
                    error,
                    intervals: count,
                });
            }
            // Everything left is at the round-off floor: that is the attainable accuracy.
            let Some(worst) = heap.pop() else {
                return Ok(Estimate {
                    value,
                    error,
                    intervals: count,
                });
            };
            if count >= self.max_intervals {
                return Err(Error::Quadrature(format!(
                    "subdivision limit {} reached with error {error:e} (value {value:e})",
                    self.max_intervals
                )));
            }
            let mid = 0.5 * (worst.a + worst.b);
            let width = worst.b - worst.a;
            let at_floor = worst.error <= 64.0 * f64::EPSILON * worst.res_abs;
            if at_floor || width.abs() <= 64.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()) || mid == worst.a || mid == worst.b {
                frozen_value += worst.value;
                frozen_error += worst.error;
                continue;
            }
            heap.push(gk15(&mut f, worst.a, mid)?);
            heap.push(gk15(&mut f, mid, worst.b)?);
            count += 1;
        }
    }

    /// ∫_a^∞ f via x = a + t/(1−t).
    pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(&self, f: F, a: f64) -> Result<Estimate> {
        self.integrate_semi_infinite_scaled(f, a, 1.0)
    }

    /// ∫_a^∞ f via x = a + ℓ·t/(1−t); `ℓ` should match the decay length of f.
    pub fn integrate_semi_infinite_scaled<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, scale: f64) -> Result<Estimate> {
        self.integrate_breaks(
            |t: f64| {
                let s = 1.0 - t;
                let x = a + scale * t / s;
                let y = f(x);
                if y == 0.0 {
                    0.0
                } else {
                    scale * y / (s * s)
                }
            },
            &[0.0, 0.5, 1.0],
        )
    }

    /// ∫_a^∞ f with the body `[a, split]` handled directly and the remainder
    /// through the semi-infinite map.
    pub fn integrate_split_tail<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, split: f64) -> Result<Estimate> {
        let body = self.integrate(&mut f, a, split)?;
        let tail = self.integrate_semi_infinite(&mut f, split)?;
        Ok(Estimate {
            value: body.value + tail.value,
            error: body.error + tail.error,
            intervals: body.intervals + tail.intervals,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_integrate_exactly() {
        let q = Quadrature::absolute(1e-13);
        for p in 0..=29 {
            let est = q.integrate(|x: f64| x.powi(p), 0.0, 1.0).unwrap();
            assert!((est.value - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "degree {p}");
        }
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let est = Quadrature::relative(1e-10)
            .integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0)
            .unwrap();
        assert!((est.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn semi_infinite_exponential() {
        let est = Quadrature::relative(1e-12)
            .integrate_semi_infinite(|x: f64| (-x).exp(), 0.0)
            .unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
        let est = Quadrature::relative(1e-12)
            .integrate_semi_infinite(|x: f64| 1.0 / (1.0 + x * x), 0.0)
            .unwrap();
        assert!((est.value - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }

    #[test]
    fn failure_is_an_error() {
        let q = Quadrature::absolute(1e-14).with_max_intervals(20);
        assert!(q.integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0).is_err());
        assert!(q.integrate(|_| f64::NAN, 0.0, 1.0).is_err());
    }
}
