use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Bracket width, relative to its midpoint, below which Newton takes over.
    pub switch_rel: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            switch_rel: 1e-3,
            max_iter: 400,
        }
    }
}

/// Plain bisection for a sign change on `[lo, hi]`, down to `xtol` (absolute)
/// or until the midpoint can no longer be represented.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracketing(format!("f({lo})={flo:e}, f({hi})={fhi:e}")));
    }
    let lo_neg = flo < 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence("bisection".into()))
}

/// Bracketed bisection followed by safeguarded Newton. `f` returns the value
/// and the derivative.
pub fn bisect_newton<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    opts: RootOptions,
) -> Result<f64> {
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracketing(format!("f({lo})={flo:e}, f({hi})={fhi:e}")));
    }
    let lo_neg = flo < 0.0;
    let mut x = 0.5 * (lo + hi);
    let mut newton = false;
    for _ in 0..opts.max_iter {
        if !newton && (hi - lo) <= opts.switch_rel * x.abs().max(f64::MIN_POSITIVE) {
            newton = true;
        }
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx < 0.0) == lo_neg {
            lo = x;
        } else {
            hi = x;
        }
        let bis = 0.5 * (lo + hi);
        if newton && dfx != 0.0 && dfx.is_finite() {
            let step = fx / dfx;
            let cand = x - step;
            if cand > lo && cand < hi {
                if step.abs() <= 2.0 * f64::EPSILON * x.abs() {
                    return Ok(cand);
                }
                x = cand;
                continue;
            }
        }
        if bis <= lo || bis >= hi {
            return Ok(x);
        }
        x = bis;
    }
    Err(Error::NonConvergence(format!("bracket [{lo}, {hi}]")))
}
