use std::f64::consts::PI;

use rand::Rng;

use crate::spectral::{mode_data_sc, Branch, ModeData, ModeState, SpectralParams};

/// Exp(1) by inversion, using a uniform on the open interval (0, 1) so the
/// result is always finite and strictly positive.
#[inline]
pub fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u = ((rng.random::<u64>() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
    -u.ln()
}

/// Draws a mode from π_B by rejection.
///
/// The k-marginal `2 sin²(πk)` is sampled against the uniform proposal
/// (acceptance 1/2); the branch is then chosen with probability θ²_i(k).
pub fn sample_pi<R: Rng + ?Sized>(params: &SpectralParams, rng: &mut R) -> ModeState {
    sample_pi_raw(params.b_eff(), rng)
}

#[inline]
pub(crate) fn sample_pi_raw<R: Rng + ?Sized>(b: f64, rng: &mut R) -> ModeState {
    sample_pi_data(b, 1.0, rng).0
}

/// A π-draw together with its holding scale, velocity and density.
#[inline]
pub(crate) fn sample_pi_data<R: Rng + ?Sized>(b: f64, gamma: f64, rng: &mut R) -> (ModeState, ModeData) {
    loop {
        let k = rng.random::<f64>() - 0.5;
        let (s, c) = (PI * k).sin_cos();
        if k == 0.0 || rng.random::<f64>() >= s * s {
            continue;
        }
        let w = (4.0 * s * s + 0.25 * b * b).sqrt();
        let theta1 = (w + 0.5 * b) / (2.0 * w);
        let branch = if rng.random::<f64>() < theta1 { Branch::One } else { Branch::Two };
        return (ModeState { k, branch }, mode_data_sc(b, gamma, s, c, branch));
    }
}

/// One step of the chain. The kernel does not depend on the current state.
pub fn step_chain<R: Rng + ?Sized>(params: &SpectralParams, _current: ModeState, rng: &mut R) -> ModeState {
    sample_pi(params, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_field_marginals() {
        let p = SpectralParams::new(0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 1_000_000;
        let (mut s2, mut s4, mut ones) = (0.0, 0.0, 0usize);
        for _ in 0..n {
            let x = sample_pi(&p, &mut rng);
            let s = (PI * x.k).sin().powi(2);
            s2 += s;
            s4 += s * s;
            ones += (x.branch == Branch::One) as usize;
        }
        let mean = s2 / n as f64;
        let sd = ((s4 / n as f64 - mean * mean) / n as f64).sqrt();
        // E_π[sin²] = ∫2sin⁴(πk)dk = 3/4
        let oracle = crate::kinetic_process::pi_average(&p, |k, _| (PI * k).sin().powi(2)).unwrap();
        assert!((oracle - 0.75).abs() < 1e-12);
        assert!((mean - oracle).abs() < 3.0 * sd, "{mean}");
        let frac = ones as f64 / n as f64;
        assert!((frac - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt(), "{frac}");
    }

    #[test]
    fn strong_field_prefers_branch_one() {
        let p = SpectralParams::new(1e6, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let ones = (0..n).filter(|_| sample_pi(&p, &mut rng).branch == Branch::One).count();
        assert!(ones as f64 / n as f64 >= 0.99);
    }

    #[test]
    fn consecutive_states_uncorrelated() {
        let p = SpectralParams::new(1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 1_000_000;
        let mut x = ModeState::new(0.3, Branch::One).unwrap();
        let mut prev = (PI * x.k).sin();
        let (mut sxy, mut sx, mut sxx) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            x = step_chain(&p, x, &mut rng);
            let cur = (PI * x.k).sin();
            sxy += prev * cur;
            sx += cur;
            sxx += cur * cur;
            prev = cur;
        }
        let m = sx / n as f64;
        let var = sxx / n as f64 - m * m;
        let corr = (sxy / n as f64 - m * m) / var;
        assert!(corr.abs() < 3.0 / (n as f64).sqrt(), "{corr}");
    }

    #[test]
    fn exp1_is_positive_with_unit_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 200_000;
        let mut s = 0.0;
        for _ in 0..n {
            let t = exp1(&mut rng);
            assert!(t > 0.0 && t.is_finite());
            s += t;
        }
        assert!((s / n as f64 - 1.0).abs() < 3.0 / (n as f64).sqrt());
    }
}
