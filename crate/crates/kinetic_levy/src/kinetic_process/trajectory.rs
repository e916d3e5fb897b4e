use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use super::sampling::{exp1, sample_pi_data};
use crate::error::{Error, Result};
use crate::numerics::NeumaierSum;
use crate::spectral::{mode_data, velocity_raw, ModeState, SpectralParams};

/// Factor in front of the velocity in `Z_u(t) = u − ∫_0^t v(K(s))/(2π) ds`.
pub const FLIGHT_PREFACTOR: f64 = 1.0 / (2.0 * PI);

/// A simulated path. State `states[n]` is held for `holdings[n]` on
/// `[clock[n-1], clock[n])` (with `clock[-1] = 0`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub states: Vec<ModeState>,
    pub holdings: Vec<f64>,
    pub clock: Vec<f64>,
    pub rng_seed: u64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn end_time(&self) -> f64 {
        self.clock.last().copied().unwrap_or(0.0)
    }

    fn push(&mut self, state: ModeState, holding: f64, sum: &mut NeumaierSum) {
        sum.add(holding);
        self.states.push(state);
        self.holdings.push(holding);
        self.clock.push(sum.value());
    }
}

fn check_start(x0: ModeState) -> Result<()> {
    if x0.k == 0.0 {
        return Err(Error::Singularity("holding time is infinite at k = 0".into()));
    }
    Ok(())
}

/// Simulates `n_jumps` holding segments starting from `x0`; `rng_seed` is
/// recorded for provenance only.
pub fn simulate_trajectory<R: Rng + ?Sized>(
    params: &SpectralParams,
    x0: ModeState,
    n_jumps: usize,
    rng: &mut R,
    rng_seed: u64,
) -> Result<Trajectory> {
    check_start(x0)?;
    let (b, gamma) = (params.b_eff(), params.gamma);
    let mut traj = Trajectory {
        states: Vec::with_capacity(n_jumps),
        holdings: Vec::with_capacity(n_jumps),
        clock: Vec::with_capacity(n_jumps),
        rng_seed,
    };
    let mut sum = NeumaierSum::new();
    let mut x = x0;
    for n in 0..n_jumps {
        let lambda = if n == 0 {
            mode_data(b, gamma, x.k, x.branch).lambda
        } else {
            let (y, md) = sample_pi_data(b, gamma, rng);
            x = y;
            md.lambda
        };
        let h = lambda * exp1(rng);
        traj.push(x, h, &mut sum);
    }
    Ok(traj)
}

/// Simulates until the clock passes `horizon`, failing with a budget error
/// after `max_jumps` segments.
pub fn simulate_until<R: Rng + ?Sized>(
    params: &SpectralParams,
    x0: ModeState,
    horizon: f64,
    max_jumps: usize,
    rng: &mut R,
    rng_seed: u64,
) -> Result<Trajectory> {
    check_start(x0)?;
    let (b, gamma) = (params.b_eff(), params.gamma);
    let mut traj = Trajectory {
        states: Vec::new(),
        holdings: Vec::new(),
        clock: Vec::new(),
        rng_seed,
    };
    let mut sum = NeumaierSum::new();
    let mut x = x0;
    while traj.end_time() <= horizon {
        if traj.len() >= max_jumps {
            return Err(Error::Budget(format!(
                "clock reached {} < {horizon} after {max_jumps} jumps",
                traj.end_time()
            )));
        }
        let lambda = if traj.is_empty() {
            mode_data(b, gamma, x.k, x.branch).lambda
        } else {
            let (y, md) = sample_pi_data(b, gamma, rng);
            x = y;
            md.lambda
        };
        let h = lambda * exp1(rng);
        traj.push(x, h, &mut sum);
    }
    Ok(traj)
}

/// `Z_u(t)` with the default prefactor 1/(2π).
pub fn flight_integral(params: &SpectralParams, traj: &Trajectory, u: f64, t: f64) -> Result<f64> {
    flight_integral_with_prefactor(params, traj, u, t, FLIGHT_PREFACTOR)
}

/// `u − c ∫_0^t v(K(s)) ds`, exact for the piecewise-constant path.
pub fn flight_integral_with_prefactor(
    params: &SpectralParams,
    traj: &Trajectory,
    u: f64,
    t: f64,
    prefactor: f64,
) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    if traj.end_time() < t {
        return Err(Error::InsufficientTrajectory(format!(
            "trajectory ends at {} < {t}",
            traj.end_time()
        )));
    }
    let b = params.b_eff();
    let mut acc = NeumaierSum::new();
    let mut start = 0.0;
    for (x, &end) in traj.states.iter().zip(&traj.clock) {
        if start >= t {
            break;
        }
        let dt = end.min(t) - start;
        acc.add(velocity_raw(b, x.k) * dt);
        start = end;
    }
    Ok(u - prefactor * acc.value())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlightPath {
    pub start: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// `Z_u` sampled at increasing `times` in one pass over the trajectory.
pub fn flight_path(params: &SpectralParams, traj: &Trajectory, u: f64, times: &[f64]) -> Result<FlightPath> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidParameter("sample times must be nonnegative and sorted".into()));
    }
    if let Some(&last) = times.last() {
        if traj.end_time() < last {
            return Err(Error::InsufficientTrajectory(format!(
                "trajectory ends at {} < {last}",
                traj.end_time()
            )));
        }
    }
    let b = params.b_eff();
    let mut values = Vec::with_capacity(times.len());
    let mut acc = NeumaierSum::new();
    let mut seg = 0usize;
    let mut seg_start = 0.0;
    for &t in times {
        while seg < traj.len() && traj.clock[seg] <= t {
            acc.add(velocity_raw(b, traj.states[seg].k) * (traj.clock[seg] - seg_start));
            seg_start = traj.clock[seg];
            seg += 1;
        }
        let partial = if seg < traj.len() {
            velocity_raw(b, traj.states[seg].k) * (t - seg_start)
        } else {
            0.0
        };
        values.push(u - FLIGHT_PREFACTOR * (acc.value() + partial));
    }
    Ok(FlightPath {
        start: u,
        times: times.to_vec(),
        values,
    })
}

/// `S_N(t) = j_N(N^α t)/N^α`, where `j_N(T)` counts the jump times `≤ T`.
pub fn clock_inverse(traj: &Trajectory, t: f64, n: f64, alpha: f64) -> Result<f64> {
    let scale = n.powf(alpha);
    let horizon = scale * t;
    if traj.end_time() <= horizon {
        return Err(Error::InsufficientTrajectory(format!(
            "trajectory ends at {} <= {horizon}",
            traj.end_time()
        )));
    }
    let j = traj.clock.partition_point(|&c| c <= horizon);
    Ok(j as f64 / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Branch;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quarter() -> ModeState {
        ModeState::new(0.25, Branch::One).unwrap()
    }

    #[test]
    fn clock_is_increasing_and_consistent() {
        let p = SpectralParams::new(1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let tr = simulate_trajectory(&p, quarter(), 10_000, &mut rng, 5).unwrap();
        assert_eq!(tr.len(), tr.holdings.len());
        assert!(tr.holdings.iter().all(|&h| h > 0.0));
        assert!(tr.clock.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(tr.states[0], quarter());
    }

    #[test]
    fn zero_momentum_start_rejected() {
        let p = SpectralParams::new(1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x0 = ModeState::new(0.0, Branch::One).unwrap();
        assert!(matches!(simulate_trajectory(&p, x0, 3, &mut rng, 0), Err(Error::Singularity(_))));
    }

    fn mean_holding(gamma: f64, seed: u64) -> (f64, f64) {
        let p = SpectralParams::new(1.0, gamma).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // holding times have infinite variance; use a truncated second moment for the scale
        let tr = simulate_trajectory(&p, quarter(), 1_000_000, &mut rng, seed).unwrap();
        let n = tr.len() as f64 - 1.0;
        let m = tr.holdings[1..].iter().sum::<f64>() / n;
        let v = tr.holdings[1..].iter().map(|h| (h - m) * (h - m)).sum::<f64>() / n;
        (m, (v / n).sqrt())
    }

    #[test]
    fn mean_holding_and_gamma_scaling() {
        let (m1, s1) = mean_holding(1.0, 7);
        assert!((m1 - 0.5).abs() < 3.0 * s1, "{m1} ± {s1}");
        let (m2, s2) = mean_holding(2.0, 8);
        let ratio = m2 / m1;
        let sr = ratio * ((s1 / m1).powi(2) + (s2 / m2).powi(2)).sqrt();
        assert!((ratio - 0.5).abs() < 3.0 * sr, "{ratio} ± {sr}");
    }

    #[test]
    fn flight_integral_single_segment() {
        let p = SpectralParams::new(0.0, 1.0).unwrap();
        let tr = Trajectory {
            states: vec![quarter()],
            holdings: vec![2.0],
            clock: vec![2.0],
            rng_seed: 0,
        };
        let z = flight_integral(&p, &tr, 0.0, 1.0).unwrap();
        assert!((z + 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(flight_integral(&p, &tr, 0.7, 0.0).unwrap(), 0.7);
        assert!(matches!(flight_integral(&p, &tr, 0.0, 3.0), Err(Error::InsufficientTrajectory(_))));
    }

    #[test]
    fn flight_integral_is_exact_and_affine() {
        let p = SpectralParams::new(0.5, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let tr = simulate_trajectory(&p, quarter(), 2000, &mut rng, 9).unwrap();
        let t = 0.9 * tr.end_time();
        let z0 = flight_integral(&p, &tr, 0.0, t).unwrap();
        let z1 = flight_integral(&p, &tr, 1.0, t).unwrap();
        assert!((z1 - z0 - 1.0).abs() < 1e-12);
        let coarse: Vec<f64> = (0..=10).map(|j| t * j as f64 / 10.0).collect();
        let fine: Vec<f64> = (0..=20).map(|j| t * j as f64 / 20.0).collect();
        let a = flight_path(&p, &tr, 0.0, &coarse).unwrap();
        let b = flight_path(&p, &tr, 0.0, &fine).unwrap();
        for (j, v) in a.values.iter().enumerate() {
            assert!((v - b.values[2 * j]).abs() < 1e-12);
            let direct = flight_integral(&p, &tr, 0.0, coarse[j]).unwrap();
            assert!((v - direct).abs() < 1e-9 * (1.0 + direct.abs()));
        }
        assert_eq!(a.values[0], 0.0);
    }

    #[test]
    fn clock_inverse_properties() {
        let p = SpectralParams::scaled(1.0, 1.0, 0.75, 1e3).unwrap();
        let alpha = 1.5;
        let horizon = 1e3f64.powf(alpha);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let tr = simulate_until(&p, quarter(), 1.5 * horizon, 100_000_000, &mut rng, 10).unwrap();
        assert_eq!(clock_inverse(&tr, 0.0, 1e3, alpha).unwrap(), 0.0);
        let mut prev = 0.0;
        for j in 1..=20 {
            let s = clock_inverse(&tr, j as f64 / 20.0, 1e3, alpha).unwrap();
            assert!(s >= prev);
            prev = s;
        }
        // heavy-tailed holdings: the law of large numbers is slow, allow 10%
        assert!((prev - 2.0).abs() < 0.2, "{prev}");
        let t = 1.0;
        let j = (clock_inverse(&tr, t, 1e3, alpha).unwrap() * horizon).round() as usize;
        assert!(tr.clock[j - 1] <= horizon && horizon < tr.clock[j]);
    }
}
