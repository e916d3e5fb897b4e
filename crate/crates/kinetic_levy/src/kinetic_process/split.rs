//! Fast simulation of long trajectories.
//!
//! Jumps into modes with mean holding time above a threshold Λ ("large"
//! modes, a small neighbourhood of k = 0 on each branch) are simulated
//! exactly. Between two large jumps the number of "small" jumps is geometric;
//! long runs of small jumps are replaced by the bivariate Gaussian with the
//! exact conditional mean and covariance of (clock increment, ∫v dt). The two
//! components are uncorrelated because Ψ is odd and π even. When a Gaussian
//! run overshoots the target time it is split by Gaussian bridges until the
//! crossing is localised to fewer than `2·m_min` jumps, and the process is
//! then re-simulated exactly from the start of that piece, so the state
//! straddling the target time and the final partial segment are exact.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Geometric, StandardNormal};
use serde::{Deserialize, Serialize};

use super::sampling::{exp1, sample_pi_data};
use crate::error::{Error, Result};
use crate::numerics::{bisect, Quadrature};
use crate::spectral::{mode_data, velocity_raw, Branch, ModeData, ModeState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    /// Expected number of large jumps per trajectory.
    pub n_large: f64,
    /// Lower bound on the length of a Gaussian run.
    pub m_min_floor: u64,
    /// Gaussian runs are at least `m_min_factor·(sd/mean)²` jumps long, so a
    /// run's clock increment has coefficient of variation at most
    /// `1/√m_min_factor` and is essentially never negative. (The cumulant
    /// mismatch of the Gaussian replacement adds up over the whole trajectory
    /// and does not depend on how runs are chunked.)
    pub m_min_factor: f64,
    /// Below this many expected jumps the exact simulator is used.
    pub exact_below: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            n_large: 200.0,
            m_min_floor: 256,
            m_min_factor: 25.0,
            exact_below: 100_000.0,
        }
    }
}

/// A piece of the jump-count path `j(T)`: constant `j0` on `[t0, t1)` for an
/// exact segment, linear from `j0` to `j0 + jumps` across a Gaussian run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClockPiece {
    pub t0: f64,
    pub t1: f64,
    pub j0: u64,
    pub jumps: u64,
    pub linear: bool,
}

impl ClockPiece {
    pub fn count_at(&self, t: f64) -> f64 {
        if self.linear {
            self.j0 as f64 + self.jumps as f64 * ((t - self.t0) / (self.t1 - self.t0)).clamp(0.0, 1.0)
        } else if t < self.t1 {
            self.j0 as f64
        } else {
            (self.j0 + self.jumps) as f64
        }
    }
}

/// Outcome of running the process up to a clock time `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arrival {
    /// `∫_0^T v(K(s)) ds`.
    pub displacement: f64,
    /// Completed jumps `#{n : 𝒯_n ≤ T}`.
    pub jumps: u64,
    /// Mode occupied at time `T`.
    pub state: ModeState,
    /// Number of individually simulated segments (cost diagnostic).
    pub exact_segments: u64,
}

#[derive(Debug, Clone)]
pub struct SplitSampler {
    pub b: f64,
    pub gamma: f64,
    pub lambda_cut: f64,
    pub k_cut: [f64; 2],
    pub p_large_branch: [f64; 2],
    pub p_large: f64,
    pub mean_holding_small: f64,
    pub sd_holding_small: f64,
    pub sd_flight_small: f64,
    pub m_min: u64,
    geometric: Geometric,
}

fn idx(i: Branch) -> usize {
    (i.index() - 1) as usize
}

fn lambda_of(b: f64, gamma: f64, k: f64, i: Branch) -> f64 {
    mode_data(b, gamma, k, i).lambda
}

/// |k| below which branch `i` has λ > Λ (λ_i decreases in |k|).
fn k_cut_for(b: f64, gamma: f64, i: Branch, cut: f64) -> Result<f64> {
    if lambda_of(b, gamma, 0.5 - 1e-16, i) >= cut {
        return Ok(0.5);
    }
    bisect(|k| lambda_of(b, gamma, k, i).ln() - cut.ln(), 1e-100, 0.5, 1e-17)
}

fn geometric_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let mut v = vec![lo];
    let mut x = lo;
    while 2.0 * x < hi {
        x *= 2.0;
        v.push(x);
    }
    v.push(hi);
    v
}

fn large_mass(b: f64, gamma: f64, i: Branch, kc: f64) -> Result<f64> {
    let est = Quadrature::relative(1e-12).integrate(|k| if k == 0.0 { 0.0 } else { 2.0 * mode_data(b, gamma, k, i).pi }, 0.0, kc)?;
    Ok(est.value)
}

impl SplitSampler {
    /// Chooses Λ so that a trajectory of `expected_jumps` jumps has on
    /// average `cfg.n_large` large ones.
    pub fn new(b: f64, gamma: f64, expected_jumps: f64, cfg: &SplitConfig) -> Result<Self> {
        if !(cfg.n_large >= 1.0 && expected_jumps >= 100.0 * cfg.n_large) {
            return Err(Error::InvalidParameter(format!(
                "split sampling needs expected_jumps >= 100·n_large, got {expected_jumps} and {}",
                cfg.n_large
            )));
        }
        let target = cfg.n_large / expected_jumps;
        let p_large_at = |ln_cut: f64| -> Result<f64> {
            let cut = ln_cut.exp();
            let mut p = 0.0;
            for i in Branch::BOTH {
                p += large_mass(b, gamma, i, k_cut_for(b, gamma, i, cut)?)?;
            }
            Ok(p)
        };
        let lo = lambda_of(b, gamma, 0.5, Branch::One).ln();
        let hi = 60.0;
        let mut err = None;
        let ln_cut = bisect(
            |x| match p_large_at(x) {
                Ok(p) => p.ln() - target.ln(),
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            },
            lo,
            hi,
            1e-9,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        Self::with_cut(b, gamma, ln_cut.exp(), cfg)
    }

    pub fn with_cut(b: f64, gamma: f64, lambda_cut: f64, cfg: &SplitConfig) -> Result<Self> {
        let mut k_cut = [0.0; 2];
        let mut p_large_branch = [0.0; 2];
        let (mut e1, mut e2, mut ep, mut p_small) = (0.0, 0.0, 0.0, 0.0);
        let q = Quadrature::relative(1e-11).with_max_intervals(20000);
        for i in Branch::BOTH {
            let kc = k_cut_for(b, gamma, i, lambda_cut)?;
            k_cut[idx(i)] = kc;
            p_large_branch[idx(i)] = large_mass(b, gamma, i, kc)?;
            if kc >= 0.5 {
                continue;
            }
            let breaks = geometric_breaks(kc, 0.5);
            // λπ = 1/(4γ) identically, so ∫_S λ dπ = |S|/(4γ).
            e1 += 2.0 * (0.5 - kc) / (4.0 * gamma);
            e2 += 2.0 / (4.0 * gamma) * q.integrate_breaks(|k| lambda_of(b, gamma, k, i), &breaks)?.value;
            ep += 2.0 / (4.0 * gamma)
                * q.integrate_breaks(
                    |k| {
                        let v = velocity_raw(b, k);
                        v * v * lambda_of(b, gamma, k, i)
                    },
                    &breaks,
                )?
                .value;
            p_small += 2.0 * q.integrate_breaks(|k| mode_data(b, gamma, k, i).pi, &breaks)?.value;
        }
        let p_large = p_large_branch[0] + p_large_branch[1];
        if !(p_large > 0.0 && p_small > 0.0) {
            return Err(Error::InvalidParameter(format!("degenerate split at Λ = {lambda_cut}")));
        }
        let mean = e1 / p_small;
        // E[(λτ)²] = 2E[λ²] and E[(Ψτ)²] = 2E[Ψ²] = 2E[v²λ²]; with λπ constant
        // the π-weights reduce to dk/(4γ).
        let var_h = 2.0 * e2 / p_small - mean * mean;
        let var_d = 2.0 * ep / p_small;
        let ratio = var_h / (mean * mean);
        let m_min = cfg.m_min_floor.max((cfg.m_min_factor * ratio).ceil() as u64);
        let geometric = Geometric::new(p_large).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(Self {
            b,
            gamma,
            lambda_cut,
            k_cut,
            p_large_branch,
            p_large,
            mean_holding_small: mean,
            sd_holding_small: var_h.sqrt(),
            sd_flight_small: var_d.sqrt(),
            m_min,
            geometric,
        })
    }

    fn sample_large<R: Rng + ?Sized>(&self, rng: &mut R) -> ModeState {
        let branch = if rng.random::<f64>() * self.p_large < self.p_large_branch[0] {
            Branch::One
        } else {
            Branch::Two
        };
        let kc = self.k_cut[idx(branch)].min(0.5 - 1e-16);
        let f_max = mode_data(self.b, self.gamma, kc, branch).pi;
        loop {
            let k = kc * rng.random::<f64>();
            if k == 0.0 {
                continue;
            }
            if rng.random::<f64>() * f_max < mode_data(self.b, self.gamma, k, branch).pi {
                let k = if rng.random::<bool>() { k } else { -k };
                return ModeState { k, branch };
            }
        }
    }

    #[inline]
    fn sample_small<R: Rng + ?Sized>(&self, rng: &mut R) -> (ModeState, ModeData) {
        loop {
            let (x, md) = sample_pi_data(self.b, self.gamma, rng);
            if x.k.abs() >= self.k_cut[idx(x.branch)] {
                return (x, md);
            }
        }
    }

    fn gaussian_run<R: Rng + ?Sized>(&self, m: u64, rng: &mut R) -> (f64, f64) {
        let mf = m as f64;
        let sq = mf.sqrt();
        loop {
            let z1: f64 = StandardNormal.sample(rng);
            let z2: f64 = StandardNormal.sample(rng);
            let h = mf * self.mean_holding_small + sq * self.sd_holding_small * z1;
            if h > 0.0 {
                return (h, sq * self.sd_flight_small * z2);
            }
        }
    }

    /// Runs from `x0` up to clock time `horizon`, optionally recording the
    /// jump-count path.
    pub fn run_to_time<R: Rng + ?Sized>(
        &self,
        x0: ModeState,
        horizon: f64,
        max_jumps: u64,
        rng: &mut R,
        mut pieces: Option<&mut Vec<ClockPiece>>,
    ) -> Result<Arrival> {
        let (b, gamma) = (self.b, self.gamma);
        let (mut c, mut d, mut j, mut exact) = (0.0f64, 0.0f64, 0u64, 0u64);
        let record = |p: ClockPiece, pieces: &mut Option<&mut Vec<ClockPiece>>| {
            if let Some(v) = pieces.as_deref_mut() {
                v.push(p);
            }
        };
        // one exact segment; returns true when it straddles the horizon
        macro_rules! segment {
            ($xd:expr) => {{
                let (x, md): (ModeState, ModeData) = $xd;
                let h = md.lambda * exp1(rng);
                exact += 1;
                if c + h > horizon {
                    d += md.velocity * (horizon - c);
                    return Ok(Arrival {
                        displacement: d,
                        jumps: j,
                        state: x,
                        exact_segments: exact,
                    });
                }
                record(
                    ClockPiece {
                        t0: c,
                        t1: c + h,
                        j0: j,
                        jumps: 1,
                        linear: false,
                    },
                    &mut pieces,
                );
                c += h;
                d += md.velocity * h;
                j += 1;
            }};
        }
        if x0.k == 0.0 {
            return Err(Error::Singularity("holding time is infinite at k = 0".into()));
        }
        let mut x = x0;
        loop {
            segment!((x, mode_data(b, gamma, x.k, x.branch)));
            let mut r = self.geometric.sample(rng);
            let mut exact_only = false;
            while r > 0 {
                if !exact_only && r >= self.m_min {
                    let (hh, dd) = self.gaussian_run(r, rng);
                    if c + hh <= horizon {
                        record(
                            ClockPiece {
                                t0: c,
                                t1: c + hh,
                                j0: j,
                                jumps: r,
                                linear: true,
                            },
                            &mut pieces,
                        );
                        c += hh;
                        d += dd;
                        j += r;
                        break;
                    }
                    let (mut m, mut hm, mut dm, mut rest) = (r, hh, dd, 0u64);
                    while m >= 2 * self.m_min {
                        let m1 = m / 2;
                        let m2 = m - m1;
                        let f = m1 as f64 / m as f64;
                        let w = (m1 as f64 * m2 as f64 / m as f64).sqrt();
                        let z1: f64 = StandardNormal.sample(rng);
                        let z2: f64 = StandardNormal.sample(rng);
                        let h1 = hm * f + w * self.sd_holding_small * z1;
                        let d1 = dm * f + w * self.sd_flight_small * z2;
                        if c + h1 > horizon {
                            rest += m2;
                            m = m1;
                            hm = h1;
                            dm = d1;
                        } else {
                            record(
                                ClockPiece {
                                    t0: c,
                                    t1: c + h1,
                                    j0: j,
                                    jumps: m1,
                                    linear: true,
                                },
                                &mut pieces,
                            );
                            c += h1;
                            d += d1;
                            j += m1;
                            m = m2;
                            hm -= h1;
                            dm -= d1;
                        }
                    }
                    r = m + rest;
                    exact_only = true;
                    continue;
                }
                segment!(self.sample_small(rng));
                r -= 1;
            }
            if j > max_jumps {
                return Err(Error::Budget(format!("{j} jumps before clock time {horizon}")));
            }
            x = self.sample_large(rng);
        }
    }

    /// `Σ_{n=1}^{count} Ψ(X_n)τ_n` for i.i.d. π-distributed `X_n`.
    pub fn flight_sum<R: Rng + ?Sized>(&self, count: u64, rng: &mut R) -> f64 {
        let large = Binomial::new(count, self.p_large).map(|d| d.sample(rng)).unwrap_or(0);
        let mut total = 0.0;
        for _ in 0..large {
            let x = self.sample_large(rng);
            let md = mode_data(self.b, self.gamma, x.k, x.branch);
            total += md.velocity * md.lambda * exp1(rng);
        }
        let small = count - large;
        if small >= self.m_min {
            let z: f64 = StandardNormal.sample(rng);
            total += (small as f64).sqrt() * self.sd_flight_small * z;
        } else {
            for _ in 0..small {
                let (_, md) = self.sample_small(rng);
                total += md.velocity * md.lambda * exp1(rng);
            }
        }
        total
    }
}

/// Exact or split simulation, chosen by the expected number of jumps.
#[derive(Debug, Clone)]
pub enum FlightSimulator {
    Exact { b: f64, gamma: f64 },
    Split(Box<SplitSampler>),
}

impl FlightSimulator {
    pub fn new(b: f64, gamma: f64, expected_jumps: f64, cfg: &SplitConfig) -> Result<Self> {
        if expected_jumps < cfg.exact_below {
            Ok(FlightSimulator::Exact { b, gamma })
        } else {
            Ok(FlightSimulator::Split(Box::new(SplitSampler::new(b, gamma, expected_jumps, cfg)?)))
        }
    }

    pub fn run_to_time<R: Rng + ?Sized>(
        &self,
        x0: ModeState,
        horizon: f64,
        max_jumps: u64,
        rng: &mut R,
        mut pieces: Option<&mut Vec<ClockPiece>>,
    ) -> Result<Arrival> {
        match self {
            FlightSimulator::Split(s) => s.run_to_time(x0, horizon, max_jumps, rng, pieces),
            &FlightSimulator::Exact { b, gamma } => {
                if x0.k == 0.0 {
                    return Err(Error::Singularity("holding time is infinite at k = 0".into()));
                }
                let (mut c, mut d, mut j) = (0.0f64, 0.0f64, 0u64);
                let (mut x, mut md) = (x0, mode_data(b, gamma, x0.k, x0.branch));
                loop {
                    let h = md.lambda * exp1(rng);
                    if c + h > horizon {
                        d += md.velocity * (horizon - c);
                        return Ok(Arrival {
                            displacement: d,
                            jumps: j,
                            state: x,
                            exact_segments: j + 1,
                        });
                    }
                    if let Some(v) = pieces.as_deref_mut() {
                        v.push(ClockPiece {
                            t0: c,
                            t1: c + h,
                            j0: j,
                            jumps: 1,
                            linear: false,
                        });
                    }
                    c += h;
                    d += md.velocity * h;
                    j += 1;
                    if j > max_jumps {
                        return Err(Error::Budget(format!("{j} jumps before clock time {horizon}")));
                    }
                    (x, md) = sample_pi_data(b, gamma, rng);
                }
            }
        }
    }

    pub fn flight_sum<R: Rng + ?Sized>(&self, count: u64, rng: &mut R) -> f64 {
        match self {
            FlightSimulator::Split(s) => s.flight_sum(count, rng),
            &FlightSimulator::Exact { b, gamma } => (0..count)
                .map(|_| {
                    let (_, md) = sample_pi_data(b, gamma, rng);
                    md.velocity * md.lambda * exp1(rng)
                })
                .sum(),
        }
    }
}
