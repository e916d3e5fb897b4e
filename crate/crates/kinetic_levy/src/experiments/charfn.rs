use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentReport, ReportRow};
use super::ensemble::{ensemble_map, stream_base};
use crate::error::{Error, Result};
use crate::kinetic_process::FlightSimulator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharfnOptions {
    pub thetas: Vec<f64>,
    /// Also run the pre-time-change variant Y (a fixed number of jumps).
    #[serde(default = "yes")]
    pub pre_time_change: bool,
}

fn yes() -> bool {
    true
}

/// Empirical `E[e^{iθX}]` for each θ, with the standard error of the
/// complex mean.
fn empirical_charfn(samples: &[f64], theta: f64) -> (Complex64, f64) {
    let m = samples.len() as f64;
    let (mut c, mut s, mut c2, mut s2) = (0.0, 0.0, 0.0, 0.0);
    for &x in samples {
        let (sn, cs) = (theta * x).sin_cos();
        c += cs;
        s += sn;
        c2 += cs * cs;
        s2 += sn * sn;
    }
    let (mc, ms) = (c / m, s / m);
    let var = (c2 / m - mc * mc) + (s2 / m - ms * ms);
    (Complex64::new(mc, ms), (var.max(0.0) / m).sqrt())
}

/// `M` samples of `Z^N_u(t) − u` for the N at position `n_index` of the
/// configured list.
pub fn scaled_flight_samples(cfg: &ExperimentConfig, n_index: usize) -> Result<Vec<f64>> {
    cfg.validate()?;
    let n = *cfg
        .n_list
        .get(n_index)
        .ok_or_else(|| Error::InvalidParameter(format!("no N at index {n_index}")))?;
    let x0 = cfg.start()?;
    let horizon = n.powf(cfg.alpha()) * cfg.t;
    let expected = 2.0 * cfg.gamma * horizon;
    let cap = cfg.jump_cap(expected);
    let sim = FlightSimulator::new(cfg.b * n.powf(-cfg.delta), cfg.gamma, expected.max(1.0), &cfg.split)?;
    let scale = cfg.flight_prefactor / n;
    ensemble_map(cfg.seed, stream_base(n_index, 0), cfg.ensemble, |_, rng| {
        sim.run_to_time(x0, horizon, cap, rng, None).map(|a| -scale * a.displacement)
    })
    .into_iter()
    .collect()
}

/// Characteristic functions of `Z^N_u(t) − u = N^{-1}(Z_{Nu}(N^α t) − Nu)`
/// against `exp(tΦ_δ(θ))`, and of the jump-indexed `Y^N_u(t) − u` against
/// `exp(t(2γ)^{-1}Φ_δ(θ))`. A row passes when the estimate lies within
/// `3/√M + ε_N` of the theory value.
pub fn charfn_convergence(cfg: &ExperimentConfig, opts: &CharfnOptions) -> Result<ExperimentReport> {
    cfg.validate()?;
    let exponent = cfg.exponent()?;
    let alpha = cfg.alpha();
    let m = cfg.ensemble;
    let radius = 3.0 / (m as f64).sqrt() + cfg.allowance;
    let mut rows = Vec::new();
    for (ni, &n) in cfg.n_list.iter().enumerate() {
        let b_eff = cfg.b * n.powf(-cfg.delta);
        let horizon = n.powf(alpha) * cfg.t;
        let expected = 2.0 * cfg.gamma * horizon;
        let sim = FlightSimulator::new(b_eff, cfg.gamma, expected.max(1.0), &cfg.split)?;
        let scale = cfg.flight_prefactor / n;
        let z = scaled_flight_samples(cfg, ni)?;
        let mut variants = vec![("Z", z, 1.0)];
        if opts.pre_time_change {
            let count = horizon.floor() as u64;
            let y = ensemble_map(cfg.seed, stream_base(ni, 1), m, |_, rng| -scale * sim.flight_sum(count, rng));
            variants.push(("Y", y, 1.0 / (2.0 * cfg.gamma)));
        }
        for (name, samples, rate) in &variants {
            for &theta in &opts.thetas {
                let (est, se) = empirical_charfn(samples, theta);
                let theory = (rate * cfg.t * cfg.phi(&exponent, theta)?).exp();
                rows.push(ReportRow {
                    n,
                    variant: name.to_string(),
                    x: theta,
                    estimate: est.re,
                    estimate_im: est.im,
                    std_error: se,
                    radius,
                    theory,
                    pass: (est - theory).norm() <= radius,
                });
            }
        }
    }
    Ok(ExperimentReport {
        experiment: "charfn".into(),
        config: cfg.clone(),
        rows,
        checks: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(delta: f64) -> ExperimentConfig {
        ExperimentConfig::new(1.0, 1.0, delta, vec![100.0], 1.0, 400, 3)
    }

    #[test]
    fn zero_frequency_and_modulus() {
        let cfg = small(0.75);
        let rep = charfn_convergence(
            &cfg,
            &CharfnOptions {
                thetas: vec![0.0, 1.0, 5.0],
                pre_time_change: true,
            },
        )
        .unwrap();
        assert_eq!(rep.rows.len(), 6);
        for r in &rep.rows {
            assert!(r.estimate.hypot(r.estimate_im) <= 1.0 + 1e-12);
            if r.x == 0.0 {
                assert_eq!((r.estimate, r.estimate_im, r.theory), (1.0, 0.0, 1.0));
            }
        }
    }

    #[test]
    fn u_shift_multiplies_uncentred_charfn() {
        // E[e^{iθZ_u}] = e^{iθu} E[e^{iθ(Z_u − u)}]: the centred samples do not depend on u.
        let samples = [0.3, -1.2, 0.7];
        let theta = 0.8;
        let (c, _) = empirical_charfn(&samples, theta);
        let shifted: Vec<f64> = samples.iter().map(|x| x + 1.0).collect();
        let (c1, _) = empirical_charfn(&shifted, theta);
        assert!((c1 - c * Complex64::from_polar(1.0, theta)).norm() < 1e-15);
    }

    #[test]
    fn zero_horizon_is_deterministic() {
        let mut cfg = small(0.5);
        cfg.t = 0.0;
        let rep = charfn_convergence(
            &cfg,
            &CharfnOptions {
                thetas: vec![2.0],
                pre_time_change: false,
            },
        )
        .unwrap();
        assert_eq!(rep.rows[0].estimate, 1.0);
        assert!(rep.passed());
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let cfg = small(0.25);
        let opts = CharfnOptions {
            thetas: vec![1.0],
            pre_time_change: true,
        };
        let a = charfn_convergence(&cfg, &opts).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| charfn_convergence(&cfg, &opts).unwrap());
        assert_eq!(a, b);
    }
}
