use proptest::prelude::*;

use kinetic_levy::fractional_pde::{evolve, init_profile, ProfileKind};
use kinetic_levy::levy_calculus::roots::root_residual;
use kinetic_levy::levy_calculus::{levy_exponent, solve_x, JumpScale, LevyMeasureSpec, Regime, RootBranch, TauMoment};
use kinetic_levy::spectral::{group_velocity, lambda_holding, pi_density, psi_flight, theta_sq, Branch, ModeState, SpectralParams};
use kinetic_levy::tail_analysis::tail_exact;

fn branch() -> impl Strategy<Value = Branch> {
    prop_oneof![Just(Branch::One), Just(Branch::Two)]
}

fn nonzero_k() -> impl Strategy<Value = f64> {
    (1e-6f64..0.5).prop_flat_map(|k| prop_oneof![Just(k), Just(-k)])
}

fn regime() -> impl Strategy<Value = Regime> {
    prop_oneof![Just(Regime::DeltaGtHalf), Just(Regime::DeltaEqHalf), Just(Regime::DeltaLtHalf)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn branch_weights_sum_to_one(k in nonzero_k(), b in 0.0f64..1e4, gamma in 0.1f64..10.0) {
        let p = SpectralParams::new(b, gamma).unwrap();
        let s = theta_sq(&p, k, Branch::One).unwrap() + theta_sq(&p, k, Branch::Two).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_and_positivity(k in nonzero_k(), b in 0.0f64..100.0, i in branch()) {
        let p = SpectralParams::new(b, 1.0).unwrap();
        let (x, y) = (ModeState::new(k, i).unwrap(), ModeState::new(-k, i).unwrap());
        prop_assert_eq!(group_velocity(&p, k).unwrap(), -group_velocity(&p, -k).unwrap());
        prop_assert_eq!(lambda_holding(&p, x).unwrap(), lambda_holding(&p, y).unwrap());
        prop_assert_eq!(psi_flight(&p, x).unwrap(), -psi_flight(&p, y).unwrap());
        prop_assert!(lambda_holding(&p, x).unwrap() > 0.0);
        prop_assert!(pi_density(&p, x) >= 0.0);
    }

    #[test]
    fn holding_times_average_to_half_over_gamma(k in nonzero_k(), b in 0.0f64..100.0, gamma in 0.1f64..10.0) {
        // λ·π density summed over branches is 1/(2γ)·(1/1) per unit dk: λ_i π_i = 1/(4γ)
        let p = SpectralParams::new(b, gamma).unwrap();
        for i in Branch::BOTH {
            let x = ModeState::new(k, i).unwrap();
            let prod = lambda_holding(&p, x).unwrap() * pi_density(&p, x);
            prop_assert!((prod * 4.0 * gamma - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn roots_satisfy_their_relation(r in 1e-6f64..1e6, b in 0.0f64..1e4, gamma in 0.1f64..10.0) {
        for br in RootBranch::BOTH {
            let (x, dx) = solve_x(br, b, gamma, r).unwrap();
            prop_assert!(x > 0.0 && dx < 0.0);
            prop_assert!(root_residual(br, b, gamma, r, x) < 1e-12);
        }
    }

    #[test]
    fn tails_decrease_in_r(r in 1e-3f64..1e3, factor in 1.01f64..10.0, delta in 0.0f64..1.0) {
        let p = SpectralParams::scaled(1.0, 1.0, delta, 1e3).unwrap();
        let a = tail_exact(&p, r).unwrap();
        let b = tail_exact(&p, r * factor).unwrap();
        prop_assert!(b <= a && a <= 0.5);
    }

    #[test]
    fn exponent_is_even_nonpositive_and_vanishes_at_zero(theta in 1e-3f64..50.0, reg in regime(), b in 0.2f64..5.0) {
        let e = levy_exponent(LevyMeasureSpec::new(reg, b, 1.0, JumpScale::Model, TauMoment::TailExponent).unwrap());
        let v = e.eval(theta).unwrap();
        prop_assert!(v <= 0.0);
        prop_assert_eq!(v, e.eval(-theta).unwrap());
        prop_assert_eq!(e.eval(0.0).unwrap(), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn evolution_is_a_mass_preserving_semigroup(t1 in 0.0f64..1.0, t2 in 0.0f64..1.0, reg in regime()) {
        let e = levy_exponent(LevyMeasureSpec::new(reg, 1.0, 1.0, JumpScale::Model, TauMoment::TailExponent).unwrap());
        let p0 = init_profile(ProfileKind::Gaussian { sigma: 1.0 }, 32.0, 1024).unwrap();
        let direct = evolve(&p0, &e, t1 + t2).unwrap();
        let stepped = evolve(&evolve(&p0, &e, t1).unwrap(), &e, t2).unwrap();
        let diff = direct.values.iter().zip(&stepped.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-12);
        prop_assert!((direct.mass() - p0.mass()).abs() < 1e-10 * p0.mass());
    }
}
