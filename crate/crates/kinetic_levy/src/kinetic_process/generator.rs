use crate::error::{Error, Result};
use crate::numerics::Quadrature;
use crate::spectral::{mode_data, scattering_r, theta_sq_raw, Branch, ModeState, SpectralParams};

fn quadrature() -> Quadrature {
    Quadrature::absolute(1e-10).with_max_intervals(2000)
}

fn check_state(state: ModeState) -> Result<()> {
    if state.k == 0.0 {
        return Err(Error::Singularity("generator evaluated at k = 0".into()));
    }
    Ok(())
}

/// `Σ_j ∫ θ²_i(k) R(k,k') θ²_j(k') [J_j(u,k') − J_i(u,k)] dk'`.
pub fn apply_collision<J: Fn(f64, f64, Branch) -> f64>(
    params: &SpectralParams,
    j: J,
    u: f64,
    k: f64,
    i: Branch,
) -> Result<f64> {
    let b = params.b_eff();
    if k == 0.0 {
        return Ok(0.0);
    }
    let th_i = theta_sq_raw(b, k, i);
    let here = j(u, k, i);
    let mut total = 0.0;
    for jb in Branch::BOTH {
        let est = quadrature().integrate_breaks(
            |k2| {
                if k2 == 0.0 {
                    return 0.0;
                }
                th_i * scattering_r(k, k2) * theta_sq_raw(b, k2, jb) * (j(u, k2, jb) - here)
            },
            &[-0.5, 0.0, 0.5],
        )?;
        total += est.value;
    }
    Ok(total)
}

/// ℒ_B f(k, i) by quadrature of the scattering integral: `ℒ_B = γ·C_B`
/// acting in the mode variables.
pub fn apply_generator<F: Fn(f64, Branch) -> f64>(params: &SpectralParams, f: F, state: ModeState) -> Result<f64> {
    check_state(state)?;
    Ok(params.gamma * apply_collision(params, |_, k, i| f(k, i), 0.0, state.k, state.branch)?)
}

/// `⟨f⟩_π` by quadrature.
pub fn pi_average<F: Fn(f64, Branch) -> f64>(params: &SpectralParams, f: F) -> Result<f64> {
    let (b, gamma) = (params.b_eff(), params.gamma);
    let mut total = 0.0;
    for jb in Branch::BOTH {
        total += quadrature()
            .integrate_breaks(
                |k| {
                    if k == 0.0 {
                        0.0
                    } else {
                        mode_data(b, gamma, k, jb).pi * f(k, jb)
                    }
                },
                &[-0.5, 0.0, 0.5],
            )?
            .value;
    }
    Ok(total)
}

/// The same operator in the reduced form `λ(k,i)^{-1}(⟨f⟩_π − f(k,i))`.
pub fn generator_reduced<F: Fn(f64, Branch) -> f64>(params: &SpectralParams, f: F, state: ModeState) -> Result<f64> {
    check_state(state)?;
    let lambda = mode_data(params.b_eff(), params.gamma, state.k, state.branch).lambda;
    let avg = pi_average(params, &f)?;
    Ok((avg - f(state.k, state.branch)) / lambda)
}
