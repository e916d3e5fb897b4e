//! Tail constants, Lévy exponents and a small Monte-Carlo check in the three
//! field-scaling regimes.

use kinetic_levy::experiments::{charfn_convergence, CharfnOptions, ExperimentConfig};
use kinetic_levy::tail_analysis::{scaled_tail_limit, TailTheory};

fn main() -> kinetic_levy::Result<()> {
    for delta in [0.25, 0.5, 0.75] {
        let tails = scaled_tail_limit(1.0, 1.0, delta, &[0.5, 1.0, 2.0], &[1e6], TailTheory::Scaled(4.0))?;
        println!("delta = {delta}: alpha = {:.4}", tails.alpha);
        for row in &tails.rows {
            println!("  r = {:<4} N^a tail = {:.6}  limit = {:.6}", row.r, row.scaled, row.theory);
        }
        let cfg = ExperimentConfig::new(1.0, 1.0, delta, vec![1e3], 1.0, 2000, 1);
        let rep = charfn_convergence(&cfg, &CharfnOptions { thetas: vec![1.0], pre_time_change: false })?;
        for row in &rep.rows {
            println!("  E exp(i(Z-u)) = {:.4}{:+.4}i  vs  exp(t Phi) = {:.4}", row.estimate, row.estimate_im, row.theory);
        }
    }
    Ok(())
}
