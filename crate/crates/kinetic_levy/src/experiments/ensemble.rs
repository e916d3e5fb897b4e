use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// The RNG of one trajectory: the master seed selects the key, `stream` the
/// ChaCha stream, so trajectories are independent of each other and of the
/// worker count.
pub fn trajectory_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f(index, rng)` for `count` trajectories in parallel and returns the
/// results in index order.
pub fn ensemble_map<T, F>(seed: u64, stream_base: u64, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync + Send,
{
    (0..count)
        .into_par_iter()
        .map(|m| {
            let mut rng = trajectory_rng(seed, stream_base + m as u64);
            f(m, &mut rng)
        })
        .collect()
}

/// First stream of sub-experiment `local` at N-index `n_index`; trajectory m
/// then uses stream `base + m` (m < 2³²).
pub(crate) fn stream_base(n_index: usize, local: u64) -> u64 {
    debug_assert!(n_index < 256 && local < 1 << 24);
    ((n_index as u64) << 56) | (local << 32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn results_are_ordered_and_reproducible() {
        let a = ensemble_map(7, 0, 100, |m, rng| (m, rng.random::<u64>()));
        let b = ensemble_map(7, 0, 100, |m, rng| (m, rng.random::<u64>()));
        assert_eq!(a, b);
        assert!(a.iter().enumerate().all(|(i, (m, _))| i == *m));
        let c = ensemble_map(8, 0, 100, |_, rng| rng.random::<u64>());
        assert_ne!(a[0].1, c[0]);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let d = pool.install(|| ensemble_map(7, 0, 100, |m, rng| (m, rng.random::<u64>())));
        assert_eq!(a, d);
    }
}
