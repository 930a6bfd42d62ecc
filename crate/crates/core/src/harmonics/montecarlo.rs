//! Seeded Monte-Carlo integration over `S^{n−1}`.
//!
//! Samples are normalized Gaussians. Work is split into fixed batches, each
//! drawing from its own ChaCha stream, so results do not depend on how many
//! threads run the batches.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::sphere::{sphere_volume, QuadratureMethod, QuadratureResult};

pub const BATCH: usize = 4096;

/// Sample mean of an integrand and its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl MeanEstimate {
    /// Absolute integral `mean · vol(S^{n−1})`.
    pub fn to_quadrature(self, n: usize) -> QuadratureResult {
        let vol = sphere_volume(n);
        QuadratureResult { value: self.mean * vol, error_estimate: self.stderr * vol, method: QuadratureMethod::MonteCarlo }
    }
}

fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    rng
}

/// A uniform point on the unit sphere.
pub fn sphere_point<R: Rng + ?Sized>(rng: &mut R, n: usize, out: &mut [f64]) {
    loop {
        let mut s = 0.0;
        for x in out.iter_mut().take(n) {
            *x = rng.sample(StandardNormal);
            s += *x * *x;
        }
        if s > 1e-300 {
            let r = s.sqrt().recip();
            out.iter_mut().for_each(|x| *x *= r);
            return;
        }
    }
}

/// `count` uniform points, row-major (`count × n`).
pub fn sphere_points(n: usize, count: usize, seed: u64) -> Vec<f64> {
    let mut out = vec![0.0; n * count];
    out.par_chunks_mut(n * BATCH).enumerate().for_each(|(b, chunk)| {
        let mut rng = batch_rng(seed, b);
        for p in chunk.chunks_mut(n) {
            sphere_point(&mut rng, n, p);
        }
    });
    out
}

/// Mean of `f` over `samples` uniform points.
pub fn mc_mean<F>(n: usize, samples: usize, seed: u64, f: F) -> MeanEstimate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let batches = samples.div_ceil(BATCH);
    let sums: Vec<(f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(seed, b);
            let len = BATCH.min(samples - b * BATCH);
            let mut x = vec![0.0; n];
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                sphere_point(&mut rng, n, &mut x);
                let y = f(&x);
                s += y;
                s2 += y * y;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let m = samples as f64;
    let mean = s / m;
    let var = if samples > 1 { ((s2 - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
    MeanEstimate { mean, stderr: (var / m).sqrt(), samples }
}

/// `∫ f dσ` with the unnormalized measure.
pub fn mc_integrate<F>(n: usize, samples: usize, seed: u64, f: F) -> QuadratureResult
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    mc_mean(n, samples, seed, f).to_quadrature(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_unit() {
        let a = sphere_points(5, 10_000, 3);
        let b = sphere_points(5, 10_000, 3);
        assert_eq!(a, b);
        for p in a.chunks(5) {
            let r: f64 = p.iter().map(|x| x * x).sum();
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn second_moment() {
        // E[x₁²] = 1/n.
        let est = mc_mean(4, 200_000, 1, |x| x[0] * x[0]);
        assert!((est.mean - 0.25).abs() < 4.0 * est.stderr);
    }
}
