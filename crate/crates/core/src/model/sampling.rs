//! Seeded Gaussian sampling in fixed-size blocks.
//!
//! Block `b` of a run with seed `s` draws from ChaCha8 keyed by `s` on stream
//! `b`. Blocks are independent of each other and of the thread that runs
//! them, and per-block results are merged in block order, so output is
//! bit-identical for any thread count.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::StateDecomposition;

/// Samples per block.
pub const BLOCK_LEN: usize = 1 << 14;

pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Calls `per_block(rng, rows)` for every block of an `n`-sample run and
/// returns the results in block order.
pub fn map_blocks<T, F>(n: usize, seed: u64, per_block: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let blocks = n.div_ceil(BLOCK_LEN);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let rows = BLOCK_LEN.min(n - b * BLOCK_LEN);
            let mut rng = block_rng(seed, b as u64);
            per_block(&mut rng, rows)
        })
        .collect()
}

pub fn fill_standard_normal<R: Rng>(rng: &mut R, buf: &mut [f64]) {
    for x in buf.iter_mut() {
        *x = rng.sample(StandardNormal);
    }
}

/// Running sums of `v v^T` (upper triangle) for zero-mean vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondMoments {
    dim: usize,
    count: usize,
    sums: Vec<f64>,
}

impl SecondMoments {
    pub fn new(dim: usize) -> Self {
        SecondMoments {
            dim,
            count: 0,
            sums: vec![0.0; dim * dim],
        }
    }

    pub fn add(&mut self, v: &[f64]) {
        debug_assert_eq!(v.len(), self.dim);
        let d = self.dim;
        for i in 0..d {
            let vi = v[i];
            let row = &mut self.sums[i * d..(i + 1) * d];
            for j in i..d {
                row[j] += vi * v[j];
            }
        }
        self.count += 1;
    }

    pub fn merge(&mut self, other: &SecondMoments) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        self.count += other.count;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// `(1/n) sum v v^T`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let d = self.dim;
        let n = self.count as f64;
        DMatrix::from_fn(d, d, |i, j| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            self.sums[a * d + b] / n
        })
    }
}

/// Empirical second-moment matrix of `n` i.i.d. standard normal vectors of
/// length `dim`.
pub fn standard_normal_moments(dim: usize, n: usize, seed: u64) -> SecondMoments {
    let blocks = map_blocks(n, seed, |rng, rows| {
        let mut acc = SecondMoments::new(dim);
        let mut buf = vec![0.0; dim];
        for _ in 0..rows {
            fill_standard_normal(rng, &mut buf);
            acc.add(&buf);
        }
        acc
    });
    let mut total = SecondMoments::new(dim);
    for b in &blocks {
        total.merge(b);
    }
    total
}

/// `n x M` matrix of i.i.d. state draws `S = L xi`, `xi ~ N(0, I)` over the
/// decomposition's latents.
pub fn sample_states(decomp: &StateDecomposition, n: usize, seed: u64) -> DMatrix<f64> {
    let loadings = decomp.loading_matrix();
    let (m, k) = (decomp.m, decomp.latent_count());
    let blocks = map_blocks(n, seed, |rng, rows| {
        let mut out = Vec::with_capacity(rows * m);
        let mut latent = vec![0.0; k];
        for _ in 0..rows {
            fill_standard_normal(rng, &mut latent);
            for i in 0..m {
                out.push((0..k).map(|j| loadings[(i, j)] * latent[j]).sum::<f64>());
            }
        }
        out
    });
    DMatrix::from_row_slice(n, m, &blocks.concat())
}

/// Zero-mean empirical covariance `(1/n) S^T S` of the rows of `samples`.
pub fn empirical_covariance(samples: &DMatrix<f64>) -> DMatrix<f64> {
    let n = samples.nrows() as f64;
    samples.transpose() * samples / n
}
