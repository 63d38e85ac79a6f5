//! Random matrix generators shared by unit tests.

use crate::qmat::CMat;
use crate::rng::{gaussian_vector, stream_rng};

/// Random Hermitian matrix with Gaussian entries, deterministic in `seed`.
pub(crate) fn random_hermitian(dim: usize, seed: u64) -> CMat {
    let mut rng = stream_rng(seed, 0);
    let g = gaussian_vector(&mut rng, dim * dim);
    let raw = CMat::from_fn(dim, dim, |i, j| g[i * dim + j]);
    let dag = raw.dagger();
    (&raw + &dag).scale(0.5.into())
}

/// Random PSD matrix of rank at most `rank`, deterministic in `seed`.
pub(crate) fn random_psd(dim: usize, rank: usize, seed: u64) -> CMat {
    let mut rng = stream_rng(seed, 0);
    let mut out = CMat::zeros(dim, dim);
    for _ in 0..rank {
        let v = gaussian_vector(&mut rng, dim);
        out = &out + &CMat::outer(&v, &v);
    }
    out
}
