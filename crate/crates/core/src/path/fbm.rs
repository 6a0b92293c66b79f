//! Exact-covariance fractional Gaussian noise.
//!
//! Primary route is circulant embedding (Davies–Harte): the fGn covariance
//! is embedded in a circulant matrix whose eigenvalues come from one FFT,
//! giving O(n log n) sampling with the exact covariance. When the embedding
//! is not positive semidefinite (numerically possible for H near 1 at small
//! n), a dense Cholesky factorization of the covariance matrix is used for
//! grids up to `DENSE_FALLBACK_LIMIT`.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

const DENSE_FALLBACK_LIMIT: usize = 1 << 12;
/// Relative slack on the smallest circulant eigenvalue before declaring the
/// embedding indefinite.
const EIGENVALUE_TOLERANCE: f64 = 1e-10;

/// Autocovariance of unit-spacing fGn at lag `k`:
/// `0.5 (|k-1|^{2H} - 2 |k|^{2H} + |k+1|^{2H})`.
fn autocovariance(hurst: f64, k: usize) -> f64 {
    let k = k as f64;
    let two_h = 2.0 * hurst;
    0.5 * ((k - 1.0).abs().powf(two_h) - 2.0 * k.powf(two_h) + (k + 1.0).powf(two_h))
}

/// Draw `n` unit-spacing fGn increments, deterministic in `seed`.
pub fn fractional_gaussian_noise(hurst: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    if n == 1 {
        let z: f64 = StandardNormal.sample(&mut rng);
        return Ok(vec![z]);
    }
    match circulant_embedding(hurst, n, &mut rng) {
        Some(sample) => Ok(sample),
        None => {
            if n <= DENSE_FALLBACK_LIMIT {
                // Fresh stream so the fallback is deterministic regardless of
                // how many draws the failed attempt consumed.
                let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
                dense_cholesky(hurst, n, &mut rng)
            } else {
                Err(Error::EmbeddingFailed { hurst, n })
            }
        }
    }
}

/// Davies–Harte sampler. Returns `None` when the circulant eigenvalues are
/// materially negative.
fn circulant_embedding(hurst: f64, n: usize, rng: &mut ChaCha12Rng) -> Option<Vec<f64>> {
    let m = 2 * n;
    // First row of the circulant embedding: gamma(0..n) then gamma(n-1..1).
    let mut row: Vec<Complex<f64>> = Vec::with_capacity(m);
    for k in 0..=n {
        row.push(Complex::new(autocovariance(hurst, k), 0.0));
    }
    for k in (1..n).rev() {
        row.push(Complex::new(autocovariance(hurst, k), 0.0));
    }
    debug_assert_eq!(row.len(), m);

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);
    let eigenvalues: Vec<f64> = row.iter().map(|c| c.re).collect();
    let max_eig = eigenvalues.iter().cloned().fold(0.0, f64::max);
    if eigenvalues
        .iter()
        .any(|&l| l < -EIGENVALUE_TOLERANCE * max_eig)
    {
        return None;
    }

    // Hermitian-symmetric Gaussian spectrum with E|W_k|^2 = lambda_k.
    let mut spectrum = vec![Complex::new(0.0, 0.0); m];
    let l0 = eigenvalues[0].max(0.0);
    let z0: f64 = StandardNormal.sample(rng);
    spectrum[0] = Complex::new(l0.sqrt() * z0, 0.0);
    for k in 1..n {
        let half = (eigenvalues[k].max(0.0) / 2.0).sqrt();
        let u: f64 = StandardNormal.sample(rng);
        let v: f64 = StandardNormal.sample(rng);
        spectrum[k] = Complex::new(half * u, half * v);
        spectrum[m - k] = spectrum[k].conj();
    }
    let ln_ = eigenvalues[n].max(0.0);
    let zn: f64 = StandardNormal.sample(rng);
    spectrum[n] = Complex::new(ln_.sqrt() * zn, 0.0);

    let fft = planner.plan_fft_forward(m);
    fft.process(&mut spectrum);
    let scale = 1.0 / (m as f64).sqrt();
    Some(spectrum[..n].iter().map(|c| c.re * scale).collect())
}

/// Dense route: Cholesky factor of the Toeplitz fGn covariance applied to an
/// iid Gaussian vector. O(n^3); only used for small grids.
fn dense_cholesky(hurst: f64, n: usize, rng: &mut ChaCha12Rng) -> Result<Vec<f64>> {
    let cov: Vec<f64> = (0..n).map(|k| autocovariance(hurst, k)).collect();
    // Lower-triangular factor, row-major packed.
    let mut l = vec![0.0f64; n * (n + 1) / 2];
    let idx = |i: usize, j: usize| i * (i + 1) / 2 + j;
    for i in 0..n {
        for j in 0..=i {
            let mut sum = cov[i - j];
            for k in 0..j {
                sum -= l[idx(i, k)] * l[idx(j, k)];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::EmbeddingFailed { hurst, n });
                }
                l[idx(i, j)] = sum.sqrt();
            } else {
                l[idx(i, j)] = sum / l[idx(j, j)];
            }
        }
    }
    let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let mut out = vec![0.0f64; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..=i {
            acc += l[idx(i, j)] * z[j];
        }
        out[i] = acc;
    }
    Ok(out)
}
