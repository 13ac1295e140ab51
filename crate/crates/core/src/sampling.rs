//! Seeded random generation: per-sample seeds, Gaussian matrices, Haar frames.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type SampleRng = ChaCha8Rng;

/// Seed for sample `index` of a campaign started with `seed`.
///
/// SplitMix64 finalizer over the pair, so neighbouring indices give unrelated streams.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64, index: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, index))
}

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut SampleRng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut SampleRng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn gaussian_vector(len: usize, rng: &mut SampleRng) -> DVector<f64> {
    DVector::from_fn(len, |_, _| gaussian(rng))
}

/// Symmetric matrix with independent `N(0, scale²)` entries on and above the diagonal.
pub fn gaussian_symmetric(size: usize, scale: f64, rng: &mut SampleRng) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(size, size);
    for i in 0..size {
        for j in i..size {
            let v = scale * gaussian(rng);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

pub fn unit_vector(n: usize, rng: &mut SampleRng) -> DVector<f64> {
    loop {
        let v = gaussian_vector(n, rng);
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of `diag(R)` folded into `Q`.
pub fn haar_orthogonal(n: usize, rng: &mut SampleRng) -> DMatrix<f64> {
    let qr = gaussian_matrix(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Re-orthonormalizes the columns of `m` (Gram-Schmidt via QR, sign-preserving).
pub fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let qr = m.clone().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Small random rotation `Q ≈ exp(step·K)` for a Gaussian skew `K`, applied on the right.
pub fn perturb_frame(frame: &DMatrix<f64>, step: f64, rng: &mut SampleRng) -> DMatrix<f64> {
    let n = frame.nrows();
    let g = gaussian_matrix(n, n, rng);
    let skew = (&g - g.transpose()) * (0.5 * step);
    orthonormalize(&((DMatrix::identity(n, n) + skew) * frame))
}

/// Orthonormalizes the `k` columns of the column-major `n x k` buffer in place
/// (modified Gram-Schmidt). Returns `false` on a numerically dependent column.
pub fn gram_schmidt(n: usize, k: usize, buf: &mut [f64]) -> bool {
    for c in 0..k {
        let (done, rest) = buf.split_at_mut(c * n);
        let col = &mut rest[..n];
        for p in 0..c {
            let prev = &done[p * n..(p + 1) * n];
            let dot: f64 = prev.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
            col.iter_mut().zip(prev).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-10 {
            return false;
        }
        col.iter_mut().for_each(|x| *x /= norm);
    }
    true
}

/// Fills `buf` with a Haar-distributed orthonormal `k`-frame in `R^n` (column-major).
pub fn random_frame_into(n: usize, k: usize, rng: &mut SampleRng, buf: &mut [f64]) {
    loop {
        buf[..n * k].iter_mut().for_each(|x| *x = gaussian(rng));
        if gram_schmidt(n, k, &mut buf[..n * k]) {
            return;
        }
    }
}

/// Budget for a sampled minimization over orthonormal `k`-frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct FrameSearch {
    /// Haar frames drawn in the global phase.
    pub samples: usize,
    /// Best global samples used as hill-climbing starts.
    pub starts: usize,
    /// Proposals per start in the local phase.
    pub steps: usize,
}

impl Default for FrameSearch {
    fn default() -> Self {
        FrameSearch {
            samples: 2000,
            starts: 3,
            steps: 200,
        }
    }
}

/// Smallest objective value found, with the column-major frame attaining it.
#[derive(Debug, Clone)]
pub struct SampledMinimum {
    pub value: f64,
    pub frame: Vec<f64>,
    pub evaluations: usize,
}

/// Random search over Haar `k`-frames followed by a shrinking-step local
/// search from the best few samples. An estimate from above, never a proof.
pub fn sampled_frame_minimum(
    n: usize,
    k: usize,
    search: FrameSearch,
    rng: &mut SampleRng,
    objective: impl Fn(&[f64]) -> f64,
) -> SampledMinimum {
    let len = n * k;
    let mut buf = vec![0.0; len];
    let starts = search.starts.max(1);
    // Sorted ascending by value, at most `starts` entries.
    let mut best: Vec<(f64, Vec<f64>)> = Vec::with_capacity(starts + 1);
    let mut evaluations = 0;
    for _ in 0..search.samples.max(1) {
        random_frame_into(n, k, rng, &mut buf);
        let v = objective(&buf);
        evaluations += 1;
        if best.len() < starts || v < best[best.len() - 1].0 {
            let pos = best.partition_point(|e| e.0 <= v);
            best.insert(pos, (v, buf.clone()));
            best.truncate(starts);
        }
    }
    let mut trial = vec![0.0; len];
    for (value, frame) in best.iter_mut() {
        let mut step = 0.1;
        let mut rejects = 0;
        for _ in 0..search.steps {
            for (t, f) in trial.iter_mut().zip(frame.iter()) {
                *t = f + step * gaussian(rng);
            }
            if !gram_schmidt(n, k, &mut trial) {
                continue;
            }
            let v = objective(&trial);
            evaluations += 1;
            if v < *value {
                *value = v;
                frame.copy_from_slice(&trial);
                rejects = 0;
            } else {
                rejects += 1;
                if rejects >= 8 {
                    step *= 0.5;
                    rejects = 0;
                    if step < 1e-8 {
                        break;
                    }
                }
            }
        }
    }
    let (value, frame) = best
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one sample");
    SampledMinimum {
        value,
        frame,
        evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        let mut sorted = a.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), a.len());
        assert_eq!(derive_seed(42, 7), derive_seed(42, 7));
        assert_ne!(derive_seed(42, 7), derive_seed(43, 7));
    }

    #[test]
    fn haar_is_orthogonal() {
        let mut r = rng(5);
        for n in 2..=8 {
            let q = haar_orthogonal(n, &mut r);
            let defect = (q.transpose() * &q - DMatrix::identity(n, n)).amax();
            assert!(defect < 1e-13, "n={n} defect={defect}");
        }
    }

    #[test]
    fn haar_first_column_is_roughly_uniform() {
        // The mean of the first coordinate of a Haar column vanishes and its
        // second moment is 1/n.
        let mut r = rng(11);
        let n = 4;
        let samples = 20_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..samples {
            let q = haar_orthogonal(n, &mut r);
            s1 += q[(0, 0)];
            s2 += q[(0, 0)] * q[(0, 0)];
        }
        assert!((s1 / samples as f64).abs() < 0.02);
        assert!((s2 / samples as f64 - 0.25).abs() < 0.01);
    }

    #[test]
    fn perturbation_stays_orthogonal() {
        let mut r = rng(3);
        let q = haar_orthogonal(5, &mut r);
        let p = perturb_frame(&q, 0.1, &mut r);
        assert!((p.transpose() * &p - DMatrix::identity(5, 5)).amax() < 1e-13);
        assert!((p - q).amax() < 0.5);
    }

    #[test]
    fn random_frames_are_orthonormal() {
        let mut r = rng(8);
        let mut buf = vec![0.0; 6 * 3];
        random_frame_into(6, 3, &mut r, &mut buf);
        let m = DMatrix::from_column_slice(6, 3, &buf);
        assert!((m.transpose() * &m - DMatrix::identity(3, 3)).amax() < 1e-13);
    }

    #[test]
    fn frame_search_finds_smallest_rayleigh_quotient() {
        // min over unit u of uᵀAu is the smallest eigenvalue.
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.5, 2.0, 0.5]));
        let mut r = rng(2);
        let found = sampled_frame_minimum(4, 1, FrameSearch::default(), &mut r, |u| {
            let v = DVector::from_column_slice(u);
            v.dot(&(&a * &v))
        });
        assert!((found.value + 1.5).abs() < 1e-6, "{}", found.value);
        assert!(found.value >= -1.5 - 1e-12);
    }
}
