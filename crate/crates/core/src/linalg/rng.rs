use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Matrix;

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8 with the stream id mapped onto the cipher's stream
/// counter, so distinct ids give independent sequences for the same seed
/// without any shared state.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh stream with the same seed and another id.
    pub fn sibling(&self, stream_id: u64) -> Self {
        Self::new(self.seed, stream_id)
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform draw from `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    /// Uniformly distributed point on the unit sphere of `ℝ^d`.
    pub fn unit_vector(&mut self, d: usize) -> Vec<f64> {
        loop {
            let g: Vec<f64> = (0..d).map(|_| self.normal()).collect();
            if let Some(u) = super::normalized(&g) {
                return u;
            }
        }
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// `d × k` matrix of i.i.d. standard normal entries drawn from `rng`.
pub fn gaussian_matrix(rng: &mut SeededRng, d: usize, k: usize) -> Matrix {
    let data = (0..d * k).map(|_| rng.normal()).collect();
    Matrix::from_row_major(d, k, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_stream_is_deterministic() {
        let a = gaussian_matrix(&mut SeededRng::new(42, 7), 4, 3);
        let b = gaussian_matrix(&mut SeededRng::new(42, 7), 4, 3);
        assert_eq!(a, b);
        let c = gaussian_matrix(&mut SeededRng::new(42, 8), 4, 3);
        assert_ne!(a, c);
    }

    #[test]
    fn normal_moments() {
        let n = 1_000_000;
        let mut rng = SeededRng::new(1, 0);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let g = gaussian_matrix(&mut rng, 1, 1)[(0, 0)];
            s += g;
            s2 += g * g;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        // 4σ CLT bounds: σ(mean) = 1e-3, σ(var) = √2·1e-3
        assert!(mean.abs() < 4e-3, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn distinct_streams_uncorrelated() {
        let n = 1_000_000;
        let mut a = SeededRng::new(1, 0);
        let mut b = SeededRng::new(1, 1);
        let (mut sa, mut sb, mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let (x, y) = (a.normal(), b.normal());
            sa += x;
            sb += y;
            sab += x * y;
            saa += x * x;
            sbb += y * y;
        }
        let nf = n as f64;
        let cov = sab / nf - sa / nf * sb / nf;
        let rho = cov / ((saa / nf - (sa / nf).powi(2)) * (sbb / nf - (sb / nf).powi(2))).sqrt();
        assert!(rho.abs() < 0.01, "rho {rho}");
    }
}
