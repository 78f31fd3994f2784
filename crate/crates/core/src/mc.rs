//! Chunked Monte Carlo with reproducible per-chunk RNG streams.
//!
//! Samples are split into fixed-size chunks; chunk `k` draws from the
//! ChaCha stream `k` of the job seed. Chunks run in parallel and are reduced
//! in index order, so results depend on (seed, chunk size) only, never on
//! the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CHUNK_SIZE: usize = 4096;

pub type McRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    #[serde(default = "default_chunk")]
    pub chunk_size: usize,
}

fn default_chunk() -> usize {
    DEFAULT_CHUNK_SIZE
}

impl McConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            chunk_size: DEFAULT_CHUNK_SIZE,
        }
    }

    pub fn with_chunk_size(mut self, chunk_size: usize) -> Self {
        self.chunk_size = chunk_size;
        self
    }
}

pub fn stream_rng(seed: u64, stream: u64) -> McRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Running sums for one estimated quantity plus its named parts.
#[derive(Debug, Clone)]
pub struct Moments<const K: usize> {
    pub n: usize,
    pub sum: f64,
    pub sum_sq: f64,
    pub parts: [f64; K],
}

impl<const K: usize> Moments<K> {
    fn new() -> Self {
        Self {
            n: 0,
            sum: 0.0,
            sum_sq: 0.0,
            parts: [0.0; K],
        }
    }

    fn push(&mut self, value: f64, parts: [f64; K]) {
        self.n += 1;
        self.sum += value;
        self.sum_sq += value * value;
        for (acc, p) in self.parts.iter_mut().zip(parts) {
            *acc += p;
        }
    }

    fn merge(&mut self, other: &Self) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        for (acc, p) in self.parts.iter_mut().zip(other.parts) {
            *acc += p;
        }
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    pub fn part_mean(&self, k: usize) -> f64 {
        self.parts[k] / self.n as f64
    }

    /// Sample standard deviation divided by √n; zero for fewer than two
    /// samples.
    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// Runs `cfg.samples` independent draws of `sample`, which returns the
/// estimated value and `K` auxiliary parts.
pub fn run<const K: usize, F>(cfg: &McConfig, sample: F) -> Result<Moments<K>>
where
    F: Fn(&mut McRng) -> Result<(f64, [f64; K])> + Sync,
{
    if cfg.samples == 0 {
        return Err(Error::InvalidParams("sample count must be positive".into()));
    }
    if cfg.chunk_size == 0 {
        return Err(Error::InvalidParams("chunk size must be positive".into()));
    }
    let chunks = cfg.samples.div_ceil(cfg.chunk_size);
    let partials: Vec<Moments<K>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(cfg.seed, k as u64);
            let len = cfg.chunk_size.min(cfg.samples - k * cfg.chunk_size);
            let mut acc = Moments::new();
            for _ in 0..len {
                let (value, parts) = sample(&mut rng)?;
                if !value.is_finite() {
                    return Err(Error::Numeric(format!("non-finite sample {value}")));
                }
                acc.push(value, parts);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = Moments::new();
    for p in &partials {
        total.merge(p);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn thread_count_does_not_change_results() {
        let cfg = McConfig::new(10_000, 42).with_chunk_size(333);
        let f = |rng: &mut McRng| Ok((rng.gen::<f64>().ln(), [rng.gen::<f64>()]));
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run(&cfg, f)).unwrap();
        let b = four.install(|| run(&cfg, f)).unwrap();
        assert_eq!(a.sum.to_bits(), b.sum.to_bits());
        assert_eq!(a.sum_sq.to_bits(), b.sum_sq.to_bits());
        assert_eq!(a.parts[0].to_bits(), b.parts[0].to_bits());
        assert_eq!(a.n, 10_000);
    }

    #[test]
    fn standard_error_of_uniforms() {
        let cfg = McConfig::new(200_000, 1);
        let m = run(&cfg, |rng: &mut McRng| Ok((rng.gen::<f64>(), []))).unwrap();
        let expected = (1.0f64 / 12.0 / 200_000.0).sqrt();
        assert!((m.std_error() / expected - 1.0).abs() < 0.01);
        assert!((m.mean() - 0.5).abs() < 4.0 * expected);
    }

    #[test]
    fn zero_samples_rejected() {
        let cfg = McConfig::new(0, 1);
        assert!(run(&cfg, |_: &mut McRng| Ok((0.0, []))).is_err());
    }
}
