//! Chunked Monte Carlo driver.
//!
//! Work is cut into fixed-size chunks; chunk `k` draws from
//! `stream.substream(k)` and the per-chunk partial results are reduced in
//! chunk order. The output is therefore bit-identical whether chunks run on
//! one thread or many.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;
use crate::rng::RngStream;

pub const DEFAULT_CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Runs chunks on the current rayon pool. Without the `parallel`
    /// feature this is the same as `Sequential`.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Chunk {
    pub index: usize,
    /// Number of samples in this chunk.
    pub len: usize,
    pub stream: RngStream,
}

pub fn chunks(total: usize, chunk_size: usize, stream: RngStream) -> Vec<Chunk> {
    assert!(chunk_size > 0);
    (0..total.div_ceil(chunk_size))
        .map(|index| Chunk {
            index,
            len: chunk_size.min(total - index * chunk_size),
            stream: stream.substream(index as u64),
        })
        .collect()
}

/// Runs `f` on every chunk and returns the results in chunk order.
pub fn map_chunks<T, F>(total: usize, chunk_size: usize, stream: RngStream, exec: Execution, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Chunk) -> Result<T> + Sync + Send,
{
    let work = chunks(total, chunk_size, stream);
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => work.into_par_iter().map(f).collect(),
        _ => work.into_iter().map(f).collect(),
    }
}

/// Streaming mean/variance (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_err(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}
