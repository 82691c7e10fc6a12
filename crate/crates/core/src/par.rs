//! Deterministic data-parallel primitives.
//!
//! Work is split into fixed-size chunks whose boundaries never depend on the
//! number of threads. With the `parallel` feature the chunks run on rayon's
//! pool; without it they run in order on the calling thread. Partial results
//! are always combined sequentially in chunk order, so both builds produce
//! bit-identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fixed reduction block length.
pub const CHUNK: usize = 2048;

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of `f(i)` for `i in 0..len`.
pub fn sum_by<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let blocks = len.div_ceil(CHUNK);
    let partial = |b: usize| {
        let mut acc = Compensated::default();
        for i in b * CHUNK..((b + 1) * CHUNK).min(len) {
            acc.add(f(i));
        }
        acc.value()
    };
    let partials = map_collect(blocks, partial);
    let mut total = Compensated::default();
    for p in partials {
        total.add(p);
    }
    total.value()
}

/// `out[i] = f(i)`.
pub fn fill<F>(out: &mut [f64], f: F)
where
    F: Fn(usize) -> f64 + Sync,
{
    for_each_chunk_mut(out, CHUNK, |start, chunk| {
        for (k, slot) in chunk.iter_mut().enumerate() {
            *slot = f(start + k);
        }
    });
}

/// Runs `f(start_index, chunk)` over consecutive chunks of `data`.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(chunk).enumerate().for_each(|(c, piece)| f(c * chunk, piece));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(chunk).enumerate().for_each(|(c, piece)| f(c * chunk, piece));
}

/// `(0..len).map(f).collect()`, in index order.
pub fn map_collect<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(&f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Whether this build dispatches work to a thread pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        let mut acc = Compensated::default();
        for x in xs {
            acc.add(x);
        }
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn sum_by_matches_closed_form() {
        let n = 3 * CHUNK + 17;
        let s = sum_by(n, |i| i as f64);
        assert_eq!(s, (n * (n - 1) / 2) as f64);
    }

    #[test]
    fn fill_and_collect_preserve_order() {
        let mut out = vec![0.0; 5000];
        fill(&mut out, |i| (i * i) as f64);
        assert!(out.iter().enumerate().all(|(i, v)| *v == (i * i) as f64));
        let v = map_collect(10, |i| i + 1);
        assert_eq!(v, (1..=10).collect::<Vec<_>>());
    }
}
