//! Multi-dimensional complex FFT on row-major arrays, one axis at a time.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::par;

/// Smallest integer ≥ `n` whose only prime factors are 2, 3 and 5.
pub fn next_smooth(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for f in [2, 3, 5] {
            while r.is_multiple_of(f) {
                r /= f;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

pub struct FftNd {
    dims: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftNd").field("dims", &self.dims).finish()
    }
}

impl FftNd {
    pub fn new(dims: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            dims: dims.to_vec(),
            forward: dims.iter().map(|&d| planner.plan_fft_forward(d)).collect(),
            inverse: dims.iter().map(|&d| planner.plan_fft_inverse(d)).collect(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized forward transform, Σ_j x_j e^{−2πi jk/M} per axis.
    pub fn forward(&self, data: &mut [Complex64]) {
        for axis in 0..self.dims.len() {
            self.axis_pass(data, axis, &self.forward[axis]);
        }
    }

    /// Unnormalized inverse transform (no 1/M factor).
    pub fn inverse(&self, data: &mut [Complex64]) {
        for axis in 0..self.dims.len() {
            self.axis_pass(data, axis, &self.inverse[axis]);
        }
    }

    fn axis_pass(&self, data: &mut [Complex64], axis: usize, plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.len());
        let len = self.dims[axis];
        let stride: usize = self.dims[axis + 1..].iter().product();
        if stride == 1 {
            par::for_each_chunk_mut(data, len, |_, line| {
                let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
                plan.process_with_scratch(line, &mut scratch);
            });
            return;
        }
        // Gather every line into contiguous storage, transform, scatter back.
        let block = len * stride;
        let mut lines = vec![Complex64::default(); data.len()];
        {
            let src: &[Complex64] = data;
            par::for_each_chunk_mut(&mut lines, len, |start, line| {
                let l = start / len;
                let base = (l / stride) * block + l % stride;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = src[base + k * stride];
                }
                let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
                plan.process_with_scratch(line, &mut scratch);
            });
        }
        let lines = &lines;
        par::for_each_chunk_mut(data, par::CHUNK, |start, out| {
            for (off, slot) in out.iter_mut().enumerate() {
                let idx = start + off;
                let (o, rem) = (idx / block, idx % block);
                let (k, j) = (rem / stride, rem % stride);
                *slot = lines[(o * stride + j) * len + k];
            }
        });
    }
}
