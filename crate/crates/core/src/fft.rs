//! Axis-wise complex FFTs on row-major N-dimensional arrays.
//!
//! Forward transforms are unnormalised; `inverse` divides by the total size.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Lines handed to one rayon task at a time.
const LINES_PER_TASK: usize = 64;

#[derive(Clone)]
struct AxisPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

#[derive(Clone)]
pub struct FftN {
    dims: Vec<usize>,
    plans: Vec<AxisPlan>,
}

impl std::fmt::Debug for FftN {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftN").field("dims", &self.dims).finish()
    }
}

impl FftN {
    pub fn new(dims: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        let plans = dims
            .iter()
            .map(|&n| AxisPlan { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) })
            .collect();
        Self { dims: dims.to_vec(), plans }
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

    pub fn forward(&self, data: &mut [Complex64]) {
        for axis in 0..self.dims.len() {
            self.axis(data, axis, true);
        }
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        for axis in 0..self.dims.len() {
            self.axis(data, axis, false);
        }
        let s = 1.0 / self.len() as f64;
        data.par_iter_mut().for_each(|z| *z *= s);
    }

    /// Forward transform, pointwise multiply by `multiplier`, inverse transform.
    pub fn apply_multiplier(&self, data: &mut [Complex64], multiplier: &[Complex64]) {
        self.forward(data);
        data.par_iter_mut().zip(multiplier.par_iter()).for_each(|(z, m)| *z *= m);
        self.inverse(data);
    }

    /// As [`apply_multiplier`](Self::apply_multiplier) with a real multiplier.
    pub fn apply_real_multiplier(&self, data: &mut [Complex64], multiplier: &[f64]) {
        self.forward(data);
        data.par_iter_mut().zip(multiplier.par_iter()).for_each(|(z, m)| *z *= m);
        self.inverse(data);
    }

    fn axis(&self, data: &mut [Complex64], axis: usize, forward: bool) {
        assert_eq!(data.len(), self.len(), "FFT buffer does not match plan dimensions");
        let n = self.dims[axis];
        if n == 1 {
            return;
        }
        let plan = if forward { &self.plans[axis].forward } else { &self.plans[axis].inverse };
        let inner: usize = self.dims[axis + 1..].iter().product();
        if inner == 1 {
            data.par_chunks_mut(n * LINES_PER_TASK).for_each(|c| plan.process(c));
            return;
        }
        let block = n * inner;
        let mut lines = vec![Complex64::default(); data.len()];
        for (src, dst) in data.chunks(block).zip(lines.chunks_mut(block)) {
            for j in 0..n {
                for i in 0..inner {
                    dst[i * n + j] = src[j * inner + i];
                }
            }
        }
        lines.par_chunks_mut(n * LINES_PER_TASK).for_each(|c| plan.process(c));
        for (dst, src) in data.chunks_mut(block).zip(lines.chunks(block)) {
            for j in 0..n {
                for i in 0..inner {
                    dst[j * inner + i] = src[i * n + j];
                }
            }
        }
    }
}
