//! Uniform periodic grids centred on the origin.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angular wavenumbers of an `n`-point periodic grid of length `length`, in FFT order.
pub fn wavenumbers(n: usize, length: f64) -> Vec<f64> {
    let dk = 2.0 * PI / length;
    (0..n)
        .map(|j| {
            let m = if j < n.div_ceil(2) { j as i64 } else { j as i64 - n as i64 };
            dk * m as f64
        })
        .collect()
}

/// A periodic 1D grid on `[-L/2, L/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1 {
    pub n: usize,
    pub length: f64,
}

impl Grid1 {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 2 || !(length.is_finite() && length > 0.0) {
            return Err(Error::domain(format!("grid needs n >= 2 and L > 0 (got n = {n}, L = {length})")));
        }
        Ok(Self { n, length })
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        wavenumbers(self.n, self.length)
    }

    /// Minimum-image distance between two grid coordinates.
    pub fn periodic_delta(&self, a: f64, b: f64) -> f64 {
        let d = a - b;
        d - self.length * (d / self.length).round()
    }
}

/// A square periodic 2D grid on `[-L/2, L/2)^2`, stored row-major (`y1` slow, `y2` fast).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub n: usize,
    pub length: f64,
}

impl Grid2 {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        Grid1::new(n, length)?;
        Ok(Self { n, length })
    }

    pub fn axis(&self) -> Grid1 {
        Grid1 { n: self.n, length: self.length }
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing() * self.spacing()
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn point(&self, idx: usize) -> [f64; 2] {
        let a = self.axis();
        [a.point(idx / self.n), a.point(idx % self.n)]
    }

    /// The same lattice with every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { n: self.n, length: self.length * factor }
    }

    /// `|k|^2` for every Fourier mode in storage order.
    pub fn k_squared(&self) -> Vec<f64> {
        let k = self.axis().wavenumbers();
        let mut out = Vec::with_capacity(self.len());
        for k1 in &k {
            for k2 in &k {
                out.push(k1 * k1 + k2 * k2);
            }
        }
        out
    }
}

/// A periodic 3D grid: `nx` points along the longitudinal axis and an `ny x ny`
/// transverse square. Storage is row-major with `x` slowest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub x: Grid1,
    pub y: Grid2,
}

impl Grid3 {
    pub fn new(x: Grid1, y: Grid2) -> Self {
        Self { x, y }
    }

    pub fn len(&self) -> usize {
        self.x.n * self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.x.n, self.y.n, self.y.n]
    }

    pub fn spacings(&self) -> [f64; 3] {
        [self.x.spacing(), self.y.spacing(), self.y.spacing()]
    }

    pub fn cell_volume(&self) -> f64 {
        self.x.spacing() * self.y.cell_area()
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let slab = self.y.len();
        let [y1, y2] = self.y.point(idx % slab);
        [self.x.point(idx / slab), y1, y2]
    }

    pub fn k_squared(&self) -> Vec<f64> {
        let kx = self.x.wavenumbers();
        let ky = self.y.k_squared();
        let mut out = Vec::with_capacity(self.len());
        for k in &kx {
            out.extend(ky.iter().map(|q| k * k + q));
        }
        out
    }
}
