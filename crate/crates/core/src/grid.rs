//! Rays and grids in the log coordinate `x = ln r`.

use serde::Serialize;

use crate::error::{Error, Result};

/// A ray `[x0, +inf)` in log coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ray {
    pub x0: f64,
}

impl Ray {
    pub fn new(x0: f64) -> Result<Self> {
        if !x0.is_finite() {
            return Err(Error::Grid(format!("ray start must be finite, got {x0}")));
        }
        Ok(Ray { x0 })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x0
    }
}

/// Uniform grid specification over `[x0, x1]` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x0: f64,
    pub x1: f64,
    pub n: usize,
}

pub const MIN_GRID_POINTS: usize = 8;

impl GridSpec {
    pub fn new(x0: f64, x1: f64, n: usize) -> Result<Self> {
        if !(x0.is_finite() && x1.is_finite()) {
            return Err(Error::Grid("grid bounds must be finite".into()));
        }
        if x0 >= x1 {
            return Err(Error::Grid(format!("need x0 < x1, got [{x0}, {x1}]")));
        }
        if n < MIN_GRID_POINTS {
            return Err(Error::Grid(format!(
                "need at least {MIN_GRID_POINTS} points, got {n}"
            )));
        }
        Ok(GridSpec { x0, x1, n })
    }

    pub fn step(&self) -> f64 {
        (self.x1 - self.x0) / (self.n - 1) as f64
    }

    pub fn ray(&self) -> Ray {
        Ray { x0: self.x0 }
    }

    /// The grid points; the last one is exactly `x1`.
    pub fn points(&self) -> Vec<f64> {
        let span = self.x1 - self.x0;
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i == self.n - 1 {
                    self.x1
                } else {
                    self.x0 + span * (i as f64 / last)
                }
            })
            .collect()
    }

    pub fn grid(&self) -> Grid {
        Grid { xs: self.points() }
    }
}

impl Default for GridSpec {
    /// `x` in `[1, 10^4]` with 4096 points.
    fn default() -> Self {
        GridSpec {
            x0: 1.0,
            x1: 1.0e4,
            n: 4096,
        }
    }
}

/// A strictly increasing set of abscissae, uniform or not.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    xs: Vec<f64>,
}

impl Grid {
    pub fn from_points(xs: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::Grid("a grid needs at least two points".into()));
        }
        if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
            return Err(Error::Grid(format!("non-finite grid point {x}")));
        }
        if let Some(w) = xs.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Grid(format!(
                "grid not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Grid { xs })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.xs[0]
    }

    pub fn last(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    /// Suffix starting at index `start`.
    pub fn suffix(&self, start: usize) -> Result<Grid> {
        Grid::from_points(self.xs[start.min(self.xs.len())..].to_vec())
    }

    /// True when consecutive steps agree to a relative `1e-9`.
    pub fn is_uniform(&self) -> bool {
        let h = (self.last() - self.first()) / (self.len() - 1) as f64;
        self.xs
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1e-300))
    }
}

impl From<GridSpec> for Grid {
    fn from(spec: GridSpec) -> Self {
        spec.grid()
    }
}
