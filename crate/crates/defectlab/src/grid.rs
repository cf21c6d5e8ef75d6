//! One-dimensional uniform grids.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid end must exceed start (got [{0}, {1}])")]
    EmptyExtent(f64, f64),
    #[error("grid needs at least 8 points (got {0})")]
    TooFew(usize),
}

/// Uniform grid on `[start, end]`. Periodic grids sample `n_points` cells of
/// the period (the endpoint is identified with the start); open grids sample
/// both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub start: f64,
    pub end: f64,
    pub n_points: usize,
    pub periodic: bool,
}

impl Grid1D {
    pub fn open(start: f64, end: f64, n_points: usize) -> Result<Self, GridError> {
        Self::new(start, end, n_points, false)
    }

    pub fn periodic(start: f64, end: f64, n_points: usize) -> Result<Self, GridError> {
        Self::new(start, end, n_points, true)
    }

    fn new(start: f64, end: f64, n_points: usize, periodic: bool) -> Result<Self, GridError> {
        if end <= start {
            return Err(GridError::EmptyExtent(start, end));
        }
        if n_points < 8 {
            return Err(GridError::TooFew(n_points));
        }
        Ok(Grid1D {
            start,
            end,
            n_points,
            periodic,
        })
    }

    pub fn spacing(&self) -> f64 {
        if self.periodic {
            (self.end - self.start) / self.n_points as f64
        } else {
            (self.end - self.start) / (self.n_points - 1) as f64
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }

    pub fn extent(&self) -> f64 {
        self.end - self.start
    }
}
