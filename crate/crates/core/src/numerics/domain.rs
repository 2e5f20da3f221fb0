use serde::Serialize;

use crate::error::{Error, Result};

/// Axis-aligned box `Π [lower_k, upper_k]` with `resolution` nodes per axis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrationDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub resolution: usize,
}

impl IntegrationDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, resolution: usize) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Invalid("domain bounds must be nonempty and of equal length".into()));
        }
        if lower.iter().zip(&upper).any(|(a, b)| !a.is_finite() || !b.is_finite() || a >= b) {
            return Err(Error::Invalid("domain requires finite lower < upper on every axis".into()));
        }
        if resolution < 2 {
            return Err(Error::Invalid("domain resolution must be at least 2".into()));
        }
        Ok(IntegrationDomain { lower, upper, resolution })
    }

    /// `[0, 1]^n`.
    pub fn unit(n: usize, resolution: usize) -> Result<Self> {
        Self::new(vec![0.0; n], vec![1.0; n], resolution)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn with_resolution(&self, resolution: usize) -> Result<Self> {
        Self::new(self.lower.clone(), self.upper.clone(), resolution)
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.resolution - 1) as f64
    }

    pub fn node(&self, axis: usize, k: usize) -> f64 {
        if k + 1 == self.resolution {
            self.upper[axis]
        } else {
            self.lower[axis] + k as f64 * self.spacing(axis)
        }
    }

    pub fn num_points(&self) -> usize {
        self.resolution.pow(self.dim() as u32)
    }

    /// Multi-index of a flat grid position (axis 0 fastest).
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = Vec::with_capacity(self.dim());
        for _ in 0..self.dim() {
            idx.push(flat % self.resolution);
            flat /= self.resolution;
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unflatten(flat).iter().enumerate().map(|(a, &k)| self.node(a, k)).collect()
    }

    /// Tensor trapezoid weight of a flat grid position.
    pub fn weight(&self, flat: usize) -> f64 {
        self.unflatten(flat)
            .iter()
            .enumerate()
            .map(|(a, &k)| {
                let h = self.spacing(a);
                if k == 0 || k + 1 == self.resolution {
                    h / 2.0
                } else {
                    h
                }
            })
            .product()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.num_points()).map(|k| self.point(k)).collect()
    }

    pub fn volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(a, b)| b - a).product()
    }
}
