//! Field containers on a [`DiskGrid`](crate::grid::DiskGrid): scalar and
//! 2-vector node data, 2×2 tensor node data, and the boundary height function.

use crate::error::{Error, Result};
use crate::grid::DiskGrid;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: Arc<DiskGrid>,
    pub data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Arc<DiskGrid>) -> Self {
        let data = vec![0.0; grid.n_nodes()];
        Self { grid, data }
    }

    pub fn from_fn(grid: Arc<DiskGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.n_nodes());
        for i in 0..grid.n_r {
            for j in 0..grid.n_theta {
                data.push(f(grid.r[i], grid.theta[j]));
            }
        }
        Self { grid, data }
    }

    #[inline]
    pub fn at(&self, i_r: usize, i_theta: usize) -> f64 {
        self.data[self.grid.idx(i_r, i_theta)]
    }

    #[inline]
    pub fn at_mut(&mut self, i_r: usize, i_theta: usize) -> &mut f64 {
        let k = self.grid.idx(i_r, i_theta);
        &mut self.data[k]
    }

    pub fn boundary_ring(&self) -> &[f64] {
        let start = self.grid.idx(self.grid.boundary_ring(), 0);
        &self.data[start..start + self.grid.n_theta]
    }

    pub fn l2(&self) -> f64 {
        self.grid.l2_norm(&self.data)
    }

    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.data.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add_scaled(&mut self, c: f64, other: &Self) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn check_same_grid(&self, grid: &DiskGrid) -> Result<()> {
        if !self.grid.same_layout(grid) {
            return Err(Error::Shape(
                "field is defined on a different grid layout".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct VectorField {
    pub grid: Arc<DiskGrid>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl VectorField {
    pub fn zeros(grid: Arc<DiskGrid>) -> Self {
        let n = grid.n_nodes();
        Self {
            grid,
            x: vec![0.0; n],
            y: vec![0.0; n],
        }
    }

    #[inline]
    pub fn at(&self, i_r: usize, i_theta: usize) -> (f64, f64) {
        let k = self.grid.idx(i_r, i_theta);
        (self.x[k], self.y[k])
    }

    pub fn max_abs(&self) -> f64 {
        self.x
            .iter()
            .zip(&self.y)
            .fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)))
    }
}

/// 2×2 tensor per node, components indexed (row, col) in Cartesian frame.
#[derive(Debug, Clone)]
pub struct TensorField {
    pub grid: Arc<DiskGrid>,
    pub xx: Vec<f64>,
    pub xy: Vec<f64>,
    pub yx: Vec<f64>,
    pub yy: Vec<f64>,
}

impl TensorField {
    pub fn zeros(grid: Arc<DiskGrid>) -> Self {
        let n = grid.n_nodes();
        Self {
            grid,
            xx: vec![0.0; n],
            xy: vec![0.0; n],
            yx: vec![0.0; n],
            yy: vec![0.0; n],
        }
    }

    pub fn identity(grid: Arc<DiskGrid>) -> Self {
        let n = grid.n_nodes();
        Self {
            grid,
            xx: vec![1.0; n],
            xy: vec![0.0; n],
            yx: vec![0.0; n],
            yy: vec![1.0; n],
        }
    }

    #[inline]
    pub fn at(&self, k: usize) -> [[f64; 2]; 2] {
        [[self.xx[k], self.xy[k]], [self.yx[k], self.yy[k]]]
    }

    /// max over nodes of the max-abs entry of (self - Id).
    pub fn deviation_from_identity(&self) -> f64 {
        let mut m = 0.0_f64;
        for k in 0..self.xx.len() {
            m = m
                .max((self.xx[k] - 1.0).abs())
                .max(self.xy[k].abs())
                .max(self.yx[k].abs())
                .max((self.yy[k] - 1.0).abs());
        }
        m
    }
}

/// Signed radial height of the free boundary over the unit circle.
#[derive(Debug, Clone)]
pub struct HeightField {
    /// h(θ_j) on the angular grid.
    pub values: Vec<f64>,
    pub t: f64,
}

impl HeightField {
    pub fn zeros(n_theta: usize) -> Self {
        Self {
            values: vec![0.0; n_theta],
            t: 0.0,
        }
    }

    pub fn from_fn(n_theta: usize, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..n_theta)
            .map(|j| f(2.0 * std::f64::consts::PI * j as f64 / n_theta as f64))
            .collect();
        Self { values, t: 0.0 }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// 1 + min h, the distance of the graph from the origin at its closest.
    pub fn graph_margin(&self) -> f64 {
        1.0 + self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// Enforce the graph condition 1 + h >= floor.
    pub fn check_graph(&self, floor: f64) -> Result<()> {
        let margin = self.graph_margin();
        if margin < floor {
            return Err(Error::Geometry(format!(
                "height field violates the graph condition: 1 + min h = {margin:.3e} < {floor}"
            )));
        }
        Ok(())
    }

    /// |Ω(t)| = ½ ∫ (1+h)² dθ for the region enclosed by the graph.
    pub fn enclosed_area(&self) -> f64 {
        let n = self.values.len() as f64;
        let dth = 2.0 * std::f64::consts::PI / n;
        0.5 * self
            .values
            .iter()
            .map(|h| (1.0 + h) * (1.0 + h))
            .sum::<f64>()
            * dth
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn enclosed_area_of_circle() {
        let h = HeightField::zeros(64);
        assert!((h.enclosed_area() - PI).abs() < 1e-12);
        let h2 = HeightField {
            values: vec![0.1; 64],
            t: 0.0,
        };
        assert!((h2.enclosed_area() - PI * 1.1 * 1.1).abs() < 1e-12);
    }

    #[test]
    fn graph_condition() {
        let mut h = HeightField::zeros(32);
        assert!(h.check_graph(0.2).is_ok());
        h.values[3] = -0.95;
        assert!(h.check_graph(0.2).is_err());
    }
}
