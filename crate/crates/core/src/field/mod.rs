//! Discrete geometry: masked Cartesian grids over balls, vector and scalar
//! fields on them, finite-difference stencils, ball quadrature and sphere
//! sampling.

mod grid;
pub mod io;
mod quadrature;
mod sphere;
mod stencil;

use std::sync::Arc;

pub use grid::{CellStencil, Grid, NodeKind};
pub use quadrature::{ball_weights, cell_fraction, integrate_ball};
pub use sphere::{sample_sphere, sphere_area, sphere_directions, SphereSamples};
pub use stencil::{energy_density, gradient_at, laplacian, Gradient};

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// `m` components per node, stored node-major and component-minor.
///
/// Values on boundary nodes are the pinned Dirichlet data; exterior node
/// values are carried along but never read by the stencils.
#[derive(Clone, Debug)]
pub struct VectorField<T> {
    grid: Arc<Grid<T>>,
    m: usize,
    values: Vec<T>,
}

impl<T: Scalar> VectorField<T> {
    pub fn constant(grid: Arc<Grid<T>>, value: &[T]) -> Self {
        let m = value.len();
        let mut values = Vec::with_capacity(grid.len() * m);
        for _ in 0..grid.len() {
            values.extend_from_slice(value);
        }
        Self { grid, m, values }
    }

    /// Evaluate `f(x, out)` at every node of the cube.
    pub fn from_fn(grid: Arc<Grid<T>>, m: usize, mut f: impl FnMut(&[T], &mut [T])) -> Self {
        let n = grid.n();
        let mut values = vec![T::zero(); grid.len() * m];
        for (idx, out) in values.chunks_exact_mut(m).enumerate() {
            let x = grid.coord(idx);
            f(&x[..n], out);
        }
        Self { grid, m, values }
    }

    pub fn from_values(grid: Arc<Grid<T>>, m: usize, values: Vec<T>) -> Result<Self> {
        if m == 0 || values.len() != grid.len() * m {
            return Err(invalid(format!(
                "expected {} values for m = {m}, got {}",
                grid.len() * m,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("field values must be finite"));
        }
        Ok(Self { grid, m, values })
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn node(&self, idx: usize) -> &[T] {
        &self.values[idx * self.m..(idx + 1) * self.m]
    }

    pub fn node_mut(&mut self, idx: usize) -> &mut [T] {
        &mut self.values[idx * self.m..(idx + 1) * self.m]
    }

    /// Multilinear interpolation at `x`; `None` if a cell corner is off-mask.
    pub fn interpolate(&self, x: &[T]) -> Option<Vec<T>> {
        let st = self.grid.cell_stencil(x)?;
        let mut out = vec![T::zero(); self.m];
        for (idx, w) in st.iter() {
            for (o, &v) in out.iter_mut().zip(self.node(idx)) {
                *o += w * v;
            }
        }
        Some(out)
    }

    /// Interpolation that ignores off-mask corners; defined up to the rim of
    /// the mask.
    pub fn interpolate_masked(&self, x: &[T]) -> Option<Vec<T>> {
        let st = self.grid.masked_cell_stencil(x)?;
        let mut out = vec![T::zero(); self.m];
        for (idx, w) in st.iter() {
            for (o, &v) in out.iter_mut().zip(self.node(idx)) {
                *o += w * v;
            }
        }
        Some(out)
    }

    /// Largest difference on boundary nodes against `other`.
    pub fn boundary_deviation(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for &b in self.grid.boundary() {
            for (&x, &y) in self.node(b).iter().zip(other.node(b)) {
                worst = worst.max((x - y).abs());
            }
        }
        worst
    }

    /// Copy the values of `other` onto the boundary nodes of `self`.
    pub fn copy_boundary_from(&mut self, other: &Self) {
        for &b in self.grid.boundary() {
            let m = self.m;
            self.values[b * m..(b + 1) * m].copy_from_slice(other.node(b));
        }
    }

    /// `max |u - p|` over interior nodes.
    pub fn interior_sup_distance(&self, p: &[T]) -> T {
        self.sup_distance(self.grid.interior(), p)
    }

    pub fn boundary_sup_distance(&self, p: &[T]) -> T {
        self.sup_distance(self.grid.boundary(), p)
    }

    fn sup_distance(&self, nodes: &[usize], p: &[T]) -> T {
        nodes
            .iter()
            .map(|&i| {
                self.node(i)
                    .iter()
                    .zip(p)
                    .map(|(&x, &y)| (x - y) * (x - y))
                    .sum::<T>()
                    .sqrt()
            })
            .fold(T::zero(), T::max)
    }

    /// Sup-norm over interior nodes.
    pub fn interior_sup_norm(&self) -> T {
        self.grid
            .interior()
            .iter()
            .flat_map(|&i| self.node(i).iter())
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
    }
}

/// One real per node.
#[derive(Clone, Debug)]
pub struct ScalarField<T> {
    grid: Arc<Grid<T>>,
    values: Vec<T>,
}

impl<T: Scalar> ScalarField<T> {
    pub fn constant(grid: Arc<Grid<T>>, value: T) -> Self {
        let values = vec![value; grid.len()];
        Self { grid, values }
    }

    pub fn from_fn(grid: Arc<Grid<T>>, mut f: impl FnMut(&[T]) -> T) -> Self {
        let n = grid.n();
        let values = (0..grid.len()).map(|i| f(&grid.coord(i)[..n])).collect();
        Self { grid, values }
    }

    pub fn from_values(grid: Arc<Grid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("field values must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn interpolate(&self, x: &[T]) -> Option<T> {
        self.grid.cell_stencil(x).map(|st| st.apply(&self.values))
    }

    /// Pointwise map.
    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}
