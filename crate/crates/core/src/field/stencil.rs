use rayon::prelude::*;

use super::{ScalarField, VectorField};
use crate::potential::Potential;
use crate::scalar::Scalar;

/// Standard second-order centered Laplacian, per component, on interior
/// nodes; zero elsewhere.
pub fn laplacian<T: Scalar>(f: &VectorField<T>) -> VectorField<T> {
    let grid = f.grid().clone();
    let m = f.m();
    let n = grid.n();
    let st = grid.strides();
    let inv_h2 = (grid.h() * grid.h()).recip();
    let two = T::lit(2.0);
    let src = f.values();
    let mut out = vec![T::zero(); src.len()];
    out.par_chunks_mut(m).enumerate().for_each(|(idx, o)| {
        if !grid.is_interior(idx) {
            return;
        }
        for c in 0..m {
            let centre = src[idx * m + c];
            let mut acc = T::zero();
            for &s in &st[..n] {
                acc += src[(idx - s) * m + c] + src[(idx + s) * m + c] - two * centre;
            }
            o[c] = acc * inv_h2;
        }
    });
    VectorField::from_values(grid, m, out).expect("finite stencil output")
}

/// Jacobian `du_c / dx_k` at one node, stored as `d[c * n + k]`.
#[derive(Clone, Debug)]
pub struct Gradient<T> {
    pub n: usize,
    pub m: usize,
    pub d: Vec<T>,
}

impl<T: Scalar> Gradient<T> {
    pub fn get(&self, c: usize, k: usize) -> T {
        self.d[c * self.n + k]
    }

    /// `|grad u|^2`
    pub fn norm_sq(&self) -> T {
        self.d.iter().map(|&x| x * x).sum()
    }

    /// `u_{,i} . u_{,j}`
    pub fn column_dot(&self, i: usize, j: usize) -> T {
        (0..self.m).map(|c| self.get(c, i) * self.get(c, j)).sum()
    }
}

/// Centered differences where both axis neighbors are in the mask,
/// one-sided where only one is, zero where neither is.
pub fn gradient_at<T: Scalar>(f: &VectorField<T>, idx: usize, out: &mut [T]) {
    let grid = f.grid();
    let n = grid.n();
    let m = f.m();
    let h = grid.h();
    for k in 0..n {
        let fwd = grid.neighbor(idx, k, true).filter(|&j| grid.in_mask(j));
        let bwd = grid.neighbor(idx, k, false).filter(|&j| grid.in_mask(j));
        for c in 0..m {
            out[c * n + k] = match (bwd, fwd) {
                (Some(b), Some(a)) => (f.node(a)[c] - f.node(b)[c]) / (T::lit(2.0) * h),
                (None, Some(a)) => (f.node(a)[c] - f.node(idx)[c]) / h,
                (Some(b), None) => (f.node(idx)[c] - f.node(b)[c]) / h,
                (None, None) => T::zero(),
            };
        }
    }
}

impl<T: Scalar> VectorField<T> {
    pub fn gradient(&self, idx: usize) -> Gradient<T> {
        let mut d = vec![T::zero(); self.m() * self.grid().n()];
        gradient_at(self, idx, &mut d);
        Gradient {
            n: self.grid().n(),
            m: self.m(),
            d,
        }
    }
}

/// `e(x) = |grad u|^2 / 2 + W(u)` on every mask node; zero on exterior nodes.
pub fn energy_density<T: Scalar, P: Potential<T> + ?Sized>(
    u: &VectorField<T>,
    potential: &P,
) -> ScalarField<T> {
    let grid = u.grid().clone();
    let n = grid.n();
    let m = u.m();
    let half = T::lit(0.5);
    let mut out = vec![T::zero(); grid.len()];
    out.par_iter_mut().enumerate().for_each_init(
        || vec![T::zero(); n * m],
        |buf, (idx, e)| {
            if !grid.in_mask(idx) {
                return;
            }
            gradient_at(u, idx, buf);
            let g2: T = buf.iter().map(|&x| x * x).sum();
            *e = half * g2 + potential.value(u.node(idx));
        },
    );
    ScalarField::from_values(grid, out).expect("finite energy density")
}
