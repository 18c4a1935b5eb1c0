use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    /// Inside the closed ball `|x| <= R_max`; free unknowns.
    Interior,
    /// Outside the ball but axis-adjacent to an interior node; carries the
    /// pinned Dirichlet data.
    Boundary,
    Exterior,
}

/// Cube `[-L, L]^n` of equally spaced nodes, masked against the ball
/// `B_{R_max}`. Node `i` along an axis sits at `(i - half) h`. Indices are
/// row-major with the last axis fastest.
#[derive(Clone, Debug)]
pub struct Grid<T> {
    n: usize,
    h: T,
    r_max: T,
    half: usize,
    size: usize,
    kinds: Vec<NodeKind>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
}

impl<T: Scalar> Grid<T> {
    pub fn new(n: usize, h: T, r_max: T) -> Result<Self> {
        if !(2..=3).contains(&n) {
            return Err(invalid(format!("spatial dimension must be 2 or 3, got {n}")));
        }
        if !(h > T::zero()) || !h.is_finite() {
            return Err(invalid(format!("grid spacing must be positive, got {h}")));
        }
        if !(r_max > T::zero()) || !r_max.is_finite() {
            return Err(invalid(format!("outer radius must be positive, got {r_max}")));
        }
        let ratio = (r_max / h).as_f64();
        if ratio > 1.0e4 {
            return Err(invalid(format!("R_max / h = {ratio} is too large")));
        }
        let half = (ratio - 1e-9).ceil().max(0.0) as usize + 1;
        let size = 2 * half + 1;
        let total = size.pow(n as u32);
        // Classify in grid units so that nodes on the sphere land the same
        // way whatever the scalar type; the slack absorbs the rounding of
        // `r_max / h` itself.
        let slack = 1.0 + (64.0 * T::epsilon().as_f64()).max(1e-12);
        let r2 = ratio * ratio * slack;

        let mut kinds = vec![NodeKind::Exterior; total];
        let mut interior = Vec::new();
        for idx in 0..total {
            let mi = multi_index(idx, n, size);
            let d2: usize = mi[..n].iter().map(|&i| i.abs_diff(half).pow(2)).sum();
            if d2 as f64 <= r2 {
                kinds[idx] = NodeKind::Interior;
                interior.push(idx);
            }
        }

        let strides = strides(n, size);
        for &idx in &interior {
            let mi = multi_index(idx, n, size);
            for k in 0..n {
                if mi[k] == 0 || mi[k] + 1 == size {
                    return Err(Error::MaskConstruction(format!(
                        "interior node {idx} touches the edge of the cube on axis {k}"
                    )));
                }
                for nb in [idx - strides[k], idx + strides[k]] {
                    if kinds[nb] == NodeKind::Exterior {
                        kinds[nb] = NodeKind::Boundary;
                    }
                }
            }
        }
        let boundary = (0..total).filter(|&i| kinds[i] == NodeKind::Boundary).collect();

        Ok(Self {
            n,
            h,
            r_max,
            half,
            size,
            kinds,
            interior,
            boundary,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn r_max(&self) -> T {
        self.r_max
    }

    /// Nodes per axis.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn half(&self) -> usize {
        self.half
    }

    /// Total number of nodes in the cube.
    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn cell_volume(&self) -> T {
        self.h.powi(self.n as i32)
    }

    pub fn kind(&self, idx: usize) -> NodeKind {
        self.kinds[idx]
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    pub fn in_mask(&self, idx: usize) -> bool {
        self.kinds[idx] != NodeKind::Exterior
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        self.kinds[idx] == NodeKind::Interior
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn strides(&self) -> [usize; 3] {
        strides(self.n, self.size)
    }

    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        multi_index(idx, self.n, self.size)
    }

    pub fn index(&self, mi: &[usize]) -> usize {
        mi.iter().take(self.n).fold(0, |acc, &i| acc * self.size + i)
    }

    /// Physical coordinates of a node, written into the first `n` slots.
    pub fn coord(&self, idx: usize) -> [T; 3] {
        let mi = self.multi_index(idx);
        let mut x = [T::zero(); 3];
        let off = T::from_usize_lossy(self.half);
        for k in 0..self.n {
            x[k] = (T::from_usize_lossy(mi[k]) - off) * self.h;
        }
        x
    }

    pub fn radius(&self, idx: usize) -> T {
        let x = self.coord(idx);
        x[..self.n].iter().map(|&c| c * c).sum::<T>().sqrt()
    }

    /// Axis neighbor `idx +- e_axis`, if it exists in the cube.
    pub fn neighbor(&self, idx: usize, axis: usize, forward: bool) -> Option<usize> {
        let mi = self.multi_index(idx);
        let st = self.strides()[axis];
        if forward {
            (mi[axis] + 1 < self.size).then(|| idx + st)
        } else {
            (mi[axis] > 0).then(|| idx - st)
        }
    }

    /// Interior nodes whose axis neighbors are all interior as well.
    pub fn deep_interior(&self) -> Vec<usize> {
        let st = self.strides();
        self.interior
            .iter()
            .copied()
            .filter(|&i| {
                (0..self.n).all(|k| self.is_interior(i - st[k]) && self.is_interior(i + st[k]))
            })
            .collect()
    }

    /// Corner nodes and multilinear weights of the cell containing `x`.
    /// `None` when the cell leaves the cube or a corner lies outside the mask.
    pub fn cell_stencil(&self, x: &[T]) -> Option<CellStencil<T>> {
        self.stencil(x, false)
    }

    /// Like [`Grid::cell_stencil`], but corners outside the mask are dropped
    /// and the remaining weights renormalized. Used at the rim of the ball.
    pub fn masked_cell_stencil(&self, x: &[T]) -> Option<CellStencil<T>> {
        self.stencil(x, true)
    }

    fn stencil(&self, x: &[T], drop_off_mask: bool) -> Option<CellStencil<T>> {
        let n = self.n;
        let off = T::from_usize_lossy(self.half);
        let mut base = [0usize; 3];
        let mut frac = [T::zero(); 3];
        for k in 0..n {
            let s = x[k] / self.h + off;
            if !s.is_finite() || s < T::zero() {
                return None;
            }
            let mut i = s.floor().to_usize()?;
            if i + 1 >= self.size {
                if i + 1 == self.size && s == T::from_usize_lossy(i) {
                    i -= 1;
                } else {
                    return None;
                }
            }
            base[k] = i;
            frac[k] = s - T::from_usize_lossy(i);
        }
        let mut st = CellStencil {
            nodes: [0; 8],
            weights: [T::zero(); 8],
            len: 1 << n,
        };
        let strides = self.strides();
        let base_idx = self.index(&base[..n]);
        let mut kept = 0;
        let mut total = T::zero();
        for c in 0..(1usize << n) {
            let mut idx = base_idx;
            let mut w = T::one();
            for k in 0..n {
                if c >> k & 1 == 1 {
                    idx += strides[k];
                    w *= frac[k];
                } else {
                    w *= T::one() - frac[k];
                }
            }
            if !self.in_mask(idx) {
                if drop_off_mask {
                    continue;
                }
                return None;
            }
            st.nodes[kept] = idx;
            st.weights[kept] = w;
            kept += 1;
            total += w;
        }
        if !(total > T::zero()) {
            return None;
        }
        st.len = kept;
        if drop_off_mask {
            for w in &mut st.weights[..kept] {
                *w = *w / total;
            }
        }
        Some(st)
    }
}

/// Multilinear interpolation stencil.
#[derive(Clone, Copy, Debug)]
pub struct CellStencil<T> {
    nodes: [usize; 8],
    weights: [T; 8],
    len: usize,
}

impl<T: Scalar> CellStencil<T> {
    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.nodes[..self.len]
            .iter()
            .copied()
            .zip(self.weights[..self.len].iter().copied())
    }

    pub fn apply(&self, values: &[T]) -> T {
        self.iter().map(|(i, w)| w * values[i]).sum()
    }
}

fn strides(n: usize, size: usize) -> [usize; 3] {
    let mut s = [0; 3];
    let mut acc = 1;
    for k in (0..n).rev() {
        s[k] = acc;
        acc *= size;
    }
    s
}

fn multi_index(mut idx: usize, n: usize, size: usize) -> [usize; 3] {
    let mut mi = [0; 3];
    for k in (0..n).rev() {
        mi[k] = idx % size;
        idx /= size;
    }
    mi
}
