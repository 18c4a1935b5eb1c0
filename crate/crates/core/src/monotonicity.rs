//! Stress-energy tensor `T_ij = u_{,i} . u_{,j} - delta_ij e`, its algebraic
//! identities, its divergence, the Pohozaev balance on balls and the
//! monotone normalized ball energies.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::field::{gradient_at, integrate_ball, sample_sphere, Grid, ScalarField, VectorField};
use crate::minimizer::{el_residual, modica_check};
use crate::potential::Potential;
use crate::scalar::Scalar;

/// Symmetric `n x n` matrix per node, row-major; zero off the mask.
#[derive(Clone, Debug)]
pub struct StressTensorField<T> {
    grid: Arc<Grid<T>>,
    values: Vec<T>,
}

impl<T: Scalar> StressTensorField<T> {
    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn at(&self, idx: usize) -> &[T] {
        let nn = self.grid.n() * self.grid.n();
        &self.values[idx * nn..(idx + 1) * nn]
    }

    pub fn get(&self, idx: usize, i: usize, j: usize) -> T {
        self.at(idx)[i * self.grid.n() + j]
    }

    /// Component `(i, j)` as a scalar field.
    pub fn component(&self, i: usize, j: usize) -> ScalarField<T> {
        let vals = (0..self.grid.len()).map(|idx| self.get(idx, i, j)).collect();
        ScalarField::from_values(self.grid.clone(), vals).expect("finite tensor")
    }

    pub fn trace(&self) -> ScalarField<T> {
        let n = self.grid.n();
        let vals = (0..self.grid.len())
            .map(|idx| (0..n).map(|i| self.get(idx, i, i)).sum())
            .collect();
        ScalarField::from_values(self.grid.clone(), vals).expect("finite tensor")
    }
}

/// `T_ij` on every mask node from the stencil gradient (centered inside,
/// one-sided on the boundary layer).
pub fn stress_tensor<T: Scalar, P: Potential<T> + ?Sized>(u: &VectorField<T>, potential: &P) -> StressTensorField<T> {
    let grid = u.grid().clone();
    let n = grid.n();
    let m = u.m();
    let half = T::lit(0.5);
    let mut values = vec![T::zero(); grid.len() * n * n];
    values.par_chunks_mut(n * n).enumerate().for_each_init(
        || vec![T::zero(); n * m],
        |d, (idx, t)| {
            if !grid.in_mask(idx) {
                return;
            }
            gradient_at(u, idx, d);
            let e = half * d.iter().map(|&v| v * v).sum::<T>() + potential.value(u.node(idx));
            for i in 0..n {
                for j in i..n {
                    let g: T = (0..m).map(|c| d[c * n + i] * d[c * n + j]).sum();
                    let v = if i == j { g - e } else { g };
                    t[i * n + j] = v;
                    t[j * n + i] = v;
                }
            }
        },
    );
    StressTensorField { grid, values }
}

/// Row-wise centered divergence `(div T)_i = sum_j d_j T_ij` on interior
/// nodes whose axis neighbors are interior; zero elsewhere.
pub fn stress_divergence<T: Scalar>(t: &StressTensorField<T>) -> VectorField<T> {
    let grid = t.grid.clone();
    let n = grid.n();
    let st = grid.strides();
    let inv = (T::lit(2.0) * grid.h()).recip();
    let deep: Vec<bool> = {
        let mut d = vec![false; grid.len()];
        for i in grid.deep_interior() {
            d[i] = true;
        }
        d
    };
    let mut out = vec![T::zero(); grid.len() * n];
    out.par_chunks_mut(n).enumerate().for_each(|(idx, o)| {
        if !deep[idx] {
            return;
        }
        for i in 0..n {
            let mut acc = T::zero();
            for j in 0..n {
                acc += t.get(idx + st[j], i, j) - t.get(idx - st[j], i, j);
            }
            o[i] = acc * inv;
        }
    });
    VectorField::from_values(grid, n, out).expect("finite divergence")
}

/// `max |div T|` over the nodes where the divergence is evaluated.
pub fn divergence_sup<T: Scalar>(t: &StressTensorField<T>) -> T {
    let div = stress_divergence(t);
    (0..t.grid.len())
        .map(|i| div.node(i).iter().map(|&v| v * v).sum::<T>().sqrt())
        .fold(T::zero(), T::max)
}

/// Largest violation of `tr T = -((n-2)/2 |grad u|^2 + n W)` over interior nodes.
pub fn trace_identity_defect<T: Scalar, P: Potential<T> + ?Sized>(
    t: &StressTensorField<T>,
    u: &VectorField<T>,
    potential: &P,
) -> T {
    let grid = u.grid();
    let n = grid.n();
    let nf = T::from_usize_lossy(n);
    let mut d = vec![T::zero(); n * u.m()];
    let mut worst = T::zero();
    for &idx in grid.interior() {
        gradient_at(u, idx, &mut d);
        let g2: T = d.iter().map(|&v| v * v).sum();
        let tr: T = (0..n).map(|i| t.get(idx, i, i)).sum();
        let expected = -((nf - T::lit(2.0)) * T::lit(0.5) * g2 + nf * potential.value(u.node(idx)));
        worst = worst.max((tr - expected).abs());
    }
    worst
}

/// Smallest eigenvalue of a symmetric `n x n` matrix, `n <= 3`, by cyclic
/// Jacobi rotations.
pub fn min_symmetric_eigenvalue<T: Scalar>(a: &[T], n: usize) -> T {
    let mut m = a.to_vec();
    for _ in 0..50 {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off <= T::epsilon() * T::epsilon() * T::lit(1e-6) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).fold(T::infinity(), T::min)
}

#[derive(Clone, Debug, Serialize)]
pub struct PositivityReport {
    /// `min` over interior nodes of the smallest eigenvalue of `T + e I`.
    pub min_eigenvalue: f64,
    /// `max |T + e I - (grad u)^T (grad u)|` entrywise.
    pub gram_defect: f64,
}

pub fn positivity_check<T: Scalar, P: Potential<T> + ?Sized>(
    t: &StressTensorField<T>,
    u: &VectorField<T>,
    potential: &P,
) -> PositivityReport {
    let grid = u.grid();
    let n = grid.n();
    let m = u.m();
    let mut d = vec![T::zero(); n * m];
    let mut a = vec![T::zero(); n * n];
    let mut min_eig = T::infinity();
    let mut defect = T::zero();
    for &idx in grid.interior() {
        gradient_at(u, idx, &mut d);
        let e = T::lit(0.5) * d.iter().map(|&v| v * v).sum::<T>() + potential.value(u.node(idx));
        for i in 0..n {
            for j in 0..n {
                let shifted = t.get(idx, i, j) + if i == j { e } else { T::zero() };
                let gram: T = (0..m).map(|c| d[c * n + i] * d[c * n + j]).sum();
                defect = defect.max((shifted - gram).abs());
                a[i * n + j] = shifted;
            }
        }
        min_eig = min_eig.min(min_symmetric_eigenvalue(&a, n));
    }
    if grid.interior().is_empty() {
        min_eig = T::zero();
    }
    PositivityReport {
        min_eigenvalue: min_eig.as_f64(),
        gram_defect: defect.as_f64(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PohozaevBalance {
    pub r: f64,
    /// `sum_i int_{B_R} T_ii`.
    pub volume: f64,
    /// `R int_{dB_R} nu_i T_ij nu_j dS`.
    pub boundary: f64,
    /// `|volume - boundary|`; vanishes for exact solutions.
    pub identity_residual: f64,
    /// `boundary + R int_{dB_R} e dS = R int |d_nu u|^2 >= 0`.
    pub inequality_gap: f64,
}

pub fn pohozaev_balance<T: Scalar, P: Potential<T> + ?Sized>(
    u: &VectorField<T>,
    potential: &P,
    radius: T,
    points: usize,
) -> Result<PohozaevBalance> {
    let grid = u.grid();
    let n = grid.n();
    let t = stress_tensor(u, potential);
    let volume = integrate_ball(&t.trace(), radius)?;
    let mut comps = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            comps.push(sample_sphere(&t.component(i, j), radius, points)?);
        }
    }
    let e = crate::field::energy_density(u, potential);
    let e_s = sample_sphere(&e, radius, points)?;
    let k = e_s.len();
    let mut flux = T::zero();
    for p in 0..k {
        let nu = e_s.directions[p];
        for i in 0..n {
            for j in 0..n {
                flux += nu[i] * comps[i * n + j].values[p] * nu[j];
            }
        }
    }
    let boundary = radius * flux * e_s.weight();
    let gap = boundary + radius * e_s.slice_integral();
    Ok(PohozaevBalance {
        r: radius.as_f64(),
        volume: volume.as_f64(),
        boundary: boundary.as_f64(),
        identity_residual: (volume - boundary).abs().as_f64(),
        inequality_gap: gap.as_f64(),
    })
}

/// `(n-2)/2 |grad u|^2 + n W(u)` on mask nodes.
pub fn pohozaev_density<T: Scalar, P: Potential<T> + ?Sized>(u: &VectorField<T>, potential: &P) -> ScalarField<T> {
    let t = stress_tensor(u, potential);
    t.trace().map(|v| -v)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Violation {
    pub step: usize,
    pub r_from: f64,
    pub r_to: f64,
    pub drop: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub n: usize,
    pub radii: Vec<f64>,
    /// `f(R) = int_{B_R} (n-2)/2 |grad u|^2 + n W`.
    pub f: Vec<f64>,
    /// `E(R) = int_{B_R} |grad u|^2 / 2 + W`.
    pub energy: Vec<f64>,
    /// `R^{2-n} f(R)`: nondecreasing for every solution.
    pub weak: Vec<f64>,
    /// `R^{1-n} f(R)`.
    pub strong: Vec<f64>,
    /// `R^{1-n} E(R)`.
    pub classical: Vec<f64>,
    pub weak_violations: Vec<Violation>,
    /// Present only when the Modica bound holds within tolerance.
    pub strong_violations: Option<Vec<Violation>>,
    pub classical_violations: Option<Vec<Violation>>,
    pub modica: f64,
    pub modica_ok: bool,
    pub residual: f64,
    /// Per-step tolerance `c_m h max(1, max |sequence|)`, per sequence.
    pub tolerance_factor: f64,
}

fn violations(radii: &[f64], seq: &[f64], c: f64) -> Vec<Violation> {
    let scale = seq.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
    let tol = c * scale;
    (1..seq.len())
        .filter(|&i| seq[i] < seq[i - 1] - tol)
        .map(|i| Violation {
            step: i,
            r_from: radii[i - 1],
            r_to: radii[i],
            drop: seq[i - 1] - seq[i],
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct MonotonicityOptions<T> {
    /// Required bound on the Euler-Lagrange residual.
    pub residual_tol: T,
    /// `c_m` in `delta_m = c_m h`.
    pub c_m: f64,
}

pub fn monotone_quantities<T: Scalar, P: Potential<T> + ?Sized>(
    u: &VectorField<T>,
    potential: &P,
    radii: &[T],
    opts: &MonotonicityOptions<T>,
) -> Result<MonotonicityReport> {
    let residual = el_residual(u, potential);
    if residual > opts.residual_tol {
        return Err(Error::NotASolution {
            residual: residual.as_f64(),
            tol: opts.residual_tol.as_f64(),
        });
    }
    if radii.is_empty() {
        return Err(invalid("empty radius schedule"));
    }
    let grid = u.grid();
    let n = grid.n();
    let h = grid.h().as_f64();
    let fd = pohozaev_density(u, potential);
    let ed = crate::field::energy_density(u, potential);
    let f = radii
        .par_iter()
        .map(|&r| integrate_ball(&fd, r).map(|v| v.as_f64()))
        .collect::<Result<Vec<f64>>>()?;
    let energy = radii
        .par_iter()
        .map(|&r| integrate_ball(&ed, r).map(|v| v.as_f64()))
        .collect::<Result<Vec<f64>>>()?;
    let rf: Vec<f64> = radii.iter().map(|r| r.as_f64()).collect();
    let nf = n as f64;
    let weak: Vec<f64> = rf.iter().zip(&f).map(|(r, v)| v * r.powf(2.0 - nf)).collect();
    let strong: Vec<f64> = rf.iter().zip(&f).map(|(r, v)| v * r.powf(1.0 - nf)).collect();
    let classical: Vec<f64> = rf.iter().zip(&energy).map(|(r, v)| v * r.powf(1.0 - nf)).collect();
    let c = opts.c_m * h;
    let modica = modica_check(u, potential).as_f64();
    let modica_ok = modica <= c;
    Ok(MonotonicityReport {
        n,
        weak_violations: violations(&rf, &weak, c),
        strong_violations: modica_ok.then(|| violations(&rf, &strong, c)),
        classical_violations: modica_ok.then(|| violations(&rf, &classical, c)),
        radii: rf,
        f,
        energy,
        weak,
        strong,
        classical,
        modica,
        modica_ok,
        residual: residual.as_f64(),
        tolerance_factor: c,
    })
}
