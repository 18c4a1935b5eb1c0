//! Energy growth in `R`: ball-energy profiles, the annulus comparison
//! bound, and the exponent bootstrap `k -> gamma(k)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::field::{energy_density, integrate_ball, ScalarField, VectorField};
use crate::minimizer::discrete_energy_within;
use crate::potential::Potential;
use crate::scalar::Scalar;

#[derive(Clone, Debug, Serialize)]
pub struct NormalizedSeries {
    pub power: f64,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyProfile {
    pub n: usize,
    pub radii: Vec<f64>,
    pub energies: Vec<f64>,
    /// `E(R) / R^p` for each requested `p`.
    pub normalized: Vec<NormalizedSeries>,
    /// `d log E / d log R` between consecutive radii (`None` where `E = 0`).
    pub log_slopes: Vec<Option<f64>>,
}

fn check_radii<T: Scalar>(radii: &[T], r_max: T) -> Result<()> {
    if radii.is_empty() {
        return Err(invalid("empty radius schedule"));
    }
    for w in radii.windows(2) {
        if !(w[1] > w[0]) {
            return Err(invalid(format!("radii must increase strictly: {} then {}", w[0], w[1])));
        }
    }
    if !(radii[0] > T::zero()) || radii[radii.len() - 1] > r_max * (T::one() + T::lit(1e-12)) {
        return Err(invalid(format!("radii must lie in (0, R_max = {r_max}]")));
    }
    Ok(())
}

/// `E(R) = int_{B_R} e` for an energy density `e`.
pub fn profile_of_density<T: Scalar>(e: &ScalarField<T>, radii: &[T], powers: &[f64]) -> Result<EnergyProfile> {
    check_radii(radii, e.grid().r_max())?;
    let energies = radii
        .par_iter()
        .map(|&r| integrate_ball(e, r).map(|v| v.as_f64()))
        .collect::<Result<Vec<f64>>>()?;
    let rf: Vec<f64> = radii.iter().map(|r| r.as_f64()).collect();
    let normalized = powers
        .iter()
        .map(|&p| NormalizedSeries {
            power: p,
            values: rf.iter().zip(&energies).map(|(r, e)| e / r.powf(p)).collect(),
        })
        .collect();
    let log_slopes = (1..rf.len())
        .map(|i| {
            (energies[i] > 0.0 && energies[i - 1] > 0.0)
                .then(|| (energies[i] / energies[i - 1]).ln() / (rf[i] / rf[i - 1]).ln())
        })
        .collect();
    Ok(EnergyProfile {
        n: e.grid().n(),
        radii: rf,
        energies,
        normalized,
        log_slopes,
    })
}

pub fn energy_profile<T: Scalar, P: Potential<T> + ?Sized>(
    u: &VectorField<T>,
    potential: &P,
    radii: &[T],
    powers: &[f64],
) -> Result<EnergyProfile> {
    profile_of_density(&energy_density(u, potential), radii, powers)
}

/// The competitor equal to `a` on `B_{R-w}`, to `u` outside `B_R`, and
/// radially linear in between towards `u(R x/|x|)`.
pub fn comparison_competitor<T: Scalar>(u: &VectorField<T>, zero: &[T], radius: T, width: T) -> Result<VectorField<T>> {
    let grid = u.grid();
    let n = grid.n();
    if !(width > T::zero()) || radius < width + grid.h() || radius > grid.r_max() * (T::one() + T::lit(1e-12)) {
        return Err(invalid(format!(
            "comparison competitor needs w + h <= R <= R_max, got R = {radius}, w = {width}"
        )));
    }
    let inner = radius - width;
    let mut v = u.clone();
    for &i in grid.interior() {
        let r = grid.radius(i);
        if r >= radius {
            continue;
        }
        let node = v.node_mut(i);
        if r <= inner {
            node.copy_from_slice(zero);
            continue;
        }
        let x = grid.coord(i);
        let y: Vec<T> = x[..n].iter().map(|&c| c * radius / r).collect();
        let trace = u
            .interpolate_masked(&y)
            .ok_or_else(|| invalid(format!("cannot read u on the sphere of radius {radius}")))?;
        let t = (r - inner) / width;
        for ((o, &a), &g) in node.iter_mut().zip(zero).zip(&trace) {
            *o = a + t * (g - a);
        }
    }
    Ok(v)
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonBound {
    pub r: f64,
    pub width: f64,
    /// `E_h(v; B_R)` of the competitor: the bound.
    pub bound: f64,
    /// `E_h(u; B_R)`.
    pub energy: f64,
    /// The same two quantities by ball quadrature of the energy density.
    pub bound_quadrature: f64,
    pub energy_quadrature: f64,
}

pub fn comparison_bound<T: Scalar, P: Potential<T> + ?Sized>(
    u: &VectorField<T>,
    potential: &P,
    radius: T,
) -> Result<ComparisonBound> {
    comparison_bound_with_width(u, potential, radius, T::one())
}

pub fn comparison_bound_with_width<T: Scalar, P: Potential<T> + ?Sized>(
    u: &VectorField<T>,
    potential: &P,
    radius: T,
    width: T,
) -> Result<ComparisonBound> {
    let v = comparison_competitor(u, potential.zero(), radius, width)?;
    Ok(ComparisonBound {
        r: radius.as_f64(),
        width: width.as_f64(),
        bound: discrete_energy_within(&v, potential, radius).as_f64(),
        energy: discrete_energy_within(u, potential, radius).as_f64(),
        bound_quadrature: integrate_ball(&energy_density(&v, potential), radius)?.as_f64(),
        energy_quadrature: integrate_ball(&energy_density(u, potential), radius)?.as_f64(),
    })
}

fn check_exponents(k: f64, n: usize, q: f64, k_max: f64) -> Result<()> {
    if n < 2 || !(q >= 2.0) || !(k > 0.0 && k <= k_max) {
        return Err(invalid(format!(
            "need n >= 2, q >= 2, 0 < k <= {k_max}; got n = {n}, q = {q}, k = {k}"
        )));
    }
    Ok(())
}

/// `gamma(k) = n - 1 - 2(n - k) / (qn + 2)` for `k in (0, n - 1]`.
pub fn bootstrap_map(k: f64, n: usize, q: f64) -> Result<f64> {
    let nf = n as f64;
    check_exponents(k, n, q, nf - 1.0)?;
    Ok(nf - 1.0 - 2.0 * (nf - k) / (q * nf + 2.0))
}

/// `beta = q(n - k) / (qn + 2)`, the exponent balancing
/// `n - 1 - 2 beta / q` against `k - 1 + beta n`. Defined for `k in (0, n]`.
pub fn beta_of(k: f64, n: usize, q: f64) -> Result<f64> {
    let nf = n as f64;
    check_exponents(k, n, q, nf)?;
    Ok(q * (nf - k) / (q * nf + 2.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPoint {
    pub n: usize,
    pub q: f64,
    pub tol: f64,
    pub k_star: f64,
    /// `n - 1 - 2 / (qn)`.
    pub exact: f64,
    pub iterations: usize,
    pub contraction: f64,
    pub iterates: Vec<f64>,
}

/// Iterate `gamma` from `k_0 = n - 1` until successive iterates differ by
/// at most `tol`.
pub fn bootstrap_fixed_point(n: usize, q: f64, tol: f64) -> Result<FixedPoint> {
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let nf = n as f64;
    let mut k = nf - 1.0;
    let mut iterates = vec![k];
    loop {
        let next = bootstrap_map(k, n, q)?;
        iterates.push(next);
        let done = (next - k).abs() <= tol;
        k = next;
        if done || iterates.len() > 10_000 {
            break;
        }
    }
    Ok(FixedPoint {
        n,
        q,
        tol,
        k_star: k,
        exact: nf - 1.0 - 2.0 / (q * nf),
        iterations: iterates.len() - 1,
        contraction: 2.0 / (q * nf + 2.0),
        iterates,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthDiagnostic {
    pub n: usize,
    pub q: f64,
    pub radii: Vec<f64>,
    pub energies: Vec<f64>,
    /// `E(R) / R^{n-1}`; also the rescaled energy of `u_eps(y) = u(y / eps)`
    /// on `B_1` with `eps = 1 / R`.
    pub normalized: Vec<f64>,
    pub rescaling_eps: Vec<f64>,
    /// `(i, increase)` where `normalized[i + 1] > normalized[i]`.
    pub increases: Vec<(usize, f64)>,
    /// Least-squares slope of `log E` against `log R`; `None` if some `E = 0`.
    pub fitted_exponent: Option<f64>,
    /// `n - 1 - 2 / (qn)`.
    pub predicted_exponent: f64,
    pub all_zero: bool,
}

/// Trend diagnostic over at least three doubling radii; never a verdict.
pub fn theorem11_diagnostic(n: usize, q: f64, radii: &[f64], energies: &[f64]) -> Result<GrowthDiagnostic> {
    if radii.len() < 3 || radii.len() != energies.len() {
        return Err(invalid("need at least three radii with matching energies"));
    }
    for w in radii.windows(2) {
        if (w[1] / w[0] - 2.0).abs() > 1e-9 {
            return Err(invalid(format!("radii must double: {} then {}", w[0], w[1])));
        }
    }
    let p = n as f64 - 1.0;
    let normalized: Vec<f64> = radii.iter().zip(energies).map(|(r, e)| e / r.powf(p)).collect();
    let increases = normalized
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0])
        .map(|(i, w)| (i, w[1] - w[0]))
        .collect();
    let fitted_exponent = energies.iter().all(|&e| e > 0.0).then(|| {
        let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = energies.iter().map(|e| e.ln()).collect();
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        sxy / sxx
    });
    Ok(GrowthDiagnostic {
        n,
        q,
        radii: radii.to_vec(),
        energies: energies.to_vec(),
        rescaling_eps: radii.iter().map(|r| 1.0 / r).collect(),
        normalized,
        increases,
        fitted_exponent,
        predicted_exponent: n as f64 - 1.0 - 2.0 / (q * n as f64),
        all_zero: energies.iter().all(|&e| e == 0.0),
    })
}
