//! Competitor constructions and the energy comparisons they force.
//!
//! Every construction returns a field with the same boundary data as its
//! input, so `E_h(competitor) - E_h(u)` is a fair test of minimality.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::field::{energy_density, VectorField};
use crate::growth::comparison_competitor;
use crate::minimizer::{discrete_energy, edge_masks, minimize, MinimizeOptions, SolveReport};
use crate::potential::{AssumptionReport, Potential, PotentialSpec};
use crate::scalar::{CompensatedSum, Scalar};
use crate::slice::{default_sphere_points, select_good_radius};

/// Default quadrature slack `1e-8 + 1e-3 h^2 |Omega|`.
pub fn quadrature_slack(h: f64, volume: f64) -> f64 {
    1e-8 + 1e-3 * h * h * volume
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompetitorTag {
    Annulus,
    Truncation,
    MinTruncation,
    ConstantRShell,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CompetitorParams {
    /// Annulus interpolant on `[S_R - 1, S_R]`.
    Annulus { s_r: f64, good_radius_r: f64 },
    Truncation { r: f64 },
    MinTruncation { level: f64, d: f64 },
    ConstantRShell { r: f64, width: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct CompetitorReport {
    pub tag: CompetitorTag,
    pub energy_u: f64,
    pub energy_competitor: f64,
    /// `E(competitor) - E(u)`; minimality demands `>= -delta_q`.
    pub difference: f64,
    pub delta_q: f64,
    pub passes: bool,
    pub boundary_deviation: f64,
    pub params: CompetitorParams,
}

/// Compare a competitor against `u` on the whole mask.
pub fn compare<T: Scalar, P: Potential<T> + ?Sized>(
    u: &VectorField<T>,
    competitor: &VectorField<T>,
    potential: &P,
    tag: CompetitorTag,
    params: CompetitorParams,
    delta_q: f64,
) -> CompetitorReport {
    let energy_u = discrete_energy(u, potential).as_f64();
    let energy_competitor = discrete_energy(competitor, potential).as_f64();
    let difference = energy_competitor - energy_u;
    let boundary_deviation = competitor.boundary_deviation(u).as_f64();
    CompetitorReport {
        tag,
        energy_u,
        energy_competitor,
        difference,
        delta_q,
        passes: difference >= -delta_q && boundary_deviation == 0.0,
        boundary_deviation,
        params,
    }
}

/// The annulus interpolant `v_R`: `a` on `B_{S_R - 1}`, `u` outside
/// `B_{S_R}`, and `u(S_R theta) + (a - u(S_R theta)) (S_R - r)` in between.
pub fn build_annulus_competitor<T: Scalar>(u: &VectorField<T>, zero: &[T], s_r: T) -> Result<VectorField<T>> {
    let h = u.grid().h();
    if !(s_r >= T::one() + T::lit(2.0) * h) {
        return Err(invalid(format!("annulus competitor needs S_R >= 1 + 2h, got {s_r}")));
    }
    comparison_competitor(u, zero, s_r, T::one())
}

/// Same construction on a fixed radius `R` and shell width `w`.
pub fn build_constant_shell<T: Scalar>(
    u: &VectorField<T>,
    zero: &[T],
    radius: T,
    width: T,
) -> Result<VectorField<T>> {
    comparison_competitor(u, zero, radius, width)
}

/// Cut-off profile: 1 below `r`, linear down to 0 at `2r`.
pub fn alpha<T: Scalar>(tau: T, r: T) -> T {
    if tau <= r {
        T::one()
    } else if tau >= r + r {
        T::zero()
    } else {
        (r + r - tau) / r
    }
}

/// Radial truncation `a + min(rho, r) alpha(rho) nu` of `u - a = rho nu`,
/// applied at every mask node. Nodes with `rho <= r` (up to rounding) are
/// copied exactly, which makes the map idempotent.
pub fn truncate<T: Scalar>(u: &VectorField<T>, zero: &[T], r: T) -> Result<VectorField<T>> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(invalid(format!("truncation radius must be positive, got {r}")));
    }
    if zero.len() != u.m() {
        return Err(invalid("zero and field have different component counts"));
    }
    let grid = u.grid().clone();
    let m = u.m();
    let keep = r * (T::one() + T::lit(8.0) * T::epsilon());
    let mut v = u.clone();
    v.values_mut().par_chunks_mut(m).enumerate().for_each(|(i, node)| {
        if !grid.in_mask(i) {
            return;
        }
        let rho = node.iter().zip(zero).map(|(&x, &a)| (x - a) * (x - a)).sum::<T>().sqrt();
        if rho <= keep {
            return;
        }
        let scale = r.min(rho) * alpha(rho, r) / rho;
        for (x, &a) in node.iter_mut().zip(zero) {
            *x = a + scale * (*x - a);
        }
    });
    Ok(v)
}

/// [`truncate`] under the hypothesis `0 < r < r0 / 2`.
pub fn build_truncation<T: Scalar>(u: &VectorField<T>, zero: &[T], r: T, r0: T) -> Result<VectorField<T>> {
    if !(r > T::zero() && r + r < r0) {
        return Err(invalid(format!("truncation needs 0 < r < r0 / 2, got r = {r}, r0 = {r0}")));
    }
    truncate(u, zero, r)
}

/// `E_h` split along `u - a = rho nu`.
///
/// Per edge, `|u_j - u_i|^2 = (rho_j - rho_i)^2 + rho_i rho_j |nu_j - nu_i|^2`
/// exactly, so the three terms sum to `E_h(u)` up to rounding. Edges with
/// a `rho = 0` endpoint contribute nothing to the middle term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyDecomposition {
    pub modulus: f64,
    pub phase: f64,
    pub potential: f64,
}

impl EnergyDecomposition {
    pub fn total(&self) -> f64 {
        self.modulus + self.phase + self.potential
    }
}

pub fn energy_decomposition<T: Scalar, P: Potential<T> + ?Sized>(
    u: &VectorField<T>,
    zero: &[T],
    potential: &P,
) -> EnergyDecomposition {
    let grid = u.grid();
    let n = grid.n();
    let m = u.m();
    let masks = edge_masks(grid, |i| grid.is_interior(i));
    let st = grid.strides();
    let edge_w = grid.h().powi(n as i32 - 2) * T::lit(0.5);
    let vol = grid.cell_volume();
    let polar = |i: usize| {
        let d: Vec<T> = u.node(i).iter().zip(zero).map(|(&x, &a)| x - a).collect();
        let rho = d.iter().map(|&x| x * x).sum::<T>().sqrt();
        (rho, d)
    };
    let parts: Vec<[T; 3]> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = [T::zero(); 3];
            if !grid.in_mask(i) {
                return acc;
            }
            let (ri, di) = polar(i);
            for (k, &s) in st[..n].iter().enumerate() {
                if masks[i] & (1 << k) == 0 {
                    continue;
                }
                let (rj, dj) = polar(i + s);
                acc[0] += edge_w * (rj - ri) * (rj - ri);
                if ri > T::zero() && rj > T::zero() {
                    let dnu: T = (0..m).map(|c| (dj[c] / rj - di[c] / ri).powi(2)).sum();
                    acc[1] += edge_w * ri * rj * dnu;
                }
            }
            if grid.is_interior(i) {
                acc[2] = vol * potential.value(u.node(i));
            }
            acc
        })
        .collect();
    let mut sums = [CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new()];
    for p in parts {
        for (s, v) in sums.iter_mut().zip(p) {
            s.add(v);
        }
    }
    EnergyDecomposition {
        modulus: sums[0].value().as_f64(),
        phase: sums[1].value().as_f64(),
        potential: sums[2].value().as_f64(),
    }
}

/// Largest `W(u~) - W(u)` over mask nodes; nonpositive when the radial
/// sections of `W` are nondecreasing up to the truncation scale.
pub fn truncation_potential_excess<T: Scalar, P: Potential<T> + ?Sized>(
    u: &VectorField<T>,
    truncated: &VectorField<T>,
    potential: &P,
) -> f64 {
    let grid = u.grid();
    (0..grid.len())
        .filter(|&i| grid.in_mask(i))
        .map(|i| (potential.value(truncated.node(i)) - potential.value(u.node(i))).as_f64())
        .fold(f64::NEG_INFINITY, f64::max)
}

fn check_scalar<T: Scalar>(u: &VectorField<T>) -> Result<()> {
    if u.m() != 1 {
        return Err(Error::Unsupported(format!(
            "min-truncation is defined for scalar fields only, got m = {}",
            u.m()
        )));
    }
    Ok(())
}

/// `V = min(u, level)` at every mask node (`m = 1`).
pub fn build_min_truncation<T: Scalar>(u: &VectorField<T>, level: T) -> Result<VectorField<T>> {
    check_scalar(u)?;
    let grid = u.grid().clone();
    let mut v = u.clone();
    for (i, x) in v.values_mut().iter_mut().enumerate() {
        if grid.in_mask(i) && *x > level {
            *x = level;
        }
    }
    Ok(v)
}

/// Number of points of the level scan.
pub const LEVEL_SCAN_POINTS: usize = 10_000;

/// Minimize `W` over `[a + d, max u]` on a uniform scan; ties go to the
/// leftmost point.
pub fn select_truncation_level<T: Scalar, P: Potential<T> + ?Sized>(
    u: &VectorField<T>,
    a: T,
    d: T,
    potential: &P,
) -> Result<T> {
    check_scalar(u)?;
    let grid = u.grid();
    let top = (0..grid.len())
        .filter(|&i| grid.in_mask(i))
        .map(|i| u.node(i)[0])
        .fold(T::neg_infinity(), T::max);
    let lo = a + d;
    if !(top >= lo) {
        return Err(invalid(format!("level interval [{lo}, {top}] is empty")));
    }
    let steps = T::from_usize_lossy(LEVEL_SCAN_POINTS - 1);
    let mut best = (lo, potential.value(&[lo]));
    for k in 1..LEVEL_SCAN_POINTS {
        let x = lo + (top - lo) * T::from_usize_lossy(k) / steps;
        let w = potential.value(&[x]);
        if w < best.1 {
            best = (x, w);
        }
    }
    Ok(best.0)
}

/// Settings for [`competitor_suite`].
#[derive(Clone, Copy, Debug)]
pub struct SuiteSettings {
    pub delta_q: f64,
    /// `R` of the good-radius search; `S_R` is picked in `(R, 2R)`.
    pub good_radius_r: f64,
    pub good_radius_samples: usize,
    /// Radius and shell width of the constant-shell competitor.
    pub shell_r: f64,
    pub shell_width: f64,
}

impl SuiteSettings {
    pub fn for_grid(r_max: f64, h: f64, n: usize) -> Self {
        let volume = crate::field::sphere_area::<f64>(n, r_max) * r_max / n as f64;
        Self {
            delta_q: quadrature_slack(h, volume),
            good_radius_r: 0.5 * (r_max - h) * (1.0 - 1e-9),
            good_radius_samples: 16,
            shell_r: r_max - h,
            shell_width: 1.0,
        }
    }
}

/// Every applicable competitor against `u`. Boundary-respecting choices
/// are made automatically: the truncation radius is the boundary sup of
/// `|u - a|` and the min-truncation level is at least the boundary max.
pub fn competitor_suite<T: Scalar, P: Potential<T> + ?Sized>(
    u: &VectorField<T>,
    potential: &P,
    settings: &SuiteSettings,
) -> Result<Vec<CompetitorReport>> {
    let grid = u.grid();
    let zero = potential.zero();
    let dq = settings.delta_q;
    let mut out = Vec::with_capacity(4);

    let e = energy_density(u, potential);
    let pts = default_sphere_points(grid.n(), 2.0 * settings.good_radius_r, grid.h().as_f64());
    let good = select_good_radius(&e, T::lit(settings.good_radius_r), settings.good_radius_samples, pts)?;
    let v = build_annulus_competitor(u, zero, T::lit(good.s_r))?;
    out.push(compare(
        u,
        &v,
        potential,
        CompetitorTag::Annulus,
        CompetitorParams::Annulus { s_r: good.s_r, good_radius_r: good.r },
        dq,
    ));

    let r = u.boundary_sup_distance(zero).max(grid.h());
    let v = truncate(u, zero, r)?;
    out.push(compare(
        u,
        &v,
        potential,
        CompetitorTag::Truncation,
        CompetitorParams::Truncation { r: r.as_f64() },
        dq,
    ));

    if u.m() == 1 {
        let a = zero[0];
        let d = grid
            .boundary()
            .iter()
            .map(|&b| u.node(b)[0] - a)
            .fold(T::zero(), T::max);
        let level = select_truncation_level(u, a, d, potential).unwrap_or(a + d);
        let v = build_min_truncation(u, level)?;
        out.push(compare(
            u,
            &v,
            potential,
            CompetitorTag::MinTruncation,
            CompetitorParams::MinTruncation { level: level.as_f64(), d: d.as_f64() },
            dq,
        ));
    }

    let v = build_constant_shell(u, zero, T::lit(settings.shell_r), T::lit(settings.shell_width))?;
    out.push(compare(
        u,
        &v,
        potential,
        CompetitorTag::ConstantRShell,
        CompetitorParams::ConstantRShell { r: settings.shell_r, width: settings.shell_width },
        dq,
    ));
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct MaxPrincipleOptions<T> {
    pub solve: MinimizeOptions<T>,
    pub delta_q: f64,
    /// Allowed excess of the interior sup over `r`.
    pub sup_slack: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxPrincipleReport {
    pub r: f64,
    pub r0: f64,
    pub boundary_sup: f64,
    pub interior_sup: f64,
    pub sup_slack: f64,
    /// `interior_sup <= r + sup_slack`.
    pub within: bool,
    pub energy_u: f64,
    pub energy_truncated: f64,
    pub delta_q: f64,
    /// `E(u~) <= E(u) + delta_q`.
    pub energy_ok: bool,
    /// Largest pointwise increase of `W` under truncation.
    pub potential_excess: f64,
    pub solve: SolveReport,
}

/// Minimize from `u0` (whose boundary values satisfy `|g - a| <= r`),
/// truncate the result at `r`, and compare.
pub fn max_principle_check<T: Scalar>(
    u0: &VectorField<T>,
    spec: &PotentialSpec<T>,
    assumptions: &AssumptionReport,
    r: T,
    opts: &MaxPrincipleOptions<T>,
) -> Result<MaxPrincipleReport> {
    if !assumptions.monot_nondecreasing_ok {
        return Err(Error::Precondition(
            "radial sections of W are not nondecreasing on (0, r0]".into(),
        ));
    }
    let r0 = spec.r0();
    if !(r > T::zero() && r + r < r0) {
        return Err(Error::Precondition(format!("need 0 < r < r0 / 2, got r = {r}, r0 = {r0}")));
    }
    let zero = spec.zero();
    let boundary_sup = u0.boundary_sup_distance(zero);
    if boundary_sup > r * (T::one() + T::lit(1e-12)) {
        return Err(Error::Precondition(format!(
            "boundary data leaves the ball of radius {r} around a (sup {boundary_sup})"
        )));
    }
    let (u, solve) = minimize(u0, spec, &opts.solve)?;
    let truncated = build_truncation(&u, zero, r, r0)?;
    let energy_u = discrete_energy(&u, spec).as_f64();
    let energy_truncated = discrete_energy(&truncated, spec).as_f64();
    let interior_sup = u.interior_sup_distance(zero).as_f64();
    Ok(MaxPrincipleReport {
        r: r.as_f64(),
        r0: r0.as_f64(),
        boundary_sup: boundary_sup.as_f64(),
        interior_sup,
        sup_slack: opts.sup_slack,
        within: interior_sup <= r.as_f64() + opts.sup_slack,
        energy_u,
        energy_truncated,
        delta_q: opts.delta_q,
        energy_ok: energy_truncated <= energy_u + opts.delta_q,
        potential_excess: truncation_potential_excess(&u, &truncated, spec),
        solve,
    })
}
