//! Sphere-slice analysis of an energy density: good radius selection,
//! Hölder constants, the clearing-out threshold and the greedy bad-disc
//! covering.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::field::{integrate_ball, sample_sphere, sphere_area, ScalarField, SphereSamples};
use crate::potential::{sample_directions, Potential};
use crate::scalar::Scalar;

#[derive(Clone, Debug, Serialize)]
pub struct GoodRadius {
    pub r: f64,
    pub s_r: f64,
    pub slice_energy: f64,
    /// `(1/R) int_{B_2R \ B_R} e`: the mean-value bound the minimum obeys.
    pub shell_mean: f64,
    pub radii: Vec<f64>,
    pub slice_energies: Vec<f64>,
}

/// Scan `samples` radii in `(R, 2R)` and return the one with the smallest
/// sphere-slice integral (the smallest radius among ties).
pub fn select_good_radius<T: Scalar>(
    e: &ScalarField<T>,
    radius: T,
    samples: usize,
    points: usize,
) -> Result<GoodRadius> {
    let grid = e.grid();
    let two_r = radius * T::lit(2.0);
    if !(radius > T::zero()) || two_r + grid.h() > grid.r_max() * (T::one() + T::lit(1e-12)) {
        return Err(invalid(format!(
            "good radius search needs 0 < 2R + h <= R_max, got R = {radius}, R_max = {}",
            grid.r_max()
        )));
    }
    if samples == 0 {
        return Err(invalid("need at least one candidate radius"));
    }
    let radii: Vec<T> = (1..=samples)
        .map(|j| radius + radius * T::from_usize_lossy(j) / T::from_usize_lossy(samples + 1))
        .collect();
    let energies = radii
        .par_iter()
        .map(|&r| sample_sphere(e, r, points).map(|s| s.slice_integral()))
        .collect::<Result<Vec<T>>>()?;
    let mut best = 0;
    for (j, &v) in energies.iter().enumerate() {
        if v < energies[best] {
            best = j;
        }
    }
    let shell = integrate_ball(e, two_r)? - integrate_ball(e, radius)?;
    Ok(GoodRadius {
        r: radius.as_f64(),
        s_r: radii[best].as_f64(),
        slice_energy: energies[best].as_f64(),
        shell_mean: (shell / radius).as_f64(),
        radii: radii.iter().map(|r| r.as_f64()).collect(),
        slice_energies: energies.iter().map(|v| v.as_f64()).collect(),
    })
}

/// Sphere sample count giving a spacing of about `h / 2`.
pub fn default_sphere_points(n: usize, radius: f64, h: f64) -> usize {
    let spacing = 0.5 * h;
    let k = match n {
        2 => 2.0 * std::f64::consts::PI * radius / spacing,
        _ => 4.0 * std::f64::consts::PI * radius * radius / (spacing * spacing),
    };
    (k.ceil() as usize).max(64)
}

/// `max |e(x) - e(y)| / |x - y|^alpha` over mask node pairs with
/// `|x - y| <= 1`.
pub fn holder_constant<T: Scalar>(e: &ScalarField<T>, alpha: T) -> Result<T> {
    check_alpha(alpha)?;
    let grid = e.grid();
    let n = grid.n();
    let h = grid.h();
    let reach = (T::one() / h).floor().to_i64().unwrap_or(0);
    // offsets in the positive half space, so every pair is visited once
    let mut offsets: Vec<([i64; 3], T)> = Vec::new();
    let zs = if n == 3 { -reach..=reach } else { 0..=0 };
    for a in -reach..=reach {
        for b in -reach..=reach {
            for c in zs.clone() {
                let o = if n == 3 { [a, b, c] } else { [a, b, 0] };
                if o <= [0, 0, 0] {
                    continue;
                }
                let d2 = o.iter().map(|&k| (k * k) as f64).sum::<f64>();
                let d = h * T::lit(d2.sqrt());
                if d <= T::one() * (T::one() + T::lit(1e-12)) {
                    offsets.push((o, d.powf(alpha)));
                }
            }
        }
    }
    let size = grid.size() as i64;
    let values = e.values();
    let worst = (0..grid.len())
        .into_par_iter()
        .filter(|&i| grid.in_mask(i))
        .map(|i| {
            let mi = grid.multi_index(i);
            let mut worst = T::zero();
            for (o, dpow) in &offsets {
                let mut idx = [0usize; 3];
                let mut ok = true;
                for k in 0..n {
                    let v = mi[k] as i64 + o[k];
                    if v < 0 || v >= size {
                        ok = false;
                        break;
                    }
                    idx[k] = v as usize;
                }
                if !ok {
                    continue;
                }
                let j = grid.index(&idx[..n]);
                if grid.in_mask(j) {
                    worst = worst.max((values[i] - values[j]).abs() / *dpow);
                }
            }
            worst
        })
        .reduce(T::zero, T::max);
    Ok(worst)
}

/// Hölder constant of sphere samples over pairs at Euclidean distance
/// at most 1.
pub fn holder_constant_samples<T: Scalar>(s: &SphereSamples<T>, alpha: T) -> Result<T> {
    check_alpha(alpha)?;
    let k = s.len();
    let pts: Vec<[T; 3]> = (0..k).map(|i| s.point(i)).collect();
    Ok((0..k)
        .into_par_iter()
        .map(|i| {
            let mut worst = T::zero();
            for j in i + 1..k {
                let d2 = (0..3).map(|c| (pts[i][c] - pts[j][c]).powi(2)).sum::<T>();
                if d2 > T::zero() && d2 <= T::one() {
                    let dv = (s.values[i] - s.values[j]).abs();
                    let q = if alpha == T::one() {
                        dv / d2.sqrt()
                    } else {
                        dv / d2.powf(alpha * T::lit(0.5))
                    };
                    worst = worst.max(q);
                }
            }
            worst
        })
        .reduce(T::zero, T::max))
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha <= T::one() {
        Ok(())
    } else {
        Err(invalid(format!("Hölder exponent must lie in (0, 1], got {alpha}")))
    }
}

/// `mu_eps = (eps / 2^n) |S^{n-1}| min{1, (eps / 2 C4)^{1/alpha}}^{n-1}`.
pub fn clearing_out_threshold<T: Scalar>(eps: T, c4: T, alpha: T, n: usize) -> Result<T> {
    check_alpha(alpha)?;
    if !(eps > T::zero()) || !(c4 > T::zero()) || !(2..=3).contains(&n) {
        return Err(invalid(format!(
            "clearing-out threshold needs eps > 0, C4 > 0, n in {{2, 3}}; got {eps}, {c4}, {n}"
        )));
    }
    let radius = (eps / (T::lit(2.0) * c4)).powf(alpha.recip()).min(T::one());
    Ok(eps / T::lit(f64::from(1u32 << n)) * sphere_area(n, T::one()) * radius.powi(n as i32 - 1))
}

/// Samples within geodesic distance 2 and 1 of each sample.
fn neighbourhoods<T: Scalar>(s: &SphereSamples<T>) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    // geodesic distance <= d  <=>  cos angle >= cos(d / R), for d / R < pi
    let threshold = |d: T| {
        let ang = d * (T::one() + T::lit(1e-12)) / s.radius;
        if ang >= T::PI() {
            -T::lit(2.0)
        } else {
            ang.cos()
        }
    };
    let (c2, c1) = (threshold(T::lit(2.0)), threshold(T::one()));
    let dirs = &s.directions;
    (0..s.len())
        .into_par_iter()
        .map(|i| {
            let a = dirs[i];
            let mut two = Vec::new();
            let mut one = Vec::new();
            for (j, b) in dirs.iter().enumerate() {
                let c = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                if c >= c2 {
                    two.push(j);
                    if c >= c1 {
                        one.push(j);
                    }
                }
            }
            (two, one)
        })
        .unzip()
}

fn local_energies<T: Scalar>(s: &SphereSamples<T>, balls: &[Vec<usize>]) -> Vec<T> {
    let w = s.weight();
    balls
        .iter()
        .map(|b| w * b.iter().map(|&j| s.values[j]).sum::<T>())
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscCenter {
    pub sample: usize,
    pub point: Vec<f64>,
    pub angles: Vec<f64>,
    pub local_energy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BadDiscReport {
    pub r: f64,
    pub s_r: f64,
    pub eps: f64,
    pub c4: f64,
    pub alpha: f64,
    pub mu: f64,
    pub m_eps: Option<f64>,
    pub sphere_points: usize,
    pub centers: Vec<DiscCenter>,
    pub count: usize,
    /// Largest `e` on samples outside every disc.
    pub off_disc_sup: f64,
    pub slice_energy: f64,
    /// Smallest geodesic distance between two centers (infinite below two).
    pub min_center_separation: f64,
    #[serde(skip)]
    pub covered: Vec<bool>,
}

/// Greedy covering: while some uncovered sample has `e > eps`, take the one
/// whose geodesic 2-ball carries the most slice energy (ties: larger `e`,
/// then lower index), require that energy to reach `mu`, and cover its
/// geodesic 1-ball.
pub fn find_bad_discs<T: Scalar>(s: &SphereSamples<T>, eps: T, mu: T) -> Result<BadDiscReport> {
    let k = s.len();
    let (two, one) = neighbourhoods(s);
    let local = local_energies(s, &two);
    let mut covered = vec![false; k];
    let mut centers: Vec<DiscCenter> = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    loop {
        let mut best: Option<usize> = None;
        for i in (0..k).filter(|&i| !covered[i] && s.values[i] > eps) {
            best = Some(match best {
                None => i,
                Some(b) => {
                    let (li, lb) = (local[i], local[b]);
                    let close = (li - lb).abs() <= T::lit(1e-9) * li.abs().max(lb.abs());
                    if (!close && li > lb) || (close && s.values[i] > s.values[b]) {
                        i
                    } else {
                        b
                    }
                }
            });
        }
        let Some(c) = best else { break };
        if local[c] < mu {
            return Err(Error::ClearingOutViolated {
                sample: c,
                value: s.values[c].as_f64(),
                local_energy: local[c].as_f64(),
                mu: mu.as_f64(),
            });
        }
        for &j in &one[c] {
            covered[j] = true;
        }
        let p = s.point(c);
        centers.push(DiscCenter {
            sample: c,
            point: p[..s.n].iter().map(|v| v.as_f64()).collect(),
            angles: s.angles(c).iter().map(|v| v.as_f64()).collect(),
            local_energy: local[c].as_f64(),
        });
        chosen.push(c);
    }
    let off_disc_sup = (0..k)
        .filter(|&i| !covered[i])
        .map(|i| s.values[i])
        .fold(T::zero(), T::max);
    let mut sep = f64::INFINITY;
    for (a, &i) in chosen.iter().enumerate() {
        for &j in &chosen[a + 1..] {
            sep = sep.min(s.geodesic_distance(i, j).as_f64());
        }
    }
    Ok(BadDiscReport {
        r: f64::NAN,
        s_r: s.radius.as_f64(),
        eps: eps.as_f64(),
        c4: f64::NAN,
        alpha: f64::NAN,
        mu: mu.as_f64(),
        m_eps: None,
        sphere_points: k,
        count: centers.len(),
        centers,
        off_disc_sup: off_disc_sup.as_f64(),
        slice_energy: s.slice_integral().as_f64(),
        min_center_separation: sep,
        covered,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ClearingOutViolation {
    pub center: usize,
    pub sample: usize,
    pub local_energy: f64,
    pub value: f64,
}

/// Every sample center whose geodesic 2-ball carries less than `mu` must
/// have `e <= eps` throughout its geodesic 1-ball; returns the exceptions.
pub fn clearing_out_violations<T: Scalar>(s: &SphereSamples<T>, eps: T, mu: T) -> Vec<ClearingOutViolation> {
    let (two, one) = neighbourhoods(s);
    let local = local_energies(s, &two);
    let mut out = Vec::new();
    for c in 0..s.len() {
        if local[c] >= mu {
            continue;
        }
        for &j in &one[c] {
            if s.values[j] > eps {
                out.push(ClearingOutViolation {
                    center: c,
                    sample: j,
                    local_energy: local[c].as_f64(),
                    value: s.values[j].as_f64(),
                });
            }
        }
    }
    out
}

/// `m_eps = sup {|v - a| : W(v) <= eps, |v - a| <= range_box}`, by scanning
/// `steps` radii along `directions` seeded rays.
pub fn m_epsilon<T: Scalar, P: Potential<T> + ?Sized>(
    potential: &P,
    eps: T,
    range_box: T,
    directions: usize,
    steps: usize,
    seed: u64,
) -> T {
    let a = potential.zero();
    let dirs = sample_directions::<T>(a.len(), directions, seed);
    dirs.par_iter()
        .map(|nu| {
            let mut v = vec![T::zero(); a.len()];
            let mut best = T::zero();
            for k in 1..=steps {
                let r = range_box * T::from_usize_lossy(k) / T::from_usize_lossy(steps);
                for c in 0..a.len() {
                    v[c] = a[c] + r * nu[c];
                }
                if potential.value(&v) <= eps {
                    best = r;
                }
            }
            best
        })
        .reduce(T::zero, T::max)
}

/// Parameters of a full slice analysis of one energy density.
#[derive(Clone, Copy, Debug)]
pub struct SliceSettings<T> {
    pub radius: T,
    pub eps: T,
    pub alpha: T,
    pub radius_samples: usize,
    pub sphere_points: usize,
}

/// Good radius, measured `C4` (grid and slice samples), `mu_eps` and the
/// bad-disc covering on `dB_{S_R}`.
pub fn bad_disc_analysis<T: Scalar>(e: &ScalarField<T>, cfg: &SliceSettings<T>) -> Result<(GoodRadius, BadDiscReport)> {
    let good = select_good_radius(e, cfg.radius, cfg.radius_samples, cfg.sphere_points)?;
    let s = sample_sphere(e, T::lit(good.s_r), cfg.sphere_points)?;
    let c4 = holder_constant(e, cfg.alpha)?.max(holder_constant_samples(&s, cfg.alpha)?);
    // a flat density is Hölder with any constant; keep the threshold finite
    let c4 = c4.max(T::lit(1e-300));
    let mu = clearing_out_threshold(cfg.eps, c4, cfg.alpha, e.grid().n())?;
    let mut rep = find_bad_discs(&s, cfg.eps, mu)?;
    rep.r = cfg.radius.as_f64();
    rep.c4 = c4.as_f64();
    rep.alpha = cfg.alpha.as_f64();
    Ok((good, rep))
}
