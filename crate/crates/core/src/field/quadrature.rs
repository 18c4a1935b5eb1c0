use super::{Grid, ScalarField};
use crate::error::{invalid, Result};
use crate::scalar::{CompensatedSum, Scalar};

/// Fraction of the cell `center + [-h/2, h/2]^n` lying inside `B_R`.
///
/// Cells cut by the sphere are clipped against its tangent plane at the
/// closest point to the cell center, which keeps the total quadrature
/// error second order in `h`.
pub fn cell_fraction<T: Scalar>(center: &[T], radius: T, h: T) -> T {
    let n = center.len();
    let rc = center.iter().map(|&c| c * c).sum::<T>().sqrt();
    let reach = h * T::from_usize_lossy(n).sqrt() * T::lit(0.5);
    if rc + reach <= radius {
        return T::one();
    }
    if rc - reach >= radius {
        return T::zero();
    }
    if rc == T::zero() {
        let vol = match n {
            2 => T::PI() * radius * radius,
            _ => T::lit(4.0 / 3.0) * T::PI() * radius.powi(3),
        };
        return (vol / h.powi(n as i32)).min(T::one());
    }
    // work in cell units: cube [-1/2, 1/2]^n, half-space nu . y <= d
    let d = (radius - rc) / h;
    let nu: Vec<T> = center.iter().map(|&c| c / rc).collect();
    match n {
        2 => square_fraction(nu[0], nu[1], d),
        _ => {
            // slice along the axis where the plane is least steep
            let axis = (0..3)
                .min_by(|&i, &j| nu[i].abs().partial_cmp(&nu[j].abs()).unwrap())
                .unwrap();
            let (p, q) = match axis {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            const SLICES: usize = 32;
            let mut acc = T::zero();
            for s in 0..SLICES {
                let z = (T::from_usize_lossy(s) + T::lit(0.5)) / T::from_usize_lossy(SLICES) - T::lit(0.5);
                acc += square_fraction(nu[p], nu[q], d - nu[axis] * z);
            }
            acc / T::from_usize_lossy(SLICES)
        }
    }
}

/// Area of `{y in [-1/2, 1/2]^2 : a y0 + b y1 <= d}`.
fn square_fraction<T: Scalar>(a: T, b: T, d: T) -> T {
    let h = T::lit(0.5);
    let square = [(-h, -h), (h, -h), (h, h), (-h, h)];
    let f = |p: (T, T)| d - a * p.0 - b * p.1;
    let mut poly: Vec<(T, T)> = Vec::with_capacity(6);
    for i in 0..4 {
        let p = square[i];
        let q = square[(i + 1) % 4];
        let (fp, fq) = (f(p), f(q));
        if fp >= T::zero() {
            poly.push(p);
        }
        if (fp >= T::zero()) != (fq >= T::zero()) {
            let t = fp / (fp - fq);
            poly.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
        }
    }
    if poly.len() < 3 {
        return T::zero();
    }
    let mut area = T::zero();
    for i in 0..poly.len() {
        let (x0, y0) = poly[i];
        let (x1, y1) = poly[(i + 1) % poly.len()];
        area += x0 * y1 - x1 * y0;
    }
    (area * T::lit(0.5)).abs().min(T::one())
}

/// Quadrature weights (cell volume times clipped fraction) of every mask
/// node whose cell meets `B_R`, in increasing node order.
pub fn ball_weights<T: Scalar>(grid: &Grid<T>, radius: T) -> Vec<(usize, T)> {
    let n = grid.n();
    let h = grid.h();
    let vol = grid.cell_volume();
    let reach = h * T::from_usize_lossy(n).sqrt() * T::lit(0.5);
    (0..grid.len())
        .filter(|&i| grid.in_mask(i))
        .filter_map(|i| {
            let x = grid.coord(i);
            let r = x[..n].iter().map(|&c| c * c).sum::<T>().sqrt();
            if r - reach >= radius {
                return None;
            }
            let w = vol * cell_fraction(&x[..n], radius, h);
            (w > T::zero()).then_some((i, w))
        })
        .collect()
}

/// Midpoint quadrature of `s` over `B_R` with clipped boundary cells.
pub fn integrate_ball<T: Scalar>(s: &ScalarField<T>, radius: T) -> Result<T> {
    let grid = s.grid();
    if !(radius > T::zero()) || radius > grid.r_max() * (T::one() + T::lit(1e-12)) {
        return Err(invalid(format!(
            "ball radius {radius} outside (0, {}]",
            grid.r_max()
        )));
    }
    let values = s.values();
    Ok(ball_weights(grid, radius)
        .into_iter()
        .map(|(i, w)| w * values[i])
        .collect::<CompensatedSum<T>>()
        .value())
}
