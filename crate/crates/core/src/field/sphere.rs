use super::ScalarField;
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// `|dB_R|`: circumference (n = 2) or surface area (n = 3).
pub fn sphere_area<T: Scalar>(n: usize, radius: T) -> T {
    match n {
        2 => T::lit(2.0) * T::PI() * radius,
        _ => T::lit(4.0) * T::PI() * radius * radius,
    }
}

/// `k` equi-angular unit vectors on the circle (n = 2) or a Fibonacci
/// lattice on the sphere (n = 3).
pub fn sphere_directions<T: Scalar>(n: usize, k: usize) -> Vec<[T; 3]> {
    let kf = T::from_usize_lossy(k);
    match n {
        2 => (0..k)
            .map(|i| {
                let th = T::lit(2.0) * T::PI() * T::from_usize_lossy(i) / kf;
                [th.cos(), th.sin(), T::zero()]
            })
            .collect(),
        _ => {
            let golden = T::PI() * (T::lit(3.0) - T::lit(5.0).sqrt());
            (0..k)
                .map(|i| {
                    let fi = T::from_usize_lossy(i);
                    let z = T::one() - (T::lit(2.0) * fi + T::one()) / kf;
                    let rho = (T::one() - z * z).max(T::zero()).sqrt();
                    let phi = golden * fi;
                    [rho * phi.cos(), rho * phi.sin(), z]
                })
                .collect()
        }
    }
}

/// Values of a scalar quantity at quasi-uniform points of `dB_R`, each
/// carrying the equal area weight `|dB_R| / K`.
#[derive(Clone, Debug)]
pub struct SphereSamples<T> {
    pub n: usize,
    pub radius: T,
    pub directions: Vec<[T; 3]>,
    pub values: Vec<T>,
}

impl<T: Scalar> SphereSamples<T> {
    /// Synthetic profile: evaluate `f` at each unit direction.
    pub fn from_fn(n: usize, radius: T, k: usize, f: impl Fn(&[T]) -> T) -> Self {
        let directions = sphere_directions(n, k);
        let values = directions.iter().map(|d| f(&d[..n])).collect();
        Self {
            n,
            radius,
            directions,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn weight(&self) -> T {
        sphere_area(self.n, self.radius) / T::from_usize_lossy(self.len())
    }

    pub fn point(&self, k: usize) -> [T; 3] {
        let d = self.directions[k];
        [d[0] * self.radius, d[1] * self.radius, d[2] * self.radius]
    }

    /// `int_{dB_R} s dS` by the equal-weight rule.
    pub fn slice_integral(&self) -> T {
        self.weight() * self.values.iter().copied().sum::<T>()
    }

    /// Great-circle (arc length) distance between two samples.
    pub fn geodesic_distance(&self, i: usize, j: usize) -> T {
        let a = &self.directions[i];
        let b = &self.directions[j];
        let c = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).max(-T::one()).min(T::one());
        self.radius * c.acos()
    }

    /// Angle for n = 2; (polar, azimuth) for n = 3.
    pub fn angles(&self, k: usize) -> Vec<T> {
        let d = self.directions[k];
        match self.n {
            2 => {
                let mut th = d[1].atan2(d[0]);
                if th < T::zero() {
                    th += T::lit(2.0) * T::PI();
                }
                vec![th]
            }
            _ => vec![d[2].max(-T::one()).min(T::one()).acos(), d[1].atan2(d[0])],
        }
    }
}

/// Sample `s` on `dB_R` at `k` points by multilinear interpolation.
pub fn sample_sphere<T: Scalar>(s: &ScalarField<T>, radius: T, k: usize) -> Result<SphereSamples<T>> {
    let grid = s.grid();
    let n = grid.n();
    if k < 8 {
        return Err(invalid(format!("need at least 8 sphere samples, got {k}")));
    }
    if !(radius > T::zero()) || radius + grid.h() > grid.r_max() * (T::one() + T::lit(1e-12)) {
        return Err(invalid(format!(
            "sphere radius {radius} must satisfy 0 < R <= R_max - h = {}",
            grid.r_max() - grid.h()
        )));
    }
    let directions = sphere_directions::<T>(n, k);
    let mut values = Vec::with_capacity(k);
    for d in &directions {
        let x = [d[0] * radius, d[1] * radius, d[2] * radius];
        let v = s
            .interpolate(&x[..n])
            .ok_or_else(|| invalid(format!("sphere point at radius {radius} leaves the mask")))?;
        values.push(v);
    }
    Ok(SphereSamples {
        n,
        radius,
        directions,
        values,
    })
}
