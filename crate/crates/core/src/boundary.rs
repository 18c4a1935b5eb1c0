//! Dirichlet data generators and initial guesses for the minimizer.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::field::{Grid, VectorField};
use crate::optimize::{descend, DescentOptions, Objective};
use crate::potential::Potential;
use crate::scalar::{norm, CompensatedSum, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryKind<T> {
    /// `g = a`.
    ConstantA,
    /// `g = a + phi(|x|) nu`, with `phi` the radial minimizer of the energy
    /// restricted to fields of fixed direction `nu` and `phi(R_max) = magnitude`.
    RadialProfile { direction: Vec<T>, magnitude: T },
    /// `g = a + magnitude (cos k theta, sin k theta, 0, ...)`; for `m = 1`
    /// only the cosine.
    Angular { magnitude: T, winding: i32 },
    /// Seeded sum of random sinusoids of the boundary direction, rescaled so
    /// that the largest boundary value of `|g - a|` equals `magnitude`.
    RandomSmooth { magnitude: T, modes: usize, bandwidth: T, seed: u64 },
}

impl<T> BoundaryKind<T> {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::ConstantA => "constant-a",
            Self::RadialProfile { .. } => "radial-profile",
            Self::Angular { .. } => "angular",
            Self::RandomSmooth { .. } => "random-seeded",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialGuess<T> {
    /// `a + (|x| / R_max)(g(x / |x|) - a)`; the radial profile itself for
    /// radial data.
    Extension,
    /// `a` plus seeded uniform noise in `[-amplitude, amplitude]^m`.
    Random { amplitude: T, seed: u64 },
}

/// Radial profile `phi` on `[0, R]` sampled at `r_k = k dr`.
#[derive(Clone, Debug)]
pub struct RadialProfile<T> {
    pub dr: T,
    pub values: Vec<T>,
    pub residual: T,
}

impl<T: Scalar> RadialProfile<T> {
    /// Linear interpolation, continued linearly past the last sample.
    pub fn eval(&self, r: T) -> T {
        let last = self.values.len() - 1;
        let s = (r / self.dr).max(T::zero());
        let k = s.floor().to_usize().unwrap_or(last).min(last - 1);
        let f = s - T::from_usize_lossy(k);
        self.values[k] + f * (self.values[k + 1] - self.values[k])
    }
}

/// `int_0^R (phi'^2 / 2 + W(a + phi nu)) r^{n-1} dr`, discretized with
/// midpoint weights for the gradient and nodal weights for `W`.
struct RadialEnergy<'a, T, P: ?Sized> {
    n: usize,
    dr: T,
    weights: Vec<T>,
    zero: &'a [T],
    direction: &'a [T],
    potential: &'a P,
}

impl<T: Scalar, P: Potential<T> + ?Sized> RadialEnergy<'_, T, P> {
    fn node_weight(&self, k: usize) -> T {
        let n = self.n as i32;
        if k == 0 {
            (self.dr * T::lit(0.5)).powi(n) / T::from_usize_lossy(self.n)
        } else {
            (self.dr * T::from_usize_lossy(k)).powi(n - 1) * self.dr
        }
    }

    fn edge_weight(&self, k: usize) -> T {
        let mid = self.dr * (T::from_usize_lossy(k) + T::lit(0.5));
        mid.powi(self.n as i32 - 1) / self.dr
    }

    fn point(&self, phi: T, buf: &mut [T]) {
        for ((b, &a), &d) in buf.iter_mut().zip(self.zero).zip(self.direction) {
            *b = a + phi * d;
        }
    }

    fn w(&self, phi: T, buf: &mut [T]) -> T {
        self.point(phi, buf);
        self.potential.value(buf)
    }
}

impl<T: Scalar, P: Potential<T> + ?Sized> Objective<T> for RadialEnergy<'_, T, P> {
    fn energy(&self, x: &[T]) -> T {
        let mut buf = vec![T::zero(); self.zero.len()];
        let k_last = x.len() - 1;
        let mut acc = CompensatedSum::new();
        for k in 0..k_last {
            acc.add(T::lit(0.5) * self.edge_weight(k) * (x[k + 1] - x[k]).powi(2));
            acc.add(self.node_weight(k) * self.w(x[k], &mut buf));
        }
        acc.value()
    }

    fn gradient(&self, x: &[T], g: &mut [T]) {
        let m = self.zero.len();
        let mut buf = vec![T::zero(); m];
        let mut gw = vec![T::zero(); m];
        let k_last = x.len() - 1;
        for k in 0..k_last {
            let mut gk = self.edge_weight(k) * (x[k] - x[k + 1]);
            if k > 0 {
                gk += self.edge_weight(k - 1) * (x[k] - x[k - 1]);
            }
            self.point(x[k], &mut buf);
            self.potential.gradient(&buf, &mut gw);
            let dw: T = gw.iter().zip(self.direction).map(|(&a, &b)| a * b).sum();
            g[k] = gk + self.node_weight(k) * dw;
        }
        g[k_last] = T::zero();
    }

    fn energy_change(&self, x: &[T], d: &[T], t: T) -> T {
        let mut buf = vec![T::zero(); self.zero.len()];
        let k_last = x.len() - 1;
        let mut acc = CompensatedSum::new();
        for k in 0..k_last {
            let dx = x[k + 1] - x[k];
            let dd = d[k + 1] - d[k];
            acc.add(self.edge_weight(k) * t * dd * (dx + T::lit(0.5) * t * dd));
            let w1 = self.w(x[k] + t * d[k], &mut buf);
            let w0 = self.w(x[k], &mut buf);
            acc.add(self.node_weight(k) * (w1 - w0));
        }
        acc.value()
    }

    fn residual(&self, g: &[T]) -> T {
        (0..g.len() - 1)
            .map(|k| g[k].abs() / self.node_weight(k))
            .fold(T::zero(), T::max)
    }

    fn initial_step(&self) -> T {
        // the stiffest row is at the origin: 2 edge / node ~ 2^{n+1} n / dr^2
        self.dr * self.dr / T::lit(f64::from(1u32 << (self.n + 2)) * self.n as f64)
    }

    fn metric(&self) -> Option<&[T]> {
        Some(&self.weights)
    }
}

/// Solve the radial problem on `[0, radius]` with `phi(radius) = magnitude`
/// along the unit direction `direction`.
pub fn radial_profile<T: Scalar, P: Potential<T> + ?Sized>(
    potential: &P,
    n: usize,
    direction: &[T],
    magnitude: T,
    radius: T,
    dr: T,
    tol: T,
) -> Result<RadialProfile<T>> {
    if direction.len() != potential.dim() {
        return Err(invalid("profile direction has the wrong dimension"));
    }
    if !(dr > T::zero() && radius > dr) {
        return Err(invalid(format!("bad radial grid: dr = {dr}, R = {radius}")));
    }
    let count = (radius / dr).ceil().to_usize().unwrap_or(0).max(2);
    let dr = radius / T::from_usize_lossy(count);
    let mut obj = RadialEnergy {
        n,
        dr,
        weights: Vec::new(),
        zero: potential.zero(),
        direction,
        potential,
    };
    obj.weights = (0..=count).map(|k| obj.node_weight(k)).collect();
    // linear start
    let mut x: Vec<T> = (0..=count)
        .map(|k| magnitude * T::from_usize_lossy(k) / T::from_usize_lossy(count))
        .collect();
    let out = descend(&obj, &mut x, &DescentOptions::new(tol, 200_000))?;
    Ok(RadialProfile {
        dr,
        values: x,
        residual: T::lit(out.residual),
    })
}

fn unit<T: Scalar>(v: &[T]) -> Result<Vec<T>> {
    let len = norm(v);
    if !(len > T::zero()) || !len.is_finite() {
        return Err(invalid("direction must be a nonzero finite vector"));
    }
    Ok(v.iter().map(|&c| c / len).collect())
}

fn azimuth<T: Scalar>(x: &[T]) -> T {
    x[1].atan2(x[0])
}

/// Boundary value `g(x) - a` as a function of the node position.
fn offset_fn<T: Scalar, P: Potential<T> + ?Sized>(
    kind: &BoundaryKind<T>,
    grid: &Grid<T>,
    potential: &P,
) -> Result<Box<dyn Fn(&[T], &mut [T])>> {
    let m = potential.dim();
    let n = grid.n();
    Ok(match kind {
        BoundaryKind::ConstantA => Box::new(|_, o: &mut [T]| o.iter_mut().for_each(|v| *v = T::zero())),
        BoundaryKind::Angular { magnitude, winding } => {
            let (mag, k) = (*magnitude, T::lit(f64::from(*winding)));
            Box::new(move |x, o: &mut [T]| {
                o.iter_mut().for_each(|v| *v = T::zero());
                let th = azimuth(x) * k;
                o[0] = mag * th.cos();
                if m > 1 {
                    o[1] = mag * th.sin();
                }
            })
        }
        BoundaryKind::RadialProfile { direction, magnitude } => {
            let nu = unit(direction)?;
            let h = grid.h();
            let profile = radial_profile(potential, n, &nu, *magnitude, grid.r_max(), h / T::lit(4.0), T::lit(1e-9))?;
            Box::new(move |x, o: &mut [T]| {
                let r = norm(x);
                let phi = profile.eval(r);
                for (oc, &d) in o.iter_mut().zip(&nu) {
                    *oc = phi * d;
                }
            })
        }
        BoundaryKind::RandomSmooth {
            magnitude,
            modes,
            bandwidth,
            seed,
        } => {
            if *modes == 0 {
                return Err(invalid("random boundary data needs at least one mode"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            // per component: (wave vector, phase, amplitude) triples
            let mut waves: Vec<Vec<([f64; 3], f64, f64)>> = Vec::with_capacity(m);
            let bw = bandwidth.as_f64();
            for _ in 0..m {
                let comp = (0..*modes)
                    .map(|_| {
                        let mut kv = [0.0; 3];
                        for kc in kv.iter_mut().take(n) {
                            *kc = rng.random_range(-bw..=bw);
                        }
                        let phase = rng.random_range(0.0..std::f64::consts::TAU);
                        let amp = rng.random_range(-1.0..=1.0);
                        (kv, phase, amp)
                    })
                    .collect();
                waves.push(comp);
            }
            let raw = move |x: &[T], o: &mut [T]| {
                let r = norm(x).as_f64().max(1e-300);
                for (oc, comp) in o.iter_mut().zip(&waves) {
                    let mut v = 0.0;
                    for (kv, phase, amp) in comp {
                        let arg: f64 = (0..x.len()).map(|i| kv[i] * x[i].as_f64() / r).sum::<f64>() + phase;
                        v += amp * arg.sin();
                    }
                    *oc = T::lit(v);
                }
            };
            let mut buf = vec![T::zero(); m];
            let mut peak = T::zero();
            for &b in grid.boundary() {
                let x = grid.coord(b);
                raw(&x[..n], &mut buf);
                peak = peak.max(norm(&buf));
            }
            if !(peak > T::zero()) {
                return Err(invalid("random boundary data vanished identically"));
            }
            let scale = *magnitude / peak;
            Box::new(move |x, o: &mut [T]| {
                raw(x, o);
                o.iter_mut().for_each(|v| *v = *v * scale);
            })
        }
    })
}

/// A field carrying the boundary data on boundary nodes and the requested
/// initial guess on interior nodes.
pub fn initial_field<T: Scalar, P: Potential<T> + ?Sized>(
    grid: Arc<Grid<T>>,
    potential: &P,
    kind: &BoundaryKind<T>,
    guess: &InitialGuess<T>,
) -> Result<VectorField<T>> {
    let m = potential.dim();
    let n = grid.n();
    let a = potential.zero().to_vec();
    let offset = offset_fn(kind, &grid, potential)?;
    let radial = matches!(kind, BoundaryKind::RadialProfile { .. });
    let r_max = grid.r_max();
    let mut u = VectorField::constant(grid.clone(), &a);
    let mut buf = vec![T::zero(); m];
    for i in 0..grid.len() {
        if !grid.in_mask(i) {
            continue;
        }
        let x = grid.coord(i);
        let x = &x[..n];
        let r = norm(x);
        let scale = if grid.is_interior(i) && !radial {
            if matches!(guess, InitialGuess::Random { .. }) {
                continue;
            }
            r / r_max
        } else {
            T::one()
        };
        if r == T::zero() && !radial {
            continue;
        }
        offset(x, &mut buf);
        for ((o, &ac), &b) in u.node_mut(i).iter_mut().zip(&a).zip(&buf) {
            *o = ac + scale * b;
        }
    }
    if let InitialGuess::Random { amplitude, seed } = guess {
        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
        let amp = amplitude.as_f64();
        for &i in grid.interior() {
            for (o, &ac) in u.node_mut(i).iter_mut().zip(&a) {
                *o = ac + T::lit(rng.random_range(-amp..=amp));
            }
        }
    }
    Ok(u)
}
