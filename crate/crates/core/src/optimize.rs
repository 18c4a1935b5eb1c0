//! Steepest descent with Barzilai-Borwein steps and an Armijo backtracking
//! safeguard. Accepted iterates never increase the energy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// A smooth energy over a flat vector of unknowns. Pinned entries must get
/// a zero gradient so the descent never moves them.
pub trait Objective<T: Scalar>: Sync {
    fn energy(&self, x: &[T]) -> T;

    fn gradient(&self, x: &[T], g: &mut [T]);

    /// `E(x + t d) - E(x)`, evaluated from local differences so that it stays
    /// accurate when it is far below `E(x)` in magnitude.
    fn energy_change(&self, x: &[T], d: &[T], t: T) -> T;

    /// Stationarity certificate computed from a gradient.
    fn residual(&self, g: &[T]) -> T;

    /// A step that is safe for the quadratic part of the energy, measured in
    /// the metric below.
    fn initial_step(&self) -> T;

    /// Diagonal metric `w`: the descent direction is `-g_i / w_i`. `None`
    /// means the identity.
    fn metric(&self) -> Option<&[T]> {
        None
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DescentOptions<T> {
    pub tol: T,
    pub max_iter: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo: T,
    pub max_backtracks: usize,
}

impl<T: Scalar> DescentOptions<T> {
    pub fn new(tol: T, max_iter: usize) -> Self {
        Self {
            tol,
            max_iter,
            armijo: T::lit(1e-4),
            max_backtracks: 60,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct StepSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub backtracks: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DescentOutcome {
    pub iterations: usize,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub residual: f64,
    pub converged: bool,
    /// Line search could not find a decrease before the residual target was met.
    pub stalled: bool,
    pub steps: StepSummary,
    /// Energy after each accepted iterate, starting with the initial energy.
    pub energy_trace: Vec<f64>,
}

/// Minimize `obj` starting from `x` (updated in place).
pub fn descend<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    x: &mut [T],
    opts: &DescentOptions<T>,
) -> Result<DescentOutcome> {
    let len = x.len();
    let metric = obj.metric();
    let mut g = vec![T::zero(); len];
    let mut g_new = vec![T::zero(); len];
    let mut d = vec![T::zero(); len];

    let mut energy = obj.energy(x);
    if !energy.is_finite() {
        return Err(Error::Diverged {
            iteration: 0,
            reason: "initial energy is not finite".into(),
            energy_trace: vec![energy.as_f64()],
        });
    }
    let initial_energy = energy.as_f64();
    let mut trace = vec![initial_energy];
    obj.gradient(x, &mut g);
    let mut residual = obj.residual(&g);

    let mut steps = StepSummary {
        min: f64::INFINITY,
        max: 0.0,
        mean: 0.0,
        backtracks: 0,
    };
    let mut step_sum = 0.0;
    let mut alpha = obj.initial_step();
    let alpha_floor = alpha * T::lit(1e-6);
    let alpha_ceiling = alpha * T::lit(1e8);
    let mut iterations = 0;
    let mut stalled = false;

    while residual > opts.tol && iterations < opts.max_iter {
        match metric {
            Some(w) => {
                for i in 0..len {
                    d[i] = -g[i] / w[i];
                }
            }
            None => {
                for (di, &gi) in d.iter_mut().zip(&g) {
                    *di = -gi;
                }
            }
        }
        let slope = dot(&g, &d);
        let mut t = alpha;
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let change = obj.energy_change(x, &d, t);
            if change.is_finite() && change <= opts.armijo * t * slope {
                accepted = Some(change);
                break;
            }
            steps.backtracks += 1;
            t = t * T::lit(0.5);
        }
        let Some(change) = accepted else {
            let probe = obj.energy_change(x, &d, t);
            if !probe.is_finite() {
                return Err(Error::Diverged {
                    iteration: iterations,
                    reason: "energy is not finite along the descent direction".into(),
                    energy_trace: trace,
                });
            }
            stalled = true;
            break;
        };
        debug_assert!(change <= T::zero());

        for (xi, &di) in x.iter_mut().zip(&d) {
            *xi += t * di;
        }
        energy += change;
        iterations += 1;
        trace.push(energy.as_f64());
        let tf = t.as_f64();
        steps.min = steps.min.min(tf);
        steps.max = steps.max.max(tf);
        step_sum += tf;

        obj.gradient(x, &mut g_new);
        // s = t d, y = g_new - g
        let mut sy = T::zero();
        let mut ss = T::zero();
        let mut yy = T::zero();
        for i in 0..len {
            let s = t * d[i];
            let y = g_new[i] - g[i];
            let wi = metric.map_or(T::one(), |w| w[i]);
            sy += s * y;
            ss += wi * s * s;
            yy += y * y / wi;
        }
        alpha = if sy > T::zero() {
            if iterations % 2 == 1 {
                ss / sy
            } else {
                sy / yy
            }
        } else {
            t * T::lit(2.0)
        };
        alpha = alpha.max(alpha_floor).min(alpha_ceiling);
        std::mem::swap(&mut g, &mut g_new);
        residual = obj.residual(&g);
    }

    if iterations > 0 {
        steps.mean = step_sum / iterations as f64;
    } else {
        steps.min = 0.0;
    }
    // re-evaluate to drop accumulated rounding in the running sum
    let final_energy = obj.energy(x).as_f64();
    Ok(DescentOutcome {
        iterations,
        initial_energy,
        final_energy,
        residual: residual.as_f64(),
        converged: residual <= opts.tol,
        stalled,
        steps,
        energy_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `sum_i c_i (x_i - 1)^2 / 2 + x_0^4`, entry 3 pinned.
    struct Bowl {
        c: Vec<f64>,
    }

    impl Objective<f64> for Bowl {
        fn energy(&self, x: &[f64]) -> f64 {
            self.c
                .iter()
                .zip(x)
                .map(|(c, xi)| 0.5 * c * (xi - 1.0).powi(2))
                .sum::<f64>()
                + x[0].powi(4)
        }
        fn gradient(&self, x: &[f64], g: &mut [f64]) {
            for i in 0..x.len() {
                g[i] = self.c[i] * (x[i] - 1.0);
            }
            g[0] += 4.0 * x[0].powi(3);
            g[3] = 0.0;
        }
        fn energy_change(&self, x: &[f64], d: &[f64], t: f64) -> f64 {
            let quad: f64 = (0..x.len())
                .map(|i| self.c[i] * t * d[i] * ((x[i] - 1.0) + 0.5 * t * d[i]))
                .sum();
            quad + (x[0] + t * d[0]).powi(4) - x[0].powi(4)
        }
        fn residual(&self, g: &[f64]) -> f64 {
            g.iter().fold(0.0, |a, b| a.max(b.abs()))
        }
        fn initial_step(&self) -> f64 {
            0.01
        }
    }

    #[test]
    fn converges_and_keeps_pinned_entry() {
        let obj = Bowl {
            c: vec![1.0, 10.0, 100.0, 5.0, 0.5],
        };
        let mut x = vec![0.0, 0.0, 0.0, -3.0, 0.0];
        let out = descend(&obj, &mut x, &DescentOptions::new(1e-10, 10_000)).unwrap();
        assert!(out.converged, "{out:?}");
        assert_eq!(x[3], -3.0);
        assert!((x[1] - 1.0).abs() < 1e-9);
        assert!(out.energy_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn stationary_start_takes_no_step() {
        let obj = Bowl {
            c: vec![1.0, 1.0, 1.0, 1.0, 1.0],
        };
        // x_0 solves (x - 1) + 4 x^3 = 0
        let mut x0 = 0.5f64;
        for _ in 0..100 {
            x0 -= ((x0 - 1.0) + 4.0 * x0.powi(3)) / (1.0 + 12.0 * x0 * x0);
        }
        let mut x = vec![x0, 1.0, 1.0, 7.0, 1.0];
        let out = descend(&obj, &mut x, &DescentOptions::new(1e-12, 100)).unwrap();
        assert_eq!(out.iterations, 0);
        assert!(out.converged);
    }
}
