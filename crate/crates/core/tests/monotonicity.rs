use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vaclab::error::Error;
use vaclab::field::{Grid, VectorField};
use vaclab::monotonicity::{
    divergence_sup, monotone_quantities, pohozaev_balance, pohozaev_density, positivity_check, stress_tensor,
    trace_identity_defect, MonotonicityOptions,
};
use vaclab::potential::{Potential, PotentialSpec};
use vaclab::field::integrate_ball;

/// Smooth random field: a few random plane waves per component.
fn smooth_random(grid: &Arc<Grid<f64>>, m: usize, seed: u64) -> VectorField<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let waves: Vec<Vec<([f64; 3], f64, f64)>> = (0..m)
        .map(|_| {
            (0..4)
                .map(|_| {
                    let k = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
                    (k, rng.random_range(0.0..6.3), rng.random_range(-1.0..1.0))
                })
                .collect()
        })
        .collect();
    let n = grid.n();
    VectorField::from_fn(grid.clone(), m, |x, o| {
        for (oc, comp) in o.iter_mut().zip(&waves) {
            *oc = comp
                .iter()
                .map(|(k, ph, a)| a * ((0..n).map(|i| k[i] * x[i]).sum::<f64>() + ph).sin())
                .sum();
        }
    })
}

#[test]
fn tensor_of_zero_field_vanishes() {
    let g = Arc::new(Grid::new(2, 0.1, 1.0).unwrap());
    let w = PotentialSpec::quadratic(vec![0.2, 0.3]).unwrap();
    let u = VectorField::constant(g.clone(), &[0.2, 0.3]);
    let t = stress_tensor(&u, &w);
    for i in 0..g.len() {
        assert!(t.at(i).iter().all(|&v| v == 0.0));
    }
    let p = pohozaev_balance(&u, &w, 0.8, 64).unwrap();
    assert_eq!((p.volume, p.boundary, p.inequality_gap), (0.0, 0.0, 0.0));
}

#[test]
fn exponential_tensor_closed_form() {
    // u = e^{-x1}, W = u^2 / 2: T11 = 0, T22 = -e^{-2 x1}, T12 = 0
    let w = PotentialSpec::quadratic(vec![0.0]).unwrap();
    let err = |h: f64| {
        let g = Arc::new(Grid::new(2, h, 1.0).unwrap());
        let u = VectorField::from_fn(g.clone(), 1, |x: &[f64], o| o[0] = (-x[0]).exp());
        let t = stress_tensor(&u, &w);
        let mut worst = 0.0f64;
        for &i in g.interior() {
            let x = g.coord(i);
            worst = worst
                .max(t.get(i, 0, 0).abs())
                .max(t.get(i, 0, 1).abs())
                .max((t.get(i, 1, 1) + (-2.0 * x[0]).exp()).abs());
        }
        (worst, divergence_sup(&t))
    };
    let (e1, d1) = err(0.1);
    let (e2, d2) = err(0.05);
    assert!(e1 < 0.05 && (e1 / e2).log2() > 1.8, "{e1} {e2}");
    assert!((d1 / d2).log2() > 1.8, "{d1} {d2}");
}

#[test]
fn algebraic_identities_hold_pointwise() {
    for (n, m, seed) in [(2, 2, 1), (2, 1, 2), (3, 2, 3), (3, 3, 4)] {
        let g = Arc::new(Grid::new(n, 0.1, 0.8).unwrap());
        let w = PotentialSpec::product_perturbed(vec![0.1; m]).unwrap();
        let u = smooth_random(&g, m, seed);
        let t = stress_tensor(&u, &w);
        assert!(trace_identity_defect(&t, &u, &w) < 1e-12);
        let p = positivity_check(&t, &u, &w);
        assert!(p.min_eigenvalue >= -1e-12, "{p:?}");
        assert!(p.gram_defect < 1e-12, "{p:?}");
        for i in 0..g.len() {
            for a in 0..n {
                for b in 0..n {
                    assert_eq!(t.get(i, a, b), t.get(i, b, a));
                }
            }
        }
    }
}

#[test]
fn scalar_gram_matrix_has_rank_one() {
    let g = Arc::new(Grid::new(2, 0.1, 0.8).unwrap());
    let w = PotentialSpec::quadratic(vec![0.0]).unwrap();
    let u = smooth_random(&g, 1, 9);
    let t = stress_tensor(&u, &w);
    for &i in g.interior() {
        let d = u.gradient(i);
        let e = 0.5 * d.norm_sq() + w.value(u.node(i));
        let a = [t.get(i, 0, 0) + e, t.get(i, 0, 1), t.get(i, 1, 0), t.get(i, 1, 1) + e];
        let det = a[0] * a[3] - a[1] * a[2];
        assert!(det.abs() < 1e-12 * (1.0 + d.norm_sq().powi(2)));
        assert!((a[0] + a[3] - d.norm_sq()).abs() < 1e-12);
    }
}

#[test]
fn random_field_has_divergent_tensor() {
    let g = Arc::new(Grid::new(2, 0.1, 1.0).unwrap());
    let w = PotentialSpec::quadratic(vec![0.0, 0.0]).unwrap();
    let u = smooth_random(&g, 2, 5);
    assert!(divergence_sup(&stress_tensor(&u, &w)) > 1e-3);
}

fn chord_integral(f: impl Fn(f64) -> f64, r: f64) -> f64 {
    let k = 100_000;
    let dx = 2.0 * r / k as f64;
    (0..k)
        .map(|i| {
            let x = -r + (i as f64 + 0.5) * dx;
            f(x) * 2.0 * (r * r - x * x).sqrt() * dx
        })
        .sum()
}

#[test]
fn pohozaev_sides_agree_for_exponential() {
    let w = PotentialSpec::quadratic(vec![0.0]).unwrap();
    let g = Arc::new(Grid::new(2, 0.02, 1.1).unwrap());
    let u = VectorField::from_fn(g, 1, |x: &[f64], o| o[0] = (-x[0]).exp());
    let p = pohozaev_balance(&u, &w, 1.0, 2000).unwrap();
    // tr T = -2W = -e^{-2 x1}
    let volume = -chord_integral(|x| (-2.0 * x).exp(), 1.0);
    // R int nu.T.nu = int_0^{2pi} -e^{-2 cos t} sin^2 t dt on the unit circle
    let k = 100_000;
    let boundary: f64 = (0..k)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / k as f64;
            -(-2.0 * t.cos()).exp() * t.sin().powi(2)
        })
        .sum::<f64>()
        * 2.0
        * std::f64::consts::PI
        / k as f64;
    assert!((volume - boundary).abs() < 1e-6 * volume.abs());
    assert!((p.volume / volume - 1.0).abs() < 0.02, "{} {volume}", p.volume);
    assert!((p.boundary / boundary - 1.0).abs() < 0.02, "{} {boundary}", p.boundary);
    assert!(p.inequality_gap >= 0.0);
}

#[test]
fn pohozaev_sides_disagree_off_solutions() {
    let g = Arc::new(Grid::new(2, 0.05, 1.2).unwrap());
    let w = PotentialSpec::quadratic(vec![0.0, 0.0]).unwrap();
    let u = smooth_random(&g, 2, 11);
    let p = pohozaev_balance(&u, &w, 1.0, 512).unwrap();
    assert!(p.identity_residual > 1e-2, "{p:?}");
}

#[test]
fn monotone_quantities_of_zero_field() {
    let g = Arc::new(Grid::new(2, 0.1, 2.0).unwrap());
    let w = PotentialSpec::quadratic(vec![0.0]).unwrap();
    let u = VectorField::constant(g, &[0.0]);
    let opts = MonotonicityOptions { residual_tol: 1e-8, c_m: 0.05 };
    let rep = monotone_quantities(&u, &w, &[0.5, 1.0, 1.5, 2.0], &opts).unwrap();
    assert!(rep.f.iter().chain(&rep.energy).all(|&v| v == 0.0));
    assert!(rep.weak_violations.is_empty());
    assert_eq!(rep.strong_violations, Some(vec![]));
}

#[test]
fn non_solutions_are_rejected() {
    let g = Arc::new(Grid::new(2, 0.1, 1.0).unwrap());
    let w = PotentialSpec::quadratic(vec![0.0, 0.0]).unwrap();
    let u = smooth_random(&g, 2, 1);
    let opts = MonotonicityOptions { residual_tol: 1e-3, c_m: 0.05 };
    assert!(matches!(
        monotone_quantities(&u, &w, &[0.5], &opts),
        Err(Error::NotASolution { .. })
    ));
}

#[test]
fn radial_three_dimensional_solution_is_weakly_monotone() {
    // u = sinh(r) / r solves Lap u = u in R^3
    let w = PotentialSpec::quadratic(vec![0.0]).unwrap();
    let g = Arc::new(Grid::new(3, 0.05, 2.2).unwrap());
    let u = VectorField::from_fn(g, 1, |x: &[f64], o| {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        o[0] = if r < 1e-12 { 1.0 } else { r.sinh() / r };
    });
    let radii: Vec<f64> = (0..=12).map(|i| 0.5 + 1.5 * i as f64 / 12.0).collect();
    let opts = MonotonicityOptions { residual_tol: 1e-2, c_m: 0.05 };
    let rep = monotone_quantities(&u, &w, &radii, &opts).unwrap();
    // 1-D oracle: f(R) = 4 pi int_0^R (u'^2 / 2 + 3 u^2 / 2) r^2 dr
    let oracle = |big_r: f64| {
        let k = 200_000;
        let dr = big_r / k as f64;
        (0..k)
            .map(|i| {
                let r = (i as f64 + 0.5) * dr;
                let u = r.sinh() / r;
                let du = (r * r.cosh() - r.sinh()) / (r * r);
                4.0 * std::f64::consts::PI * (0.5 * du * du + 1.5 * u * u) * r * r * dr
            })
            .sum::<f64>()
    };
    for (r, f) in rep.radii.iter().zip(&rep.f) {
        let exact = oracle(*r);
        assert!((f / exact - 1.0).abs() < 0.01, "R={r}: {f} vs {exact}");
    }
    for w2 in rep.weak.windows(2) {
        assert!(w2[1] >= w2[0] - 1e-3);
    }
}

#[test]
fn exponential_in_the_plane_is_monotone() {
    let w = PotentialSpec::quadratic(vec![0.0]).unwrap();
    let g = Arc::new(Grid::new(2, 0.05, 2.0).unwrap());
    let u = VectorField::from_fn(g, 1, |x: &[f64], o| o[0] = x[0].exp());
    let radii: Vec<f64> = (1..=10).map(|i| 0.2 * i as f64).collect();
    let opts = MonotonicityOptions { residual_tol: 1e-2, c_m: 0.05 };
    let rep = monotone_quantities(&u, &w, &radii, &opts).unwrap();
    assert!(rep.weak_violations.is_empty());
    assert!(rep.modica.abs() < 0.05);
}

/// `c W` for a fixed quadratic `W`.
struct Scaled(f64);

impl Potential<f64> for Scaled {
    fn dim(&self) -> usize {
        1
    }
    fn zero(&self) -> &[f64] {
        &[0.0]
    }
    fn value(&self, u: &[f64]) -> f64 {
        self.0 * 0.5 * u[0] * u[0]
    }
    fn gradient(&self, u: &[f64], out: &mut [f64]) {
        out[0] = self.0 * u[0];
    }
    fn hessian(&self, _: &[f64], out: &mut [f64]) {
        out[0] = self.0;
    }
}

#[test]
fn potential_part_scales_linearly() {
    let g = Arc::new(Grid::new(3, 0.1, 1.0).unwrap());
    let u = smooth_random(&g, 1, 4);
    let f = |c: f64| integrate_ball(&pohozaev_density(&u, &Scaled(c)), 0.9).unwrap();
    let (f0, f1, f2) = (f(0.0), f(1.0), f(2.0));
    assert!(((f2 - f0) - 2.0 * (f1 - f0)).abs() < 1e-12 * f2.abs().max(1.0));
}
