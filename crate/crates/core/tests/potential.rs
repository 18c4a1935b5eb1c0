use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vaclab::potential::PotentialSpec;

fn families(a: &[f64]) -> Vec<PotentialSpec<f64>> {
    let a = a.to_vec();
    vec![
        PotentialSpec::quadratic(a.clone()).unwrap(),
        PotentialSpec::power(a.clone(), 2.5).unwrap(),
        PotentialSpec::power(a.clone(), 4.0).unwrap(),
        PotentialSpec::anisotropic_power(a.clone(), vec![1.5, 0.5, 2.0], vec![2, 4, 6]).unwrap(),
        PotentialSpec::product_perturbed(a).unwrap(),
    ]
}

fn random_point(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(-1.5..1.5)).collect()
}

#[test]
fn gradient_matches_central_differences() {
    let a = [0.2, -0.4, 0.1];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let step = 1e-5;
    for w in families(&a) {
        for _ in 0..100 {
            let u = random_point(&mut rng, 3);
            let g = w.grad(&u).unwrap();
            for k in 0..3 {
                let mut up = u.clone();
                let mut dn = u.clone();
                up[k] += step;
                dn[k] -= step;
                let fd = (w.eval(&up).unwrap() - w.eval(&dn).unwrap()) / (2.0 * step);
                let rel = (g[k] - fd).abs() / g[k].abs().max(1.0);
                assert!(rel < 1e-6, "{:?} at {u:?}, component {k}: {} vs {fd}", w.family(), g[k]);
            }
        }
    }
}

#[test]
fn hessian_matches_differences_of_gradient() {
    let a = [0.2, -0.4, 0.1];
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let step = 1e-5;
    for w in families(&a) {
        for _ in 0..100 {
            let u = random_point(&mut rng, 3);
            let hess = w.hess(&u).unwrap();
            for j in 0..3 {
                let mut up = u.clone();
                let mut dn = u.clone();
                up[j] += step;
                dn[j] -= step;
                let gp = w.grad(&up).unwrap();
                let gm = w.grad(&dn).unwrap();
                for i in 0..3 {
                    let fd = (gp[i] - gm[i]) / (2.0 * step);
                    let err = (hess[i * 3 + j] - fd).abs() / hess[i * 3 + j].abs().max(1.0);
                    assert!(err < 1e-5, "{:?} at {u:?}, entry ({i},{j})", w.family());
                }
            }
        }
    }
}

#[test]
fn hessian_is_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for w in families(&[0.0, 0.0, 0.0]) {
        let u = random_point(&mut rng, 3);
        let h = w.hess(&u).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((h[i * 3 + j] - h[j * 3 + i]).abs() <= 1e-12 * h[i * 3 + j].abs().max(1.0));
            }
        }
    }
}

/// Smallest `W(r nu) / r^4 - c0` over a fine grid of unit directions and the
/// radii `r1 k / s`, `k < s`, that the sampled check visits.
fn katzour_oracle(w: &PotentialSpec<f64>, q: f64, c0: f64, s: usize) -> f64 {
    let mut worst = f64::INFINITY;
    for j in 0..20_000 {
        let t = std::f64::consts::TAU * j as f64 / 20_000.0;
        for k in 1..s {
            let r = k as f64 / s as f64;
            let v = w.eval(&[r * t.cos(), r * t.sin()]).unwrap();
            worst = worst.min(v / r.powf(q) - c0);
        }
    }
    worst
}

#[test]
fn anisotropic_lower_bound_needs_the_largest_power() {
    let s = 64;
    let w = PotentialSpec::anisotropic_power(vec![0.0, 0.0], vec![1.0, 1.0], vec![2, 4]).unwrap();
    let rep = w.verify_assumptions(s, 5, 2.0);
    assert_eq!(rep.q, 4.0);
    assert!(rep.katzour_ok && rep.pos_ok && rep.monot_ok);

    // The sampled directions are a subset of the circle, so the sampled
    // margin can only sit above the dense one, and not by much.
    let dense = katzour_oracle(&w, 4.0, rep.c0, s);
    assert!(rep.katzour_worst.margin >= dense - 1e-12);
    assert!(rep.katzour_worst.margin - dense < 5e-3, "{} vs {dense}", rep.katzour_worst.margin);

    // With q = 2 the ratio W / r^2 -> nu_1^2 vanishes along the u_2 axis.
    let w2 = w.clone().with_constants(2.0, 0.5, 1.0, 1.0).unwrap();
    let rep2 = w2.verify_assumptions(s, 5, 2.0);
    assert!(!rep2.katzour_ok);
    let d = &rep2.katzour_worst.direction;
    assert!(d[0].abs() < 1e-12 && (d[1].abs() - 1.0).abs() < 1e-12, "{d:?}");
    assert!(katzour_oracle(&w, 2.0, 0.5, s) < 0.0);
}

#[test]
fn power_family_meets_its_own_constants() {
    for q in [2.0, 2.5, 3.0, 4.0, 6.0] {
        let w = PotentialSpec::power(vec![0.5, -0.5], q).unwrap();
        let rep = w.verify_assumptions(128, 9, 2.0);
        assert!(rep.katzour_ok, "q = {q}");
        assert!(rep.katzour_worst.margin >= -1e-12, "q = {q}: {}", rep.katzour_worst.margin);
        assert!(rep.pos_ok && rep.monot_ok && rep.pos_near_zero_ok);
        assert_eq!(rep.hessian_pd_ok, q == 2.0, "q = {q}");
    }
}

#[test]
fn single_precision_agrees_with_double() {
    let w64 = PotentialSpec::product_perturbed(vec![0.25f64, -0.5]).unwrap();
    let w32 = PotentialSpec::product_perturbed(vec![0.25f32, -0.5]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..50 {
        let u = random_point(&mut rng, 2);
        let u32: Vec<f32> = u.iter().map(|&x| x as f32).collect();
        let v64 = w64.eval(&u).unwrap();
        let v32 = w32.eval(&u32).unwrap() as f64;
        assert!((v64 - v32).abs() <= 1e-5 * v64.max(1.0));
    }
}
