//! Single-zero potentials `W: R^m -> R` and sampled checks of the standing
//! assumptions (positivity off the zero, power-law lower bound near the
//! zero, monotone radial sections, positive definite Hessian at the zero).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::scalar::{dot, norm, norm_sq, Scalar};

/// Anything the solvers can minimize against: a nonnegative potential with
/// a distinguished zero `a` and analytic first and second derivatives.
///
/// The methods are unchecked; inputs are assumed finite.
pub trait Potential<T: Scalar>: Send + Sync {
    /// Codomain dimension `m`.
    fn dim(&self) -> usize;

    /// The zero `a`.
    fn zero(&self) -> &[T];

    fn value(&self, u: &[T]) -> T;

    fn gradient(&self, u: &[T], out: &mut [T]);

    /// Row-major `m x m` Hessian.
    fn hessian(&self, u: &[T], out: &mut [T]);
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family<T> {
    /// `W = |u - a|^2 / 2`
    Quadratic,
    /// `W = |u - a|^q`, `q >= 2`
    Power { q: T },
    /// `W = sum_i c_i (u_i - a_i)^{p_i}` with even `p_i >= 2`
    AnisotropicPower { coefficients: Vec<T>, powers: Vec<u32> },
    /// `W = |u - a|^2 (1 + sin^2(u_1) / 2)`
    ProductPerturbed,
}

impl<T> Family<T> {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Quadratic => "quadratic",
            Family::Power { .. } => "power",
            Family::AnisotropicPower { .. } => "anisotropic-power",
            Family::ProductPerturbed => "product-perturbed",
        }
    }
}

/// A built-in potential together with the constants of its standing
/// assumptions: the exponent `q` and constant `c0` of the lower bound
/// `W(a + r nu) >= c0 r^q` for `r < r1`, and the radius `r0` up to which the
/// radial sections `r -> W(a + r nu)` are monotone.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec<T> {
    family: Family<T>,
    zero: Vec<T>,
    q: T,
    c0: T,
    r0: T,
    r1: T,
}

fn check_point<T: Scalar>(zero: &[T], u: &[T]) -> Result<()> {
    if u.len() != zero.len() {
        return Err(invalid(format!(
            "point has {} components, potential expects {}",
            u.len(),
            zero.len()
        )));
    }
    if u.iter().any(|x| !x.is_finite()) {
        return Err(invalid("non-finite point"));
    }
    Ok(())
}

fn check_zero<T: Scalar>(zero: &[T]) -> Result<()> {
    if zero.is_empty() {
        return Err(invalid("the zero `a` needs at least one component"));
    }
    if zero.iter().any(|x| !x.is_finite()) {
        return Err(invalid("non-finite zero `a`"));
    }
    Ok(())
}

impl<T: Scalar> PotentialSpec<T> {
    pub fn quadratic(zero: Vec<T>) -> Result<Self> {
        check_zero(&zero)?;
        Ok(Self {
            family: Family::Quadratic,
            zero,
            q: T::lit(2.0),
            c0: T::lit(0.5),
            r0: T::one(),
            r1: T::one(),
        })
    }

    pub fn power(zero: Vec<T>, q: T) -> Result<Self> {
        check_zero(&zero)?;
        if !(q >= T::lit(2.0)) || !q.is_finite() {
            return Err(invalid(format!("power family needs q >= 2, got {q}")));
        }
        Ok(Self {
            family: Family::Power { q },
            zero,
            q,
            c0: T::one(),
            r0: T::one(),
            r1: T::one(),
        })
    }

    /// Default constants: `q = max p_i` and `c0 = min c_i * m^{1 - q/2}`,
    /// valid for `r1 <= 1`.
    pub fn anisotropic_power(zero: Vec<T>, coefficients: Vec<T>, powers: Vec<u32>) -> Result<Self> {
        check_zero(&zero)?;
        let m = zero.len();
        if coefficients.len() != m || powers.len() != m {
            return Err(invalid(format!(
                "anisotropic-power needs {m} coefficients and powers, got {} and {}",
                coefficients.len(),
                powers.len()
            )));
        }
        if let Some(p) = powers.iter().find(|&&p| p < 2 || p % 2 != 0) {
            return Err(invalid(format!("anisotropic-power exponents must be even and >= 2, got {p}")));
        }
        if coefficients.iter().any(|&c| !(c > T::zero()) || !c.is_finite()) {
            return Err(invalid("anisotropic-power coefficients must be positive"));
        }
        let q_max = *powers.iter().max().expect("m >= 1");
        let q = T::from_u32(q_max).expect("small integer");
        let c_min = coefficients
            .iter()
            .copied()
            .fold(T::infinity(), T::min);
        let c0 = c_min * T::from_usize_lossy(m).powf(T::one() - q / T::lit(2.0));
        Ok(Self {
            family: Family::AnisotropicPower {
                coefficients,
                powers,
            },
            zero,
            q,
            c0,
            r0: T::one(),
            r1: T::one(),
        })
    }

    pub fn product_perturbed(zero: Vec<T>) -> Result<Self> {
        check_zero(&zero)?;
        Ok(Self {
            family: Family::ProductPerturbed,
            zero,
            q: T::lit(2.0),
            c0: T::one(),
            r0: T::one(),
            r1: T::one(),
        })
    }

    /// Override the assumption constants.
    pub fn with_constants(mut self, q: T, c0: T, r0: T, r1: T) -> Result<Self> {
        if !(q >= T::lit(2.0)) {
            return Err(invalid(format!("q must be >= 2, got {q}")));
        }
        for (name, v) in [("c0", c0), ("r0", r0), ("r1", r1)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        self.q = q;
        self.c0 = c0;
        self.r0 = r0;
        self.r1 = r1;
        Ok(self)
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }
    pub fn q(&self) -> T {
        self.q
    }
    pub fn c0(&self) -> T {
        self.c0
    }
    pub fn r0(&self) -> T {
        self.r0
    }
    pub fn r1(&self) -> T {
        self.r1
    }

    /// `W(u)`. Rejects non-finite input.
    pub fn eval(&self, u: &[T]) -> Result<T> {
        check_point(&self.zero, u)?;
        Ok(self.value(u))
    }

    pub fn grad(&self, u: &[T]) -> Result<Vec<T>> {
        check_point(&self.zero, u)?;
        let mut g = vec![T::zero(); self.zero.len()];
        self.gradient(u, &mut g);
        Ok(g)
    }

    pub fn hess(&self, u: &[T]) -> Result<Vec<T>> {
        check_point(&self.zero, u)?;
        let m = self.zero.len();
        let mut h = vec![T::zero(); m * m];
        self.hessian(u, &mut h);
        Ok(h)
    }

    pub fn verify_assumptions(&self, samples: usize, seed: u64, range_box: T) -> AssumptionReport {
        let constants = AssumptionConstants {
            q: self.q,
            c0: self.c0,
            r0: self.r0,
            r1: self.r1,
            range_box,
        };
        verify_assumptions(self, self.family.tag(), &constants, samples, seed)
    }
}

impl<T: Scalar> Potential<T> for PotentialSpec<T> {
    fn dim(&self) -> usize {
        self.zero.len()
    }

    fn zero(&self) -> &[T] {
        &self.zero
    }

    fn value(&self, u: &[T]) -> T {
        let a = &self.zero;
        match &self.family {
            Family::Quadratic => {
                let d2 = u.iter().zip(a).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>();
                T::lit(0.5) * d2
            }
            Family::Power { q } => {
                let d2 = u.iter().zip(a).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>();
                if *q == T::lit(2.0) {
                    d2
                } else {
                    d2.powf(*q / T::lit(2.0))
                }
            }
            Family::AnisotropicPower {
                coefficients,
                powers,
            } => u
                .iter()
                .zip(a)
                .zip(coefficients.iter().zip(powers))
                .map(|((&x, &y), (&c, &p))| c * (x - y).powi(p as i32))
                .sum(),
            Family::ProductPerturbed => {
                let d2 = u.iter().zip(a).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>();
                let s = u[0].sin();
                d2 * (T::one() + T::lit(0.5) * s * s)
            }
        }
    }

    fn gradient(&self, u: &[T], out: &mut [T]) {
        let a = &self.zero;
        match &self.family {
            Family::Quadratic => {
                for ((o, &x), &y) in out.iter_mut().zip(u).zip(a) {
                    *o = x - y;
                }
            }
            Family::Power { q } => {
                let two = T::lit(2.0);
                let d2 = u.iter().zip(a).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>();
                let factor = if *q == two {
                    two
                } else if d2 == T::zero() {
                    T::zero()
                } else {
                    *q * d2.powf((*q - two) / two)
                };
                for ((o, &x), &y) in out.iter_mut().zip(u).zip(a) {
                    *o = factor * (x - y);
                }
            }
            Family::AnisotropicPower {
                coefficients,
                powers,
            } => {
                for (i, o) in out.iter_mut().enumerate() {
                    let p = powers[i];
                    let d = u[i] - a[i];
                    *o = coefficients[i] * T::from_u32(p).unwrap() * d.powi(p as i32 - 1);
                }
            }
            Family::ProductPerturbed => {
                let d2 = u.iter().zip(a).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>();
                let (s, c) = u[0].sin_cos();
                let factor = T::lit(2.0) * (T::one() + T::lit(0.5) * s * s);
                for ((o, &x), &y) in out.iter_mut().zip(u).zip(a) {
                    *o = factor * (x - y);
                }
                out[0] += d2 * s * c;
            }
        }
    }

    fn hessian(&self, u: &[T], out: &mut [T]) {
        let a = &self.zero;
        let m = a.len();
        out.iter_mut().for_each(|h| *h = T::zero());
        match &self.family {
            Family::Quadratic => {
                for i in 0..m {
                    out[i * m + i] = T::one();
                }
            }
            Family::Power { q } => {
                let two = T::lit(2.0);
                let d: Vec<T> = u.iter().zip(a).map(|(&x, &y)| x - y).collect();
                let d2 = norm_sq(&d);
                if *q == two {
                    for i in 0..m {
                        out[i * m + i] = two;
                    }
                } else if d2 > T::zero() {
                    // q |d|^{q-2} (I + (q-2) d d^T / |d|^2)
                    let base = *q * d2.powf((*q - two) / two);
                    for i in 0..m {
                        for j in 0..m {
                            let outer = (*q - two) * d[i] * d[j] / d2;
                            let id = if i == j { T::one() } else { T::zero() };
                            out[i * m + j] = base * (id + outer);
                        }
                    }
                }
            }
            Family::AnisotropicPower {
                coefficients,
                powers,
            } => {
                for i in 0..m {
                    let p = powers[i] as i32;
                    let d = u[i] - a[i];
                    out[i * m + i] = coefficients[i]
                        * T::from_i32(p * (p - 1)).unwrap()
                        * d.powi(p - 2);
                }
            }
            Family::ProductPerturbed => {
                let d: Vec<T> = u.iter().zip(a).map(|(&x, &y)| x - y).collect();
                let d2 = norm_sq(&d);
                let s = u[0].sin();
                let two_u = T::lit(2.0) * u[0];
                let factor = T::lit(2.0) * (T::one() + T::lit(0.5) * s * s);
                for i in 0..m {
                    out[i * m + i] = factor;
                }
                let s2 = two_u.sin();
                for j in 0..m {
                    out[j] += s2 * d[j];
                    out[j * m] += s2 * d[j];
                }
                out[0] += d2 * two_u.cos();
            }
        }
    }
}

/// Constants the sampled assumption checks are run against.
#[derive(Clone, Copy, Debug)]
pub struct AssumptionConstants<T> {
    pub q: T,
    pub c0: T,
    pub r0: T,
    pub r1: T,
    /// Half-width of the box around `a` on which positivity is sampled.
    pub range_box: T,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct WorstSample {
    pub r: f64,
    pub direction: Vec<f64>,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct AssumptionReport {
    pub family: String,
    pub zero: Vec<f64>,
    pub q: f64,
    pub c0: f64,
    pub r0: f64,
    pub r1: f64,
    pub range_box: f64,
    /// `W > 0` at every sampled point other than `a`.
    pub pos_ok: bool,
    pub pos_min_value: f64,
    pub pos_worst_point: Vec<f64>,
    /// `W > 0` on every sampled ray inside the ball of radius `2 r0`.
    pub pos_near_zero_ok: bool,
    /// `W(a + r nu) >= c0 r^q` on `(0, r1)`. Margin is `W / r^q - c0`.
    pub katzour_ok: bool,
    pub katzour_worst: WorstSample,
    /// Radial sections strictly increasing on `(0, r0]`.
    pub monot_ok: bool,
    /// Radial sections nondecreasing on `(0, r0]`.
    pub monot_nondecreasing_ok: bool,
    /// Smallest increment between consecutive sampled radii.
    pub monot_worst: WorstSample,
    /// `nu . W_uu(a) nu > 0` for every sampled direction.
    pub hessian_pd_ok: bool,
    pub hessian_min_rayleigh: f64,
    pub hessian_worst_direction: Vec<f64>,
    pub directions: usize,
    pub radii: usize,
    pub box_samples: usize,
    pub seed: u64,
}

/// Deterministic unit directions: the coordinate axes (both signs) followed
/// by `count` seeded Gaussian directions.
pub fn sample_directions<T: Scalar>(m: usize, count: usize, seed: u64) -> Vec<Vec<T>> {
    let mut dirs = Vec::with_capacity(2 * m + count);
    for i in 0..m {
        for sign in [1.0, -1.0] {
            let mut e = vec![T::zero(); m];
            e[i] = T::lit(sign);
            dirs.push(e);
        }
    }
    if m == 1 {
        return dirs;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while dirs.len() < 2 * m + count {
        let v: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len < 1e-12 {
            continue;
        }
        dirs.push(v.iter().map(|x| T::lit(x / len)).collect());
    }
    dirs
}

const MARGIN_ROUNDING: f64 = 1e-10;

/// Sampled check of the standing assumptions on `potential`.
///
/// Directions come from [`sample_directions`]; radii are `samples` equally
/// spaced points in `(0, max(r0, r1)]` (and in `(0, 2 r0)` for the near-zero
/// positivity check); positivity is additionally sampled at `samples`
/// uniform points of the range box.
pub fn verify_assumptions<T: Scalar, P: Potential<T> + ?Sized>(
    potential: &P,
    family: &str,
    constants: &AssumptionConstants<T>,
    samples: usize,
    seed: u64,
) -> AssumptionReport {
    let samples = samples.max(1);
    let m = potential.dim();
    let a = potential.zero().to_vec();
    let dirs = sample_directions::<T>(m, samples, seed);
    let r_top = constants.r0.max(constants.r1);
    let radius = |k: usize, top: T| top * T::from_usize_lossy(k) / T::from_usize_lossy(samples);
    let point = |r: T, nu: &[T]| -> Vec<T> { a.iter().zip(nu).map(|(&ai, &ni)| ai + r * ni).collect() };
    let to64 = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<_>>();

    let mut pos_min = f64::INFINITY;
    let mut pos_worst = a.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
    let mut note_pos = |w: T, u: &[T]| {
        let w = w.as_f64();
        if w < pos_min || !w.is_finite() {
            pos_min = w;
            pos_worst = to64(u);
        }
    };

    let mut katz = WorstSample {
        r: f64::NAN,
        direction: vec![],
        margin: f64::INFINITY,
    };
    let mut mono = WorstSample {
        r: f64::NAN,
        direction: vec![],
        margin: f64::INFINITY,
    };

    for nu in &dirs {
        let mut prev: Option<T> = None;
        for k in 1..=samples {
            let r = radius(k, r_top);
            let u = point(r, nu);
            let w = potential.value(&u);
            note_pos(w, &u);
            if r < constants.r1 {
                let margin = (w / r.powf(constants.q) - constants.c0).as_f64();
                if margin < katz.margin {
                    katz = WorstSample {
                        r: r.as_f64(),
                        direction: to64(nu),
                        margin,
                    };
                }
            }
            if r <= constants.r0 {
                if let Some(wp) = prev {
                    let inc = (w - wp).as_f64();
                    if inc < mono.margin {
                        mono = WorstSample {
                            r: r.as_f64(),
                            direction: to64(nu),
                            margin: inc,
                        };
                    }
                }
                prev = Some(w);
            }
        }
    }

    let mut near_ok = true;
    for nu in &dirs {
        for k in 1..samples {
            let r = radius(k, T::lit(2.0) * constants.r0);
            if !(potential.value(&point(r, nu)) > T::zero()) {
                near_ok = false;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let half = constants.range_box.as_f64();
    for _ in 0..samples {
        let u: Vec<T> = a
            .iter()
            .map(|&ai| ai + T::lit(rng.random_range(-half..=half)))
            .collect();
        if u == a {
            continue;
        }
        note_pos(potential.value(&u), &u);
    }

    let mut hess = vec![T::zero(); m * m];
    potential.hessian(&a, &mut hess);
    let mut hv = vec![T::zero(); m];
    let mut ray_min = f64::INFINITY;
    let mut ray_dir = vec![];
    for nu in &dirs {
        for i in 0..m {
            hv[i] = dot(&hess[i * m..(i + 1) * m], nu);
        }
        let rq = dot(&hv, nu).as_f64();
        if rq < ray_min {
            ray_min = rq;
            ray_dir = to64(nu);
        }
    }

    let c0 = constants.c0.as_f64();
    AssumptionReport {
        family: family.to_string(),
        zero: to64(&a),
        q: constants.q.as_f64(),
        c0,
        r0: constants.r0.as_f64(),
        r1: constants.r1.as_f64(),
        range_box: half,
        pos_ok: pos_min > 0.0,
        pos_min_value: pos_min,
        pos_worst_point: pos_worst,
        pos_near_zero_ok: near_ok,
        katzour_ok: katz.margin >= -MARGIN_ROUNDING * c0.max(1.0),
        katzour_worst: katz,
        monot_ok: mono.margin > 0.0,
        monot_nondecreasing_ok: mono.margin >= 0.0,
        monot_worst: mono,
        hessian_pd_ok: ray_min > 0.0,
        hessian_min_rayleigh: ray_min,
        hessian_worst_direction: ray_dir,
        directions: dirs.len(),
        radii: samples,
        box_samples: samples,
        seed,
    }
}

/// `|u - a|`
pub fn distance_to_zero<T: Scalar, P: Potential<T> + ?Sized>(potential: &P, u: &[T]) -> T {
    let d: Vec<T> = u.iter().zip(potential.zero()).map(|(&x, &y)| x - y).collect();
    norm(&d)
}
