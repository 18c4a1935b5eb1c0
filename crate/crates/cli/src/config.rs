//! Experiment configuration: one TOML file per experiment.

use serde::{Deserialize, Serialize};
use vaclab::boundary::{BoundaryKind, InitialGuess};
use vaclab::potential::PotentialSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m: usize,
    pub h: f64,
    pub r_max: f64,
    #[serde(default)]
    pub seed: u64,
    pub potential: PotentialConfig,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    /// `quadratic`, `power`, `anisotropic-power` or `product-perturbed`.
    pub family: String,
    /// The zero `a`; defaults to the origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero: Option<Vec<f64>>,
    /// Exponent of the `power` family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub powers: Option<Vec<u32>>,
    /// Overrides of the assumption constants; all four or none.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<AssumptionConstantsConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssumptionConstantsConfig {
    pub q: f64,
    pub c0: f64,
    pub r0: f64,
    pub r1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    /// `constant-a`, `radial-profile`, `angular` or `random-seeded`.
    pub kind: String,
    #[serde(default = "default_magnitude")]
    pub magnitude: f64,
    #[serde(default = "default_winding")]
    pub winding: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default = "default_bandwidth")]
    pub bandwidth: f64,
    /// Seed of the random data; defaults to the experiment seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// `extension` or `random`.
    #[serde(default = "default_guess")]
    pub initial_guess: String,
    #[serde(default = "default_guess_amplitude")]
    pub guess_amplitude: f64,
}

fn default_magnitude() -> f64 {
    0.5
}
fn default_winding() -> i32 {
    1
}
fn default_modes() -> usize {
    4
}
fn default_bandwidth() -> f64 {
    3.0
}
fn default_guess() -> String {
    "extension".into()
}
fn default_guess_amplitude() -> f64 {
    0.1
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        Self {
            kind: "constant-a".into(),
            magnitude: default_magnitude(),
            winding: default_winding(),
            direction: None,
            modes: default_modes(),
            bandwidth: default_bandwidth(),
            seed: None,
            initial_guess: default_guess(),
            guess_amplitude: default_guess_amplitude(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_tol() -> f64 {
    1e-6
}
fn default_max_iter() -> usize {
    100_000
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            max_iter: default_max_iter(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Radii for energy profiles and monotone quantities; default: a
    /// uniform schedule of 12 radii up to `R_max - h`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Normalization powers `p` of `E(R) / R^p`; default `n - 2, n - 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub powers: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// `R` of the good-radius search; `S_R` lies in `(R, 2R)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub good_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sphere_points: Option<usize>,
    /// Quadrature slack; default `1e-8 + 1e-3 h^2 |B_{R_max}|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_q: Option<f64>,
    /// `c_m` of the monotonicity tolerance `c_m h`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_m: Option<f64>,
    /// Residual a field must reach to count as a solution; default
    /// `10 * solver.tol`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    /// Truncation radius of `max-principle`; default `r0 / 4`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_r: Option<f64>,
    /// Extra room above `r` allowed for the interior sup; default `2h`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_slack: Option<f64>,
    /// Degeneracy exponent of `bootstrap`; default the potential's `q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap_q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify_samples: Option<usize>,
    /// Half-width of the positivity sampling box around `a`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_box: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: String,
    /// Write the solved field (binary plus JSON sidecar).
    #[serde(default = "default_true")]
    pub write_field: bool,
}

fn default_dir() -> String {
    "out".into()
}
fn default_true() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            write_field: true,
        }
    }
}

/// A configuration problem, located in the source text when possible.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// 1-based line of `key = ...` inside `[section]` (top level for `""`).
fn locate(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

struct Checker<'a> {
    text: &'a str,
}

impl Checker<'_> {
    fn fail(&self, section: &str, key: &str, message: String) -> ConfigError {
        ConfigError {
            line: locate(self.text, section, key),
            message: if section.is_empty() {
                format!("`{key}`: {message}")
            } else {
                format!("`{section}.{key}`: {message}")
            },
        }
    }

    fn positive(&self, section: &str, key: &str, v: f64) -> Result<(), ConfigError> {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(self.fail(section, key, format!("must be positive and finite, got {v}")))
        }
    }
}

impl ExperimentConfig {
    /// Parse and validate.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError {
            line: e.span().map(|s| text[..s.start].lines().count().max(1)),
            message: e.message().to_string(),
        })?;
        cfg.validate(text)?;
        Ok(cfg)
    }

    /// Canonical text form; parsing it gives back an equal config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self, text: &str) -> Result<(), ConfigError> {
        let c = Checker { text };
        if !(2..=3).contains(&self.n) {
            return Err(c.fail("", "n", format!("must be 2 or 3, got {}", self.n)));
        }
        if self.m == 0 {
            return Err(c.fail("", "m", "must be at least 1".into()));
        }
        c.positive("", "h", self.h)?;
        c.positive("", "r_max", self.r_max)?;
        if self.h >= self.r_max {
            return Err(c.fail("", "h", format!("must be below r_max = {}", self.r_max)));
        }
        self.potential_spec().map_err(|e| c.fail("potential", "family", e.to_string()))?;
        if let Some(z) = &self.potential.zero {
            if z.len() != self.m {
                return Err(c.fail("potential", "zero", format!("needs {} components, got {}", self.m, z.len())));
            }
        }
        c.positive("boundary", "magnitude", self.boundary.magnitude)
            .or_else(|e| if self.boundary.kind == "constant-a" { Ok(()) } else { Err(e) })?;
        if let Some(d) = &self.boundary.direction {
            if d.len() != self.m {
                return Err(c.fail("boundary", "direction", format!("needs {} components", self.m)));
            }
        }
        match self.boundary.kind.as_str() {
            "constant-a" | "radial-profile" | "angular" | "random-seeded" => {}
            k => return Err(c.fail("boundary", "kind", format!("unknown boundary kind `{k}`"))),
        }
        match self.boundary.initial_guess.as_str() {
            "extension" | "random" => {}
            g => return Err(c.fail("boundary", "initial_guess", format!("unknown initial guess `{g}`"))),
        }
        c.positive("solver", "tol", self.solver.tol)?;
        if self.solver.max_iter == 0 {
            return Err(c.fail("solver", "max_iter", "must be at least 1".into()));
        }
        let a = &self.analysis;
        if let Some(radii) = &a.radii {
            if radii.is_empty() {
                return Err(c.fail("analysis", "radii", "must not be empty".into()));
            }
            if let Some(r) = radii.iter().find(|&&r| !(r > 0.0 && r <= self.r_max)) {
                return Err(c.fail("analysis", "radii", format!("radius {r} outside (0, r_max]")));
            }
        }
        for (key, v) in [
            ("eps", a.eps),
            ("alpha", a.alpha),
            ("good_radius", a.good_radius),
            ("delta_q", a.delta_q),
            ("c_m", a.c_m),
            ("residual_tol", a.residual_tol),
            ("truncation_r", a.truncation_r),
            ("sup_slack", a.sup_slack),
            ("bootstrap_q", a.bootstrap_q),
            ("bootstrap_tol", a.bootstrap_tol),
            ("range_box", a.range_box),
        ] {
            if let Some(v) = v {
                c.positive("analysis", key, v)?;
            }
        }
        if let Some(alpha) = a.alpha {
            if alpha > 1.0 {
                return Err(c.fail("analysis", "alpha", format!("must lie in (0, 1], got {alpha}")));
            }
        }
        if let Some(g) = a.good_radius {
            if 2.0 * g + self.h > self.r_max {
                return Err(c.fail("analysis", "good_radius", format!("needs 2R + h <= r_max, got R = {g}")));
            }
        }
        Ok(())
    }

    pub fn zero(&self) -> Vec<f64> {
        self.potential.zero.clone().unwrap_or_else(|| vec![0.0; self.m])
    }

    pub fn potential_spec(&self) -> vaclab::Result<PotentialSpec<f64>> {
        let p = &self.potential;
        let zero = self.zero();
        let missing = |what: &str| vaclab::Error::InvalidArgument(format!("family `{}` needs `{what}`", p.family));
        let spec = match p.family.as_str() {
            "quadratic" => PotentialSpec::quadratic(zero)?,
            "power" => PotentialSpec::power(zero, p.q.ok_or_else(|| missing("q"))?)?,
            "anisotropic-power" => PotentialSpec::anisotropic_power(
                zero,
                p.coefficients.clone().ok_or_else(|| missing("coefficients"))?,
                p.powers.clone().ok_or_else(|| missing("powers"))?,
            )?,
            "product-perturbed" => PotentialSpec::product_perturbed(zero)?,
            f => return Err(vaclab::Error::InvalidArgument(format!("unknown potential family `{f}`"))),
        };
        match &p.constants {
            Some(k) => spec.with_constants(k.q, k.c0, k.r0, k.r1),
            None => Ok(spec),
        }
    }

    pub fn boundary_kind(&self) -> BoundaryKind<f64> {
        let b = &self.boundary;
        match b.kind.as_str() {
            "radial-profile" => BoundaryKind::RadialProfile {
                direction: b.direction.clone().unwrap_or_else(|| {
                    let mut d = vec![0.0; self.m];
                    d[0] = 1.0;
                    d
                }),
                magnitude: b.magnitude,
            },
            "angular" => BoundaryKind::Angular {
                magnitude: b.magnitude,
                winding: b.winding,
            },
            "random-seeded" => BoundaryKind::RandomSmooth {
                magnitude: b.magnitude,
                modes: b.modes,
                bandwidth: b.bandwidth,
                seed: b.seed.unwrap_or(self.seed),
            },
            _ => BoundaryKind::ConstantA,
        }
    }

    pub fn initial_guess(&self) -> InitialGuess<f64> {
        match self.boundary.initial_guess.as_str() {
            "random" => InitialGuess::Random {
                amplitude: self.boundary.guess_amplitude,
                seed: self.seed,
            },
            _ => InitialGuess::Extension,
        }
    }

    /// `|B_{R_max}|`.
    pub fn volume(&self) -> f64 {
        vaclab::field::sphere_area::<f64>(self.n, self.r_max) * self.r_max / self.n as f64
    }

    pub fn delta_q(&self) -> f64 {
        self.analysis
            .delta_q
            .unwrap_or_else(|| vaclab::competitor::quadrature_slack(self.h, self.volume()))
    }

    /// Analysis radii, default a uniform schedule of 12 radii up to `R_max - h`.
    pub fn radii(&self) -> Vec<f64> {
        self.analysis.radii.clone().unwrap_or_else(|| {
            let top = self.r_max - self.h;
            (1..=12).map(|k| top * k as f64 / 12.0).collect()
        })
    }

    pub fn powers(&self) -> Vec<f64> {
        self.analysis
            .powers
            .clone()
            .unwrap_or_else(|| vec![self.n as f64 - 2.0, self.n as f64 - 1.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "n = 2\nm = 1\nh = 0.1\nr_max = 2.0\n\n[potential]\nfamily = \"quadratic\"\n";

    #[test]
    fn minimal_config_round_trips() {
        let cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.boundary.kind, "constant-a");
        let again = ExperimentConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn validation_errors_point_at_the_line() {
        let bad = MINIMAL.replace("h = 0.1", "h = -0.1");
        let e = ExperimentConfig::parse(&bad).unwrap_err();
        assert_eq!(e.line, Some(3));
        let bad = format!("{MINIMAL}\n[analysis]\nradii = [1.0, 5.0]\n");
        let e = ExperimentConfig::parse(&bad).unwrap_err();
        assert_eq!(e.line, Some(10), "{e}");
        let bad = MINIMAL.replace("family = \"quadratic\"", "family = \"cubic\"");
        assert_eq!(ExperimentConfig::parse(&bad).unwrap_err().line, Some(7));
    }

    #[test]
    fn syntax_errors_point_at_the_line() {
        let bad = MINIMAL.replace("m = 1", "m = = 1");
        let e = ExperimentConfig::parse(&bad).unwrap_err();
        assert_eq!(e.line, Some(2), "{e}");
        let bad = format!("{MINIMAL}bogus = 1\n");
        assert!(ExperimentConfig::parse(&bad).unwrap_err().line.is_some());
    }
}
