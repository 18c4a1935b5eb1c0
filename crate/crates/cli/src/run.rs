//! Subcommand dispatch.

use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use vaclab::boundary::initial_field;
use vaclab::competitor::{competitor_suite, max_principle_check, MaxPrincipleOptions, SuiteSettings};
use vaclab::field::{energy_density, Grid};
use vaclab::growth::{bootstrap_fixed_point, comparison_bound, energy_profile, theorem11_diagnostic, ComparisonBound};
use vaclab::minimizer::{discrete_energy, el_residual, minimize, modica_check, MinimizeOptions, SolveReport};
use vaclab::monotonicity::{monotone_quantities, MonotonicityOptions};
use vaclab::potential::{Potential, PotentialSpec};
use vaclab::slice::{bad_disc_analysis, default_sphere_points, SliceSettings};
use vaclab::{Error, VectorField64};

use crate::config::{ConfigError, ExperimentConfig};
use crate::report::{config_hash, num, Envelope, Sink, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Minimize,
    EnergyProfile,
    BadDiscs,
    Monotonicity,
    MaxPrinciple,
    Competitor,
    Bootstrap,
    VerifyPotential,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Minimize,
        Command::EnergyProfile,
        Command::BadDiscs,
        Command::Monotonicity,
        Command::MaxPrinciple,
        Command::Competitor,
        Command::Bootstrap,
        Command::VerifyPotential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Minimize => "minimize",
            Command::EnergyProfile => "energy-profile",
            Command::BadDiscs => "bad-discs",
            Command::Monotonicity => "monotonicity",
            Command::MaxPrinciple => "max-principle",
            Command::Competitor => "competitor",
            Command::Bootstrap => "bootstrap",
            Command::VerifyPotential => "verify-potential",
        }
    }

    fn relation(self) -> &'static str {
        match self {
            Command::Minimize => "discrete Euler-Lagrange residual below tolerance",
            Command::EnergyProfile => "ball energy growth and the annulus comparison bound",
            Command::BadDiscs => "clearing-out threshold and bad-disc covering on a good sphere",
            Command::Monotonicity => "monotone normalized ball energies",
            Command::MaxPrinciple => "interior sup of |u - a| bounded by the boundary sup",
            Command::Competitor => "minimizer energy below every constructed competitor",
            Command::Bootstrap => "fixed point of the growth-exponent bootstrap map",
            Command::VerifyPotential => "standing assumptions on the potential",
        }
    }
}

/// Why a run stopped short of a clean success.
#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    /// The solver diverged or did not converge.
    Solver(String),
    /// A checked relation failed.
    Violation(String),
    Io(std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Solver(_) => 3,
            RunError::Violation(_) => 4,
            RunError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "config error: {e}"),
            RunError::Solver(e) => write!(f, "solver failure: {e}"),
            RunError::Violation(e) => write!(f, "invariant violation: {e}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::MaskConstruction(_) | Error::Unsupported(_) => {
                RunError::Config(ConfigError {
                    line: None,
                    message: e.to_string(),
                })
            }
            Error::Diverged { .. } => RunError::Solver(e.to_string()),
            Error::ClearingOutViolated { .. } | Error::NotASolution { .. } | Error::Precondition(_) => {
                RunError::Violation(e.to_string())
            }
            Error::Io(e) => RunError::Io(e),
        }
    }
}

/// Result of a successful run.
#[derive(Debug)]
pub struct Outcome {
    pub config_hash: String,
    pub artifacts: Vec<std::path::PathBuf>,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    cmd: Command,
    hash: String,
    sink: Sink,
    spec: PotentialSpec<f64>,
}

impl Ctx<'_> {
    fn report<R: Serialize>(&mut self, name: &str, report: R) -> std::io::Result<()> {
        let env = Envelope {
            command: self.cmd.name(),
            config_hash: &self.hash,
            seed: self.cfg.seed,
            units: "dimensionless",
            relation: self.cmd.relation(),
            report,
        };
        self.sink.json(name, &env)
    }

    fn grid(&self) -> Result<Arc<Grid<f64>>, RunError> {
        Ok(Arc::new(Grid::new(self.cfg.n, self.cfg.h, self.cfg.r_max)?))
    }

    fn initial(&self) -> Result<VectorField64, RunError> {
        Ok(initial_field(
            self.grid()?,
            &self.spec,
            &self.cfg.boundary_kind(),
            &self.cfg.initial_guess(),
        )?)
    }

    /// Solve, write `minimize.json` (and the field), and insist on
    /// convergence.
    fn solve(&mut self) -> Result<(VectorField64, SolveReport), RunError> {
        let u0 = self.initial()?;
        let opts = MinimizeOptions {
            tol: self.cfg.solver.tol,
            max_iter: self.cfg.solver.max_iter,
        };
        let (u, rep) = minimize(&u0, &self.spec, &opts)?;
        let summary = MinimizeSummary {
            energy: discrete_energy(&u, &self.spec),
            el_residual: el_residual(&u, &self.spec),
            modica: modica_check(&u, &self.spec),
            interior_sup_distance: u.interior_sup_distance(self.spec.zero()),
            boundary_sup_distance: u.boundary_sup_distance(self.spec.zero()),
            boundary: self.cfg.boundary_kind().tag(),
            solve: rep.clone(),
        };
        self.report("minimize.json", &summary)?;
        if self.cfg.output.write_field {
            self.sink.field("field", &u)?;
        }
        if !rep.converged {
            return Err(RunError::Solver(format!(
                "no convergence after {} iterations (residual {:.3e} > {:.3e})",
                rep.iterations, rep.residual, rep.tol
            )));
        }
        Ok((u, rep))
    }
}

#[derive(Serialize)]
struct MinimizeSummary {
    energy: f64,
    el_residual: f64,
    modica: f64,
    interior_sup_distance: f64,
    boundary_sup_distance: f64,
    boundary: &'static str,
    solve: SolveReport,
}

/// Run one subcommand, writing its artifacts into `out`.
pub fn run(cfg: &ExperimentConfig, cmd: Command, out: &Path) -> Result<Outcome, RunError> {
    let spec = cfg.potential_spec()?;
    let mut ctx = Ctx {
        cfg,
        cmd,
        hash: config_hash(cfg),
        sink: Sink::new(out)?,
        spec,
    };
    match cmd {
        Command::Minimize => {
            ctx.solve()?;
        }
        Command::EnergyProfile => energy_profile_cmd(&mut ctx)?,
        Command::BadDiscs => bad_discs_cmd(&mut ctx)?,
        Command::Monotonicity => monotonicity_cmd(&mut ctx)?,
        Command::MaxPrinciple => max_principle_cmd(&mut ctx)?,
        Command::Competitor => competitor_cmd(&mut ctx)?,
        Command::Bootstrap => bootstrap_cmd(&mut ctx)?,
        Command::VerifyPotential => verify_cmd(&mut ctx)?,
    }
    Ok(Outcome {
        config_hash: ctx.hash,
        artifacts: ctx.sink.written,
    })
}

#[derive(Serialize)]
struct ProfileReport {
    profile: vaclab::growth::EnergyProfile,
    comparison: Vec<ComparisonBound>,
    /// Present when the radii form a doubling sequence of length >= 3.
    growth: Option<vaclab::growth::GrowthDiagnostic>,
    bound_respected: bool,
}

fn energy_profile_cmd(ctx: &mut Ctx) -> Result<(), RunError> {
    let (u, _) = ctx.solve()?;
    let radii = ctx.cfg.radii();
    let profile = energy_profile(&u, &ctx.spec, &radii, &ctx.cfg.powers())?;
    let dq = ctx.cfg.delta_q();
    let comparison = radii
        .iter()
        .filter(|&&r| r >= 1.0 + ctx.cfg.h)
        .map(|&r| comparison_bound(&u, &ctx.spec, r))
        .collect::<vaclab::Result<Vec<_>>>()?;
    let bound_respected = comparison.iter().all(|c| c.energy <= c.bound + dq);
    let growth = theorem11_diagnostic(ctx.cfg.n, ctx.spec.q(), &radii, &profile.energies).ok();
    let mut header: Vec<String> = vec!["radius".into(), "energy".into()];
    header.extend(profile.normalized.iter().map(|s| format!("energy_over_r_pow_{}", s.power)));
    header.push("comparison_bound".into());
    let hdr: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut table = Table::new(&hdr);
    for (i, &r) in profile.radii.iter().enumerate() {
        let mut row = vec![num(r), num(profile.energies[i])];
        row.extend(profile.normalized.iter().map(|s| num(s.values[i])));
        let bound = comparison.iter().find(|c| c.r == r).map(|c| num(c.bound)).unwrap_or_default();
        row.push(bound);
        table.row(row);
    }
    ctx.sink.csv("energy_profile.csv", &table)?;
    ctx.report(
        "energy_profile.json",
        ProfileReport {
            profile,
            comparison,
            growth,
            bound_respected,
        },
    )?;
    if !bound_respected {
        return Err(RunError::Violation("ball energy exceeds the comparison bound".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct BadDiscsOutput {
    good_radius: vaclab::slice::GoodRadius,
    discs: vaclab::slice::BadDiscReport,
    off_disc_ok: bool,
}

fn bad_discs_cmd(ctx: &mut Ctx) -> Result<(), RunError> {
    let (u, _) = ctx.solve()?;
    let a = &ctx.cfg.analysis;
    let radius = a
        .good_radius
        .unwrap_or(0.5 * (ctx.cfg.r_max - ctx.cfg.h) * (1.0 - 1e-9));
    let settings = SliceSettings {
        radius,
        eps: a.eps.unwrap_or(0.05),
        alpha: a.alpha.unwrap_or(1.0),
        radius_samples: a.radius_samples.unwrap_or(16),
        sphere_points: a
            .sphere_points
            .unwrap_or_else(|| default_sphere_points(ctx.cfg.n, 2.0 * radius, ctx.cfg.h)),
    };
    let e = energy_density(&u, &ctx.spec);
    let (good, discs) = bad_disc_analysis(&e, &settings)?;
    let mut table = Table::new(&["sample", "local_energy", "angle_1", "angle_2"]);
    for c in &discs.centers {
        let ang = |k: usize| c.angles.get(k).copied().map(num).unwrap_or_default();
        table.row(vec![c.sample.to_string(), num(c.local_energy), ang(0), ang(1)]);
    }
    ctx.sink.csv("bad_discs.csv", &table)?;
    let off_disc_ok = discs.off_disc_sup <= discs.eps;
    ctx.report(
        "bad_discs.json",
        BadDiscsOutput {
            good_radius: good,
            discs,
            off_disc_ok,
        },
    )?;
    if !off_disc_ok {
        return Err(RunError::Violation("energy density above eps off the bad discs".into()));
    }
    Ok(())
}

fn monotonicity_cmd(ctx: &mut Ctx) -> Result<(), RunError> {
    let (u, _) = ctx.solve()?;
    let opts = MonotonicityOptions {
        residual_tol: ctx.cfg.analysis.residual_tol.unwrap_or(10.0 * ctx.cfg.solver.tol),
        c_m: ctx.cfg.analysis.c_m.unwrap_or(0.05),
    };
    let rep = monotone_quantities(&u, &ctx.spec, &ctx.cfg.radii(), &opts)?;
    let mut table = Table::new(&["radius", "f", "energy", "weak", "strong", "classical"]);
    for i in 0..rep.radii.len() {
        table.row(vec![
            num(rep.radii[i]),
            num(rep.f[i]),
            num(rep.energy[i]),
            num(rep.weak[i]),
            num(rep.strong[i]),
            num(rep.classical[i]),
        ]);
    }
    ctx.sink.csv("monotonicity.csv", &table)?;
    let broken = !rep.weak_violations.is_empty()
        || rep.strong_violations.as_ref().is_some_and(|v| !v.is_empty())
        || rep.classical_violations.as_ref().is_some_and(|v| !v.is_empty());
    ctx.report("monotonicity.json", &rep)?;
    if broken {
        return Err(RunError::Violation("a normalized ball energy decreased".into()));
    }
    Ok(())
}

fn max_principle_cmd(ctx: &mut Ctx) -> Result<(), RunError> {
    let a = &ctx.cfg.analysis;
    let r = a.truncation_r.unwrap_or(ctx.spec.r0() / 4.0);
    let assumptions = ctx
        .spec
        .verify_assumptions(a.verify_samples.unwrap_or(256), ctx.cfg.seed, a.range_box.unwrap_or(2.0));
    let opts = MaxPrincipleOptions {
        solve: MinimizeOptions {
            tol: ctx.cfg.solver.tol,
            max_iter: ctx.cfg.solver.max_iter,
        },
        delta_q: ctx.cfg.delta_q(),
        sup_slack: a.sup_slack.unwrap_or(2.0 * ctx.cfg.h),
    };
    let u0 = ctx.initial()?;
    let rep = max_principle_check(&u0, &ctx.spec, &assumptions, r, &opts)?;
    ctx.report("max_principle.json", &rep)?;
    if !rep.solve.converged {
        return Err(RunError::Solver(format!("no convergence (residual {:.3e})", rep.solve.residual)));
    }
    if !(rep.within && rep.energy_ok) {
        return Err(RunError::Violation(format!(
            "interior sup {:.6e} vs r = {:.6e}, truncation energy change {:.6e}",
            rep.interior_sup,
            rep.r,
            rep.energy_truncated - rep.energy_u
        )));
    }
    Ok(())
}

fn competitor_cmd(ctx: &mut Ctx) -> Result<(), RunError> {
    let (u, _) = ctx.solve()?;
    let mut settings = SuiteSettings::for_grid(ctx.cfg.r_max, ctx.cfg.h, ctx.cfg.n);
    settings.delta_q = ctx.cfg.delta_q();
    if let Some(g) = ctx.cfg.analysis.good_radius {
        settings.good_radius_r = g;
    }
    if let Some(k) = ctx.cfg.analysis.radius_samples {
        settings.good_radius_samples = k;
    }
    let reports = competitor_suite(&u, &ctx.spec, &settings)?;
    let mut table = Table::new(&["tag", "energy_u", "energy_competitor", "difference", "passes"]);
    for r in &reports {
        let tag = serde_json::to_value(r.tag).expect("tag serializes");
        table.row(vec![
            tag.as_str().unwrap_or_default().to_string(),
            num(r.energy_u),
            num(r.energy_competitor),
            num(r.difference),
            r.passes.to_string(),
        ]);
    }
    ctx.sink.csv("competitor.csv", &table)?;
    let failed = reports.iter().filter(|r| !r.passes).count();
    ctx.report("competitor.json", &reports)?;
    if failed > 0 {
        return Err(RunError::Violation(format!("{failed} competitor(s) beat the minimizer")));
    }
    Ok(())
}

fn bootstrap_cmd(ctx: &mut Ctx) -> Result<(), RunError> {
    let q = ctx.cfg.analysis.bootstrap_q.unwrap_or_else(|| ctx.spec.q());
    let tol = ctx.cfg.analysis.bootstrap_tol.unwrap_or(1e-13);
    let fp = bootstrap_fixed_point(ctx.cfg.n, q, tol)?;
    let mut table = Table::new(&["iteration", "k"]);
    for (i, k) in fp.iterates.iter().enumerate() {
        table.row(vec![i.to_string(), num(*k)]);
    }
    ctx.sink.csv("bootstrap.csv", &table)?;
    ctx.report("bootstrap.json", &fp)?;
    Ok(())
}

fn verify_cmd(ctx: &mut Ctx) -> Result<(), RunError> {
    let a = &ctx.cfg.analysis;
    let rep = ctx
        .spec
        .verify_assumptions(a.verify_samples.unwrap_or(256), ctx.cfg.seed, a.range_box.unwrap_or(2.0));
    // A degenerate Hessian at `a` is what q > 2 means; it is reported only.
    let ok = rep.pos_ok && rep.katzour_ok;
    ctx.report("verify_potential.json", &rep)?;
    if !ok {
        return Err(RunError::Violation("the potential fails a standing assumption".into()));
    }
    Ok(())
}
