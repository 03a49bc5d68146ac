//! The numerical studies: convergence ladders, error fields, interior
//! rates, condition numbers, inf-sup constants, data perturbations and
//! parameter couplings. Each writes CSV files with the common
//! [`CSV_HEADER`](crate::analysis::CSV_HEADER) schema (error fields use
//! `x,y,error`) and returns a console summary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::Deserialize;

use crate::analysis::{fit_rate, triple_norm_gram, ErrorReport};
use crate::linalg::{condition_number, infsup_constant, ConditionMethod, DENSE_LIMIT};
use crate::mesh::{Rect, Region, SquareSide, TriangleMesh};
use crate::parallel::map_jobs;
use crate::schemes::{
    build_system_with, couple_parameters, perturb_data, snap_mesh_size, CouplingRule, DiscreteScheme,
    DualSpace, ExactSolution, NoiseSpec, Problem, SchemeConfig, Variant,
};
use crate::{Error, Execution, Result};

/// Largest `N` of an `N × N` mesh accepted for solves.
pub const MAX_SOLVE_MESH: usize = 128;
/// Largest `N` accepted by the condition-number and inf-sup studies.
pub const MAX_SPECTRAL_MESH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Convergence,
    ErrorField,
    InteriorRate,
    ConditionSweep,
    InfsupSweep,
    PerturbationSweep,
    ParameterCoupling,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Convergence,
        Experiment::ErrorField,
        Experiment::InteriorRate,
        Experiment::ConditionSweep,
        Experiment::InfsupSweep,
        Experiment::PerturbationSweep,
        Experiment::ParameterCoupling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Convergence => "convergence",
            Experiment::ErrorField => "error_field",
            Experiment::InteriorRate => "interior_rate",
            Experiment::ConditionSweep => "condition_sweep",
            Experiment::InfsupSweep => "infsup_sweep",
            Experiment::PerturbationSweep => "perturbation_sweep",
            Experiment::ParameterCoupling => "parameter_coupling",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    Hadamard,
    Bilinear,
    SinSin,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub amplitudes: Vec<f64>,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            amplitudes: vec![0.0, 1e-4, 1e-3, 1e-2],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingConfig {
    pub rule: CouplingRule,
    /// Assumed regularity `s` of the exact solution.
    pub s: f64,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        CouplingConfig {
            rule: CouplingRule::Standard,
            s: 2.0,
        }
    }
}

/// Experiment configuration, read from TOML. Every key is optional.
///
/// ```toml
/// problem = "cauchy"          # or "unique_continuation"
/// variant = "regularized"     # "l2_stabilized", "unregularized"
/// k = 1                       # primal degree
/// m = [1, 2]                  # dual degrees (CR1 for "unregularized")
/// n = [1, 5]                  # Hadamard frequencies
/// epsilon = [1e-4]
/// gamma = 0.5
/// meshes = [8, 16, 32, 64, 128]
/// solution = "hadamard"       # "bilinear", "sin_sin"
/// gamma0 = ["left", "bottom"]
/// omega = { x0 = 0.25, x1 = 0.75, y0 = 0.25, y1 = 0.75 }
/// g = { x0 = 0.0, x1 = 0.8, y0 = 0.0, y1 = 0.5 }
/// field_mesh = 128
///
/// [noise]
/// amplitudes = [0.0, 1e-4, 1e-3, 1e-2]
/// seed = 0
///
/// [coupling]
/// rule = "standard"           # or "l2stab"
/// s = 2.0
///
/// [thresholds]
/// min_rate = 0.25
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub variant: Variant,
    pub k: usize,
    pub m: Vec<usize>,
    pub n: Vec<u32>,
    pub epsilon: Vec<f64>,
    pub gamma: f64,
    pub meshes: Vec<usize>,
    pub solution: SolutionKind,
    pub gamma0: Vec<SquareSide>,
    pub omega: Rect,
    pub g: Rect,
    pub field_mesh: usize,
    pub noise: NoiseConfig,
    pub coupling: CouplingConfig,
    pub thresholds: Thresholds,
}

/// Pass/fail bounds reported in the console summary.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Lower bound on fitted H¹ rates (interior rate, or global rate).
    pub min_rate: Option<f64>,
    /// Upper bound on the spread `max/min` of `κ₂h²` and `κ₂ε`.
    pub max_condition_spread: Option<f64>,
    /// Upper bound on the spread of `σ_min` across meshes.
    pub max_infsup_spread: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: Problem::Cauchy,
            variant: Variant::Regularized,
            k: 1,
            m: vec![2],
            n: vec![1],
            epsilon: vec![1e-4],
            gamma: 0.5,
            meshes: vec![8, 16, 32, 64, 128],
            solution: SolutionKind::Hadamard,
            gamma0: vec![SquareSide::Left, SquareSide::Bottom],
            omega: Rect::new(0.25, 0.75, 0.25, 0.75),
            g: Rect::new(0.0, 0.8, 0.0, 0.5),
            field_mesh: 128,
            noise: NoiseConfig::default(),
            coupling: CouplingConfig::default(),
            thresholds: Thresholds::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.meshes.is_empty() || self.meshes.contains(&0) {
            return bad("meshes must be a nonempty list of positive sizes");
        }
        if self.m.is_empty() || self.n.is_empty() || self.epsilon.is_empty() {
            return bad("m, n and epsilon must be nonempty");
        }
        if self.problem == Problem::Cauchy && self.gamma0.is_empty() {
            return bad("the Cauchy problem needs at least one side in gamma0");
        }
        for scheme in self.schemes() {
            scheme.validate()?;
        }
        Ok(())
    }

    fn exact(&self, n: u32) -> ExactSolution {
        match self.solution {
            SolutionKind::Hadamard => ExactSolution::Hadamard { n },
            SolutionKind::Bilinear => ExactSolution::Bilinear,
            SolutionKind::SinSin => ExactSolution::SinSin,
        }
    }

    fn dual(&self, m: usize) -> DualSpace {
        if self.variant == Variant::Unregularized {
            DualSpace::Cr1
        } else {
            DualSpace::Lagrange(m)
        }
    }

    /// Scheme for dual degree `m`, frequency `n` and regularization `ε`.
    pub fn scheme(&self, m: usize, n: u32, epsilon: f64) -> SchemeConfig {
        let mut cfg = SchemeConfig::new(self.problem, self.variant, self.k, self.dual(m))
            .with_gamma(self.gamma)
            .with_exact(self.exact(n));
        if self.variant != Variant::Unregularized {
            cfg = cfg.with_epsilon(epsilon);
        }
        cfg
    }

    fn schemes(&self) -> Vec<SchemeConfig> {
        let mut out = Vec::new();
        for &m in &self.m {
            for &n in &self.n {
                for &e in &self.epsilon {
                    out.push(self.scheme(m, n, e));
                }
            }
        }
        out
    }

    /// Dual degrees actually used (a single entry for the CR1 multiplier).
    fn dual_degrees(&self) -> Vec<usize> {
        if self.variant == Variant::Unregularized {
            vec![self.m[0]]
        } else {
            self.m.clone()
        }
    }

    /// Structured `N × N` mesh carrying Γ0, ω and G.
    pub fn mesh(&self, n: usize) -> Result<Arc<TriangleMesh>> {
        let mut mesh = TriangleMesh::structured(n, n)?
            .tag_region(self.g, Region::InteriorG)
            .tag_region(self.omega, Region::OmegaData);
        if self.problem == Problem::Cauchy {
            mesh = mesh.tag_boundary(&self.gamma0);
        }
        Ok(Arc::new(mesh))
    }
}

fn check_cap(meshes: &[usize], cap: usize, what: &str) -> Result<()> {
    if let Some(&n) = meshes.iter().find(|&&n| n > cap) {
        return Err(Error::InvalidConfig(format!(
            "{what} is limited to {cap}x{cap} meshes, got {n}x{n}"
        )));
    }
    Ok(())
}

/// Files written and the console summary of one run.
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub text: String,
    /// False when a configured threshold was missed.
    pub passed: bool,
}

impl RunSummary {
    fn new() -> Self {
        RunSummary {
            passed: true,
            ..Default::default()
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn check(&mut self, label: &str, value: f64, ok: bool, bound: &str) {
        self.passed &= ok;
        let verdict = if ok { "pass" } else { "FAIL" };
        self.line(format!("  [{verdict}] {label} = {value:.4} ({bound})"));
    }
}

pub fn write_reports(path: &Path, rows: &[ErrorReport]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(crate::analysis::CSV_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Solves one configuration on one mesh and measures its errors.
pub fn solve_and_measure(cfg: &SchemeConfig, mesh: Arc<TriangleMesh>, exec: Execution) -> Result<ErrorReport> {
    let scheme = build_system_with(cfg, mesh, exec)?;
    let solution = scheme.solve()?;
    ErrorReport::for_scheme(&scheme).measure(&scheme, &solution)
}

fn ladder(
    ecfg: &ExperimentConfig,
    cfg: &SchemeConfig,
    meshes: &[usize],
    exec: Execution,
) -> Result<Vec<ErrorReport>> {
    let jobs: Vec<usize> = meshes.to_vec();
    map_jobs(jobs, exec, |n| {
        let mesh = ecfg.mesh(n)?;
        solve_and_measure(cfg, mesh, Execution::Sequential)
    })
    .into_iter()
    .collect()
}

fn column(rows: &[ErrorReport], f: impl Fn(&ErrorReport) -> Option<f64>) -> Vec<f64> {
    rows.iter().map(|r| f(r).unwrap_or(f64::NAN)).collect()
}

fn rate_or_nan(h: &[f64], e: &[f64]) -> f64 {
    fit_rate(h, e).unwrap_or(f64::NAN)
}

/// Runs one experiment, writing its CSV files into `out`.
pub fn run_experiment(
    ecfg: &ExperimentConfig,
    experiment: Experiment,
    out: &Path,
    exec: Execution,
) -> Result<RunSummary> {
    ecfg.validate()?;
    fs::create_dir_all(out)?;
    let mut summary = RunSummary::new();
    summary.line(format!("experiment {}", experiment.name()));
    match experiment {
        Experiment::Convergence | Experiment::InteriorRate => {
            check_cap(&ecfg.meshes, MAX_SOLVE_MESH, "solving")?;
            let interior = experiment == Experiment::InteriorRate;
            for m in ecfg.dual_degrees() {
                for &n in &ecfg.n {
                    let cfg = ecfg.scheme(m, n, ecfg.epsilon[0]);
                    let mut rows = ladder(ecfg, &cfg, &ecfg.meshes, exec)?;
                    let h = column(&rows, |r| Some(r.h));
                    if interior {
                        for r in &mut rows {
                            r.l2_omega = None;
                            r.h1_omega = None;
                            r.jump = None;
                            r.triple = None;
                        }
                    }
                    let path = out.join(format!("{}_m{m}_n{n}.csv", experiment.name()));
                    write_reports(&path, &rows)?;
                    summary.files.push(path);
                    summary.line(format!("m = {m}, n = {n}"));
                    let (l2, h1) = if interior {
                        (column(&rows, |r| r.l2_g), column(&rows, |r| r.h1_g))
                    } else {
                        (column(&rows, |r| r.l2_omega), column(&rows, |r| r.h1_omega))
                    };
                    let where_ = if interior { "G" } else { "Omega" };
                    summary.line(format!("  L2({where_}) rate {:.4}", rate_or_nan(&h, &l2)));
                    let r = rate_or_nan(&h, &h1);
                    match ecfg.thresholds.min_rate {
                        Some(min) => summary.check(&format!("H1({where_}) rate"), r, r >= min, &format!(">= {min}")),
                        None => summary.line(format!("  H1({where_}) rate {r:.4}")),
                    }
                }
            }
        }
        Experiment::ErrorField => {
            check_cap(&[ecfg.field_mesh], MAX_SOLVE_MESH, "solving")?;
            let mut jobs = Vec::new();
            for m in ecfg.dual_degrees() {
                for &n in &ecfg.n {
                    jobs.push((m, n));
                }
            }
            let mesh = ecfg.mesh(ecfg.field_mesh)?;
            let fields = map_jobs(jobs.clone(), exec, |(m, n)| {
                let cfg = ecfg.scheme(m, n, ecfg.epsilon[0]);
                error_field(&cfg, Arc::clone(&mesh), Execution::Sequential)
            });
            for ((m, n), field) in jobs.into_iter().zip(fields) {
                let field = field?;
                let path = out.join(format!("error_field_m{m}_n{n}.csv"));
                write_field(&path, &field)?;
                summary.files.push(path);
                let max = field.iter().fold(0.0f64, |a, p| a.max(p[2].abs()));
                summary.line(format!("m = {m}, n = {n}: max |u_h - u| = {max:.4e}"));
            }
        }
        Experiment::ConditionSweep => {
            check_cap(&ecfg.meshes, MAX_SPECTRAL_MESH, "the condition-number study")?;
            let m = ecfg.dual_degrees()[0];
            let mut jobs = Vec::new();
            for &e in &ecfg.epsilon {
                for &n in &ecfg.meshes {
                    jobs.push((e, n));
                }
            }
            let rows: Vec<ErrorReport> = map_jobs(jobs, exec, |(e, n)| {
                let cfg = ecfg.scheme(m, ecfg.n[0], e);
                let scheme = build_system_with(&cfg, ecfg.mesh(n)?, Execution::Sequential)?;
                let mut row = ErrorReport::for_scheme(&scheme);
                row.kappa2 = Some(kappa(&scheme)?);
                Ok(row)
            })
            .into_iter()
            .collect::<Result<_>>()?;
            let path = out.join("condition_sweep.csv");
            write_reports(&path, &rows)?;
            summary.files.push(path);
            for &e in &ecfg.epsilon {
                let v: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.epsilon == Some(e))
                    .map(|r| r.kappa2.unwrap() * r.h * r.h)
                    .collect();
                spread_line(&mut summary, &format!("kappa2*h^2 at epsilon = {e:e}"), &v, ecfg.thresholds.max_condition_spread);
            }
            for &n in &ecfg.meshes {
                let h = ecfg.mesh(n)?.h();
                let v: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.h == h)
                    .map(|r| r.kappa2.unwrap() * r.epsilon.unwrap())
                    .collect();
                spread_line(&mut summary, &format!("kappa2*epsilon on {n}x{n}"), &v, ecfg.thresholds.max_condition_spread);
            }
        }
        Experiment::InfsupSweep => {
            check_cap(&ecfg.meshes, MAX_SPECTRAL_MESH, "the inf-sup study")?;
            for m in ecfg.dual_degrees() {
                let cfg = ecfg.scheme(m, ecfg.n[0], ecfg.epsilon[0]);
                let rows: Vec<ErrorReport> = map_jobs(ecfg.meshes.clone(), exec, |n| {
                    let scheme = build_system_with(&cfg, ecfg.mesh(n)?, Execution::Sequential)?;
                    let mut row = ErrorReport::for_scheme(&scheme);
                    row.sigma_min = Some(scheme_infsup(&scheme)?);
                    Ok(row)
                })
                .into_iter()
                .collect::<Result<_>>()?;
                let path = out.join(format!("infsup_sweep_m{m}.csv"));
                write_reports(&path, &rows)?;
                summary.files.push(path);
                let v = column(&rows, |r| r.sigma_min);
                let pair = match cfg.dual {
                    DualSpace::Lagrange(m) => format!("P{}-P{m}", cfg.primal_degree),
                    DualSpace::Cr1 => "P1-CR1".to_string(),
                };
                let list: Vec<String> = v.iter().map(|s| format!("{s:.4e}")).collect();
                summary.line(format!("{pair}: sigma_min = [{}]", list.join(", ")));
                spread_line(&mut summary, &format!("{pair} sigma_min"), &v, ecfg.thresholds.max_infsup_spread);
            }
        }
        Experiment::PerturbationSweep => {
            check_cap(&ecfg.meshes[..1], MAX_SOLVE_MESH, "solving")?;
            let m = ecfg.dual_degrees()[0];
            let base = ecfg.scheme(m, ecfg.n[0], ecfg.epsilon[0]);
            let mesh = ecfg.mesh(ecfg.meshes[0])?;
            let rows: Vec<ErrorReport> = map_jobs(ecfg.noise.amplitudes.clone(), exec, |delta| {
                let cfg = perturb_data(&base, NoiseSpec { amplitude: delta, seed: ecfg.noise.seed });
                let mut row = solve_and_measure(&cfg, Arc::clone(&mesh), Execution::Sequential)?;
                row.delta = Some(delta);
                Ok(row)
            })
            .into_iter()
            .collect::<Result<_>>()?;
            let path = out.join("perturbation_sweep.csv");
            write_reports(&path, &rows)?;
            summary.files.push(path);
            for r in &rows {
                summary.line(format!(
                    "  delta = {:e}: H1(G) error {:.6e}",
                    r.delta.unwrap(),
                    r.h1_g.unwrap_or(f64::NAN)
                ));
            }
        }
        Experiment::ParameterCoupling => {
            let m = ecfg.dual_degrees()[0];
            let mut jobs = Vec::new();
            for &e in &ecfg.epsilon {
                let h = couple_parameters(ecfg.coupling.s, e, ecfg.coupling.rule)?;
                jobs.push((e, snap_mesh_size(h)));
            }
            let sizes: Vec<usize> = jobs.iter().map(|j| j.1).collect();
            check_cap(&sizes, MAX_SOLVE_MESH, "solving")?;
            let rows: Vec<ErrorReport> = map_jobs(jobs, exec, |(e, n)| {
                let cfg = ecfg.scheme(m, ecfg.n[0], e);
                solve_and_measure(&cfg, ecfg.mesh(n)?, Execution::Sequential)
            })
            .into_iter()
            .collect::<Result<_>>()?;
            let path = out.join("parameter_coupling.csv");
            write_reports(&path, &rows)?;
            summary.files.push(path);
            for r in &rows {
                summary.line(format!(
                    "  epsilon = {:e} -> h = {:.4e}: H1(Omega) {:.4e}, H1(G) {:.4e}",
                    r.epsilon.unwrap(),
                    r.h,
                    r.h1_omega.unwrap(),
                    r.h1_g.unwrap_or(f64::NAN)
                ));
            }
        }
    }
    Ok(summary)
}

fn spread_line(summary: &mut RunSummary, label: &str, v: &[f64], bound: Option<f64>) {
    let max = v.iter().cloned().fold(f64::MIN, f64::max);
    let min = v.iter().cloned().fold(f64::MAX, f64::min);
    let spread = max / min;
    match bound {
        Some(b) => summary.check(&format!("{label} spread"), spread, spread < b, &format!("< {b}")),
        None => summary.line(format!("  {label}: spread {spread:.4}")),
    }
}

/// Euclidean condition number of the full system matrix, dense when small.
pub fn kappa(scheme: &DiscreteScheme) -> Result<f64> {
    let method = if scheme.system.dim() <= DENSE_LIMIT {
        ConditionMethod::DenseExact
    } else {
        ConditionMethod::Iterative
    };
    condition_number(&scheme.system.matrix(), method)
}

/// Inf-sup constant of the system in its triple norm.
pub fn scheme_infsup(scheme: &DiscreteScheme) -> Result<f64> {
    let n = triple_norm_gram(scheme)?;
    infsup_constant(&scheme.system.matrix(), &n, &n)
}

/// `(x, y, u_h − u)` at every mesh vertex.
pub fn error_field(cfg: &SchemeConfig, mesh: Arc<TriangleMesh>, exec: Execution) -> Result<Vec<[f64; 3]>> {
    let scheme = build_system_with(cfg, Arc::clone(&mesh), exec)?;
    let solution = scheme.solve()?;
    Ok(mesh
        .vertices()
        .iter()
        .map(|&x| [x[0], x[1], solution.u.eval_at(x).value - cfg.exact.value(x)])
        .collect())
}

pub fn write_field(path: &Path, field: &[[f64; 3]]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "y", "error"])?;
    for p in field {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

/// Global and interior errors of a ladder, for callers that skip the CSV.
pub fn convergence_rows(
    ecfg: &ExperimentConfig,
    cfg: &SchemeConfig,
    meshes: &[usize],
    exec: Execution,
) -> Result<Vec<ErrorReport>> {
    check_cap(meshes, MAX_SOLVE_MESH, "solving")?;
    ladder(ecfg, cfg, meshes, exec)
}

/// Writes the summary text alongside the CSV files.
pub fn write_summary(out: &Path, summaries: &[RunSummary]) -> Result<PathBuf> {
    let mut text = String::new();
    for s in summaries {
        let _ = write!(text, "{}", s.text);
    }
    let path = out.join("summary.txt");
    fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("nope".parse::<Experiment>().is_err());
    }

    #[test]
    fn config_defaults_and_overrides() {
        let cfg = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        let cfg = ExperimentConfig::from_toml(
            "problem = \"uc\"\nm = [1, 2]\nmeshes = [4]\n[noise]\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(cfg.problem, Problem::UniqueContinuation);
        assert_eq!(cfg.noise.seed, 7);
        assert_eq!(cfg.noise.amplitudes.len(), 4);
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
        assert!(ExperimentConfig::from_toml("gamma = 2.0").is_err());
        assert!(ExperimentConfig::from_toml("problem = \"cauchy\"\nvariant = \"l2_stabilized\"").is_err());
    }
}
