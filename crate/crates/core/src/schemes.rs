//! The discrete quasi-reversibility systems and their parameter couplings.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assembly::{
    assemble_form_with, assemble_rhs_with, DataField, Entity, FormKind, RhsKind, SparseMatrix,
};
use crate::fe_space::{Constraint, FeFunction, Family, FiniteElementSpace, MAX_LAGRANGE_DEGREE};
use crate::linalg::{solve_direct, BlockSystem};
use crate::mesh::{Point, SquareSide, TriangleMesh};
use crate::{Error, Execution, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    /// Data `q = u` on the interior region ω.
    #[serde(alias = "uc")]
    UniqueContinuation,
    /// Dirichlet (homogeneous) and Neumann data `φ` on Γ0.
    #[serde(alias = "cp")]
    Cauchy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Tikhonov term `ε⟨u, v⟩_{H¹}` and broken H¹ multiplier stabilization.
    Regularized,
    /// Unique continuation with `h⁻²`-weighted data and `s*` stabilization.
    #[serde(alias = "l2stab")]
    L2Stabilized,
    /// `ε = 0`, P1 primal with a CR1 multiplier.
    Unregularized,
}

/// Multiplier space; its boundary constraint follows from the problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualSpace {
    Lagrange(usize),
    Cr1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub amplitude: f64,
    pub seed: u64,
}

/// `n⁻² sin(nx) sinh(ny)` with its Neumann data on the left and bottom sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HadamardProblem {
    pub n: u32,
}

impl HadamardProblem {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("oscillation n must be positive".into()));
        }
        Ok(HadamardProblem { n })
    }

    pub fn u(&self, x: Point) -> f64 {
        let n = self.n as f64;
        (n * x[0]).sin() * (n * x[1]).sinh() / (n * n)
    }

    pub fn grad(&self, x: Point) -> Point {
        let n = self.n as f64;
        [
            (n * x[0]).cos() * (n * x[1]).sinh() / n,
            (n * x[0]).sin() * (n * x[1]).cosh() / n,
        ]
    }

    /// `φ = −n⁻¹ sinh(ny)` on `x = 0`, `−n⁻¹ sin(nx)` on `y = 0`.
    pub fn neumann(&self, x: Point, side: SquareSide) -> f64 {
        let n = self.n as f64;
        match side {
            SquareSide::Left => -(n * x[1]).sinh() / n,
            SquareSide::Bottom => -(n * x[0]).sin() / n,
            other => {
                let g = self.grad(x);
                let nu = other.outward_normal();
                g[0] * nu[0] + g[1] * nu[1]
            }
        }
    }
}

/// Reference solutions from which the data `q`, `f` and `φ` are derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExactSolution {
    Hadamard { n: u32 },
    /// `u = xy`.
    Bilinear,
    /// `u = sin(πx) sin(πy)`.
    SinSin,
    Zero,
}

impl ExactSolution {
    pub fn value(&self, x: Point) -> f64 {
        match *self {
            ExactSolution::Hadamard { n } => HadamardProblem { n }.u(x),
            ExactSolution::Bilinear => x[0] * x[1],
            ExactSolution::SinSin => (PI * x[0]).sin() * (PI * x[1]).sin(),
            ExactSolution::Zero => 0.0,
        }
    }

    pub fn grad(&self, x: Point) -> Point {
        match *self {
            ExactSolution::Hadamard { n } => HadamardProblem { n }.grad(x),
            ExactSolution::Bilinear => [x[1], x[0]],
            ExactSolution::SinSin => [
                PI * (PI * x[0]).cos() * (PI * x[1]).sin(),
                PI * (PI * x[0]).sin() * (PI * x[1]).cos(),
            ],
            ExactSolution::Zero => [0.0, 0.0],
        }
    }

    /// `f = −Δu`.
    pub fn source(&self, x: Point) -> f64 {
        match *self {
            ExactSolution::SinSin => 2.0 * PI * PI * self.value(x),
            _ => 0.0,
        }
    }

    /// `∇u·ν` on a side of the square.
    pub fn neumann(&self, x: Point, side: SquareSide) -> f64 {
        match *self {
            ExactSolution::Hadamard { n } => HadamardProblem { n }.neumann(x, side),
            _ => {
                let g = self.grad(x);
                let nu = side.outward_normal();
                g[0] * nu[0] + g[1] * nu[1]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub problem: Problem,
    pub variant: Variant,
    /// Primal Lagrange degree `k`.
    pub primal_degree: usize,
    pub dual: DualSpace,
    /// Tikhonov parameter; ignored by the unregularized variant.
    pub epsilon: f64,
    pub gamma: f64,
    pub exact: ExactSolution,
    pub noise: Option<NoiseSpec>,
}

pub const DEFAULT_EPSILON: f64 = 1e-4;
pub const DEFAULT_GAMMA: f64 = 0.5;

impl SchemeConfig {
    pub fn new(problem: Problem, variant: Variant, primal_degree: usize, dual: DualSpace) -> Self {
        SchemeConfig {
            problem,
            variant,
            primal_degree,
            dual,
            epsilon: if variant == Variant::Unregularized {
                0.0
            } else {
                DEFAULT_EPSILON
            },
            gamma: DEFAULT_GAMMA,
            exact: ExactSolution::Zero,
            noise: None,
        }
    }

    /// Regularized Cauchy problem `P_k`–`P_m` with Hadamard data of frequency `n`.
    pub fn hadamard_cauchy(k: usize, m: usize, n: u32) -> Self {
        Self::new(Problem::Cauchy, Variant::Regularized, k, DualSpace::Lagrange(m))
            .with_exact(ExactSolution::Hadamard { n })
    }

    /// Unregularized `P1`–`CR1` scheme.
    pub fn unregularized(problem: Problem) -> Self {
        Self::new(problem, Variant::Unregularized, 1, DualSpace::Cr1)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_exact(mut self, exact: ExactSolution) -> Self {
        self.exact = exact;
        self
    }

    /// Effective Tikhonov parameter (zero for the unregularized variant).
    pub fn effective_epsilon(&self) -> f64 {
        if self.variant == Variant::Unregularized {
            0.0
        } else {
            self.epsilon
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let k = self.primal_degree;
        if k == 0 || k > MAX_LAGRANGE_DEGREE {
            return bad(format!("primal degree {k} outside 1..={MAX_LAGRANGE_DEGREE}"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad(format!("gamma = {} must lie in (0, 1)", self.gamma));
        }
        if let DualSpace::Lagrange(m) = self.dual {
            if m == 0 || m > MAX_LAGRANGE_DEGREE {
                return bad(format!("dual degree {m} outside 1..={MAX_LAGRANGE_DEGREE}"));
            }
        }
        match self.variant {
            Variant::Unregularized => {
                if k != 1 || self.dual != DualSpace::Cr1 {
                    return bad("the unregularized scheme uses the P1-CR1 pair".into());
                }
            }
            Variant::Regularized | Variant::L2Stabilized => {
                if self.dual == DualSpace::Cr1 {
                    return bad("the CR1 multiplier is only used without regularization".into());
                }
                if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
                    return bad(format!("epsilon = {} must lie in (0, 1)", self.epsilon));
                }
            }
        }
        if self.variant == Variant::L2Stabilized && self.problem != Problem::UniqueContinuation {
            return bad("the L2-stabilized scheme is defined for unique continuation only".into());
        }
        if let Some(noise) = self.noise {
            if !(noise.amplitude >= 0.0) || !noise.amplitude.is_finite() {
                return bad(format!("noise amplitude {} must be nonnegative", noise.amplitude));
            }
        }
        if let ExactSolution::Hadamard { n } = self.exact {
            HadamardProblem::new(n)?;
        }
        Ok(())
    }

    pub fn primal_space(&self, mesh: Arc<TriangleMesh>) -> Result<FiniteElementSpace> {
        let constraint = match self.problem {
            Problem::UniqueContinuation => Constraint::None,
            Problem::Cauchy => Constraint::ZeroOnGamma0,
        };
        FiniteElementSpace::new(mesh, Family::Lagrange(self.primal_degree), constraint)
    }

    pub fn dual_space(&self, mesh: Arc<TriangleMesh>) -> Result<FiniteElementSpace> {
        let (family, constraint) = match (self.dual, self.problem) {
            (DualSpace::Lagrange(m), Problem::UniqueContinuation) => {
                (Family::Lagrange(m), Constraint::ZeroOnBoundary)
            }
            (DualSpace::Lagrange(m), Problem::Cauchy) => (Family::Lagrange(m), Constraint::ZeroOnGamma1),
            (DualSpace::Cr1, Problem::UniqueContinuation) => {
                (Family::CrouzeixRaviart(1), Constraint::CrZeroMeanAll)
            }
            (DualSpace::Cr1, Problem::Cauchy) => {
                (Family::CrouzeixRaviart(1), Constraint::CrZeroMeanOffGamma0)
            }
        };
        FiniteElementSpace::new(mesh, family, constraint)
    }
}

/// Returns a copy of the configuration carrying the given data noise;
/// zero amplitude leaves the configuration unchanged.
pub fn perturb_data(config: &SchemeConfig, noise: NoiseSpec) -> SchemeConfig {
    let mut out = *config;
    if noise.amplitude != 0.0 {
        out.noise = Some(noise);
    }
    out
}

/// Which forms make up the data term, the data functional and the multiplier
/// stabilization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Recipe {
    pub data_form: Option<FormKind>,
    pub data_rhs: Option<RhsKind>,
    pub stabilizer: FormKind,
}

impl Recipe {
    pub fn for_config(config: &SchemeConfig) -> Self {
        match (config.problem, config.variant) {
            (Problem::UniqueContinuation, Variant::L2Stabilized) => Recipe {
                data_form: Some(FormKind::OmegaMassInvH2),
                data_rhs: Some(RhsKind::InteriorDataInvH2),
                stabilizer: FormKind::SStar,
            },
            (Problem::UniqueContinuation, _) => Recipe {
                data_form: Some(FormKind::OmegaMass),
                data_rhs: Some(RhsKind::InteriorData),
                stabilizer: FormKind::BrokenH1,
            },
            (Problem::Cauchy, _) => Recipe {
                data_form: None,
                data_rhs: None,
                stabilizer: FormKind::BrokenH1,
            },
        }
    }
}

/// Data of a configuration, optionally with piecewise-constant noise.
struct Data<F> {
    base: F,
    noise: Option<(f64, Vec<f64>)>,
}

impl<F: Fn(Point, Entity) -> f64 + Sync> DataField for Data<F> {
    fn value(&self, x: Point, at: Entity) -> f64 {
        let v = (self.base)(x, at);
        match &self.noise {
            Some((delta, xi)) => {
                let i = match at {
                    Entity::Cell(t) => t,
                    Entity::Facet(f) => f,
                };
                v + delta * xi[i]
            }
            None => v,
        }
    }
}

/// Fixed-seed uniform `[−1, 1]` values for `q` (per triangle), `f` (per
/// triangle) and `φ` (per facet), in that order.
fn noise_fields(mesh: &TriangleMesh, seed: u64) -> [Vec<f64>; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect() };
    let q = draw(mesh.num_triangles());
    let f = draw(mesh.num_triangles());
    let phi = draw(mesh.num_facets());
    [q, f, phi]
}

/// A discrete system together with its spaces.
#[derive(Debug, Clone)]
pub struct DiscreteScheme {
    pub config: SchemeConfig,
    pub primal: Arc<FiniteElementSpace>,
    pub dual: Arc<FiniteElementSpace>,
    pub system: BlockSystem,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub u: FeFunction,
    pub lambda: FeFunction,
}

impl DiscreteScheme {
    pub fn solve(&self) -> Result<Solution> {
        let (u, lambda) = solve_direct(&self.system)?;
        Ok(Solution {
            u: FeFunction::new(Arc::clone(&self.primal), u)?,
            lambda: FeFunction::new(Arc::clone(&self.dual), lambda)?,
        })
    }

    pub fn mesh(&self) -> &Arc<TriangleMesh> {
        self.primal.mesh()
    }
}

pub fn build_system(config: &SchemeConfig, mesh: Arc<TriangleMesh>) -> Result<DiscreteScheme> {
    build_system_with(config, mesh, Execution::default())
}

pub fn build_system_with(
    config: &SchemeConfig,
    mesh: Arc<TriangleMesh>,
    exec: Execution,
) -> Result<DiscreteScheme> {
    build_system_from_recipe(config, mesh, Recipe::for_config(config), exec)
}

/// Assembles `[[εM_H1 + D, Bᵀ], [B, −γ²S]]` with the forms named by `recipe`.
pub fn build_system_from_recipe(
    config: &SchemeConfig,
    mesh: Arc<TriangleMesh>,
    recipe: Recipe,
    exec: Execution,
) -> Result<DiscreteScheme> {
    config.validate()?;
    let primal = Arc::new(config.primal_space(Arc::clone(&mesh))?);
    let dual = Arc::new(config.dual_space(Arc::clone(&mesh))?);
    let exact = config.exact;
    let [xi_q, xi_f, xi_phi] = match config.noise {
        Some(noise) if noise.amplitude != 0.0 => {
            noise_fields(&mesh, noise.seed).map(|xi| Some((noise.amplitude, xi)))
        }
        _ => [None, None, None],
    };

    let eps = config.effective_epsilon();
    let mut a11 = if eps > 0.0 {
        assemble_form_with(FormKind::BrokenH1, &primal, &primal, exec)?.scaled(eps)
    } else {
        SparseMatrix::zeros(primal.ndofs(), primal.ndofs())
    };
    if let Some(kind) = recipe.data_form {
        a11 = a11.add_scaled(&assemble_form_with(kind, &primal, &primal, exec)?, 1.0)?;
    }
    let b = assemble_form_with(FormKind::BrokenStiffness, &primal, &dual, exec)?;
    let a22 = assemble_form_with(recipe.stabilizer, &dual, &dual, exec)?.scaled(-config.gamma * config.gamma);

    let rhs_primal = match recipe.data_rhs {
        Some(kind) => {
            let q = Data {
                base: move |x: Point, _: Entity| exact.value(x),
                noise: xi_q,
            };
            assemble_rhs_with(kind, &primal, &q, exec)?
        }
        None => vec![0.0; primal.ndofs()],
    };
    let f = Data {
        base: move |x: Point, _: Entity| exact.source(x),
        noise: xi_f,
    };
    let mut rhs_dual = assemble_rhs_with(RhsKind::Source, &dual, &f, exec)?;
    if config.problem == Problem::Cauchy {
        let m = Arc::clone(&mesh);
        let phi = Data {
            base: move |x: Point, at: Entity| match at {
                Entity::Facet(f) => m.facet_side(f).map_or(0.0, |side| exact.neumann(x, side)),
                Entity::Cell(_) => 0.0,
            },
            noise: xi_phi,
        };
        let g = assemble_rhs_with(RhsKind::NeumannGamma0, &dual, &phi, exec)?;
        rhs_dual.iter_mut().zip(g).for_each(|(r, g)| *r += g);
    }

    let system = BlockSystem::new(a11, b, a22, rhs_primal, rhs_dual)?;
    Ok(DiscreteScheme {
        config: *config,
        primal,
        dual,
        system,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingRule {
    /// `h = ε^{1/(2s−2)}`.
    Standard,
    /// `ε = h^{2s}`, i.e. `h = ε^{1/(2s)}`.
    #[serde(alias = "l2stab")]
    L2Stabilized,
}

/// Mesh size coupled to `ε` for a solution of regularity `s`.
pub fn couple_parameters(s: f64, epsilon: f64, rule: CouplingRule) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    if !(s >= 1.0) {
        return Err(Error::InvalidArgument(format!("regularity s = {s} must be at least 1")));
    }
    let exponent = match rule {
        CouplingRule::Standard => {
            if s == 1.0 {
                return Err(Error::InvalidArgument(
                    "the standard coupling needs s > 1".into(),
                ));
            }
            1.0 / (2.0 * s - 2.0)
        }
        CouplingRule::L2Stabilized => 1.0 / (2.0 * s),
    };
    Ok(epsilon.powf(exponent))
}

/// Number of subdivisions `N` of the structured `N × N` mesh whose diameter
/// `√2 / N` is closest to `h`.
pub fn snap_mesh_size(h: f64) -> usize {
    ((2f64.sqrt() / h).round() as usize).max(1)
}
