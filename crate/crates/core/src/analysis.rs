//! Error norms, triple norms, discrete dual norms and rate fits.

use std::sync::Arc;

use serde::Serialize;

use crate::assembly::{
    assemble_form, assemble_rhs, dot, DataField, FormKind, RhsKind, SparseMatrix, DATA_ORDER,
};
use crate::fe_space::{to_physical, BasisValue, Constraint, FeFunction, Family, FiniteElementSpace};
use crate::linalg::SparseCholesky;
use crate::mesh::{BoundaryTag, Region, TriangleMesh};
use crate::parallel::map_chunks;
use crate::quadrature::{edge_rule, triangle_rule};
use crate::schemes::{DiscreteScheme, ExactSolution, Problem, SchemeConfig, Solution, Variant};
use crate::{Error, Execution, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorRegion {
    Omega,
    /// Triangles tagged [`Region::InteriorG`].
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L2,
    H1,
}

/// Values and gradients of `u_h − u` summed over a region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1: f64,
}

fn ordered_sum(parts: Vec<[f64; 2]>) -> [f64; 2] {
    parts
        .into_iter()
        .fold([0.0; 2], |acc, p| [acc[0] + p[0], acc[1] + p[1]])
}

/// L2 and H1 norms of `u_h − u` with the order-10 triangle rule.
pub fn error_norms(u_h: &FeFunction, exact: &ExactSolution, region: ErrorRegion) -> Result<ErrorNorms> {
    let space = u_h.space();
    let mesh = space.mesh();
    if region == ErrorRegion::G && mesh.region_count(Region::InteriorG) == 0 {
        return Err(Error::MissingTag("the error region G is empty".into()));
    }
    let rule = triangle_rule(DATA_ORDER)?;
    let tab: Vec<_> = rule
        .points
        .iter()
        .map(|&lam| {
            let mut out = Vec::new();
            space.basis().eval(lam, &mut out);
            out
        })
        .collect();
    let parts = map_chunks(mesh.num_triangles(), Execution::default(), |cells| {
        let mut acc = [0.0; 2];
        for t in cells {
            if region == ErrorRegion::G && !mesh.in_region(t, Region::InteriorG) {
                continue;
            }
            let geo = mesh.geometry(t);
            let pts = mesh.cell_points(t);
            let local = u_h.local_coefficients(t);
            for (q, (lam, w)) in rule.iter().enumerate() {
                let mut uh = BasisValue::default();
                for (c, r) in local.iter().zip(&tab[q]) {
                    let b = to_physical(r, &geo.grad_lambda);
                    uh.value += c * b.value;
                    uh.grad[0] += c * b.grad[0];
                    uh.grad[1] += c * b.grad[1];
                }
                let x = [
                    lam[0] * pts[0][0] + lam[1] * pts[1][0] + lam[2] * pts[2][0],
                    lam[0] * pts[0][1] + lam[1] * pts[1][1] + lam[2] * pts[2][1],
                ];
                let g = exact.grad(x);
                let scale = w * 2.0 * geo.area;
                acc[0] += scale * (uh.value - exact.value(x)).powi(2);
                acc[1] += scale * ((uh.grad[0] - g[0]).powi(2) + (uh.grad[1] - g[1]).powi(2));
            }
        }
        vec![acc]
    });
    let [l2, semi] = ordered_sum(parts);
    Ok(ErrorNorms {
        l2: l2.sqrt(),
        h1: (l2 + semi).sqrt(),
    })
}

pub fn error_norm(u_h: &FeFunction, exact: &ExactSolution, region: ErrorRegion, norm: NormKind) -> Result<f64> {
    let e = error_norms(u_h, exact, region)?;
    Ok(match norm {
        NormKind::L2 => e.l2,
        NormKind::H1 => e.h1,
    })
}

/// `𝒥_h(u_h, u_h)^{1/2}`.
pub fn jump_seminorm(u_h: &FeFunction) -> Result<f64> {
    let s = u_h.space();
    let j = assemble_form(FormKind::JumpPenalty, s, s)?;
    Ok(j.quadratic_form(u_h.coefficients()).max(0.0).sqrt())
}

fn check_spaces(config: &SchemeConfig, v: &FeFunction, w: &FeFunction) -> Result<()> {
    let mesh = Arc::clone(v.space().mesh());
    let p = config.primal_space(Arc::clone(&mesh))?;
    let d = config.dual_space(mesh)?;
    let same = |a: &FiniteElementSpace, b: &FiniteElementSpace| {
        a.family() == b.family() && a.constraint() == b.constraint() && a.ndofs() == b.ndofs()
    };
    if !Arc::ptr_eq(v.space().mesh(), w.space().mesh()) || !same(v.space(), &p) || !same(w.space(), &d) {
        return Err(Error::SpaceMismatch(
            "functions do not belong to the spaces of the configuration".into(),
        ));
    }
    Ok(())
}

/// Residual triple norm `|||(v, w)|||` of the configuration, integrated
/// directly element by element and facet by facet.
///
/// Unique continuation: `ε‖v‖²_{H¹} + ‖v‖²_ω + 𝒥_h(v) + Σ h_K²‖Δv‖²_K + γ²‖w‖²_{H¹_h}`.
/// The Cauchy problem drops the ω term and adds `Σ_{F⊂Γ0} h_F ‖∇v·ν‖²_F`.
/// Without regularization `ε‖v‖²_{H¹}` becomes `Σ h_K² ‖v‖²_{H¹(K)}`.
pub fn triple_norm(v: &FeFunction, w: &FeFunction, config: &SchemeConfig) -> Result<f64> {
    check_spaces(config, v, w)?;
    Ok(triple_norm_sq(v, w, config, None)?.sqrt())
}

/// `|||(u − u_h, λ_h)|||` for the exact solution of the configuration.
pub fn triple_norm_of_error(solution: &Solution, config: &SchemeConfig) -> Result<f64> {
    check_spaces(config, &solution.u, &solution.lambda)?;
    Ok(triple_norm_sq(&solution.u, &solution.lambda, config, Some(&config.exact))?.sqrt())
}

fn triple_norm_sq(
    v: &FeFunction,
    w: &FeFunction,
    config: &SchemeConfig,
    exact: Option<&ExactSolution>,
) -> Result<f64> {
    let mesh = v.space().mesh().as_ref();
    let uc = config.problem == Problem::UniqueContinuation;
    let unreg = config.variant == Variant::Unregularized;
    let eps = config.effective_epsilon();
    let g2 = config.gamma * config.gamma;
    let rule = triangle_rule(DATA_ORDER)?;
    let erule = edge_rule(DATA_ORDER)?;
    // e = v − u on a triangle, with −Δu = f
    let primal_at = |t: usize, lam: [f64; 3]| -> BasisValue {
        let mut b = v.eval(t, lam);
        if let Some(u) = exact {
            let pts = mesh.cell_points(t);
            let x = [
                lam[0] * pts[0][0] + lam[1] * pts[1][0] + lam[2] * pts[2][0],
                lam[0] * pts[0][1] + lam[1] * pts[1][1] + lam[2] * pts[2][1],
            ];
            let g = u.grad(x);
            b.value -= u.value(x);
            b.grad = [b.grad[0] - g[0], b.grad[1] - g[1]];
            b.laplacian += u.source(x);
        }
        b
    };
    let cells = map_chunks(mesh.num_triangles(), Execution::default(), |cells| {
        let mut acc = 0.0;
        for t in cells {
            let geo = mesh.geometry(t);
            let hk2 = mesh.cell_diameter(t).powi(2);
            let in_omega = uc && mesh.in_region(t, Region::OmegaData);
            for (lam, wq) in rule.iter() {
                let e = primal_at(t, lam);
                let l = w.eval(t, lam);
                let h1 = e.value * e.value + e.grad[0] * e.grad[0] + e.grad[1] * e.grad[1];
                let mut s = if unreg { hk2 * h1 } else { eps * h1 };
                if in_omega {
                    s += e.value * e.value;
                }
                s += hk2 * e.laplacian * e.laplacian;
                s += g2 * (l.value * l.value + l.grad[0] * l.grad[0] + l.grad[1] * l.grad[1]);
                acc += wq * 2.0 * geo.area * s;
            }
        }
        vec![acc]
    });
    let facets = map_chunks(mesh.num_facets(), Execution::default(), |facets| {
        let mut acc = 0.0;
        for f in facets {
            let facet = &mesh.facets()[f];
            let n = facet.normal;
            let gamma0 = !uc && mesh.boundary_tag(f) == Some(BoundaryTag::Gamma0);
            if !facet.is_interior() && !gamma0 {
                continue;
            }
            for (s, wq) in erule.iter() {
                let x = facet.point_at(mesh, s);
                let mut q = 0.0;
                for (side, c) in facet.cells.iter().enumerate() {
                    let Some(c) = *c else { continue };
                    let e = primal_at(c, mesh.geometry(c).barycentric(x));
                    let sign = if side == 0 { 1.0 } else { -1.0 };
                    q += sign * (e.grad[0] * n[0] + e.grad[1] * n[1]);
                }
                acc += wq * facet.length * facet.length * q * q;
            }
        }
        vec![acc]
    });
    Ok(cells.iter().sum::<f64>() + facets.iter().sum::<f64>())
}

/// Gram matrix of the primal part of the triple norm.
pub fn primal_gram(config: &SchemeConfig, primal: &FiniteElementSpace) -> Result<SparseMatrix> {
    let uc = config.problem == Problem::UniqueContinuation;
    let mut n = if config.variant == Variant::Unregularized {
        assemble_form(FormKind::MeshWeightedH1, primal, primal)?
    } else {
        assemble_form(FormKind::BrokenH1, primal, primal)?.scaled(config.effective_epsilon())
    };
    let mut terms = vec![FormKind::JumpPenalty, FormKind::ElementLaplacian];
    terms.push(if uc {
        FormKind::OmegaMass
    } else {
        FormKind::NormalDerivGamma0
    });
    for kind in terms {
        n = n.add_scaled(&assemble_form(kind, primal, primal)?, 1.0)?;
    }
    Ok(n)
}

/// Gram matrix of the dual part, `γ²⟨·,·⟩_{H¹_h}`.
pub fn dual_gram(config: &SchemeConfig, dual: &FiniteElementSpace) -> Result<SparseMatrix> {
    Ok(assemble_form(FormKind::BrokenH1, dual, dual)?.scaled(config.gamma * config.gamma))
}

/// Block-diagonal Gram matrix of the triple norm on the product space.
pub fn triple_norm_gram(scheme: &DiscreteScheme) -> Result<SparseMatrix> {
    let p = primal_gram(&scheme.config, &scheme.primal)?;
    let d = dual_gram(&scheme.config, &scheme.dual)?;
    SparseMatrix::block2x2(
        &p,
        &SparseMatrix::zeros(p.nrows(), d.ncols()),
        &SparseMatrix::zeros(d.nrows(), p.ncols()),
        &d,
    )
}

/// `‖∇z‖` for the Riesz representer `z ∈ span(space)` of a load vector.
fn riesz_norm(stiffness: &SparseMatrix, b: &[f64]) -> Result<f64> {
    if b.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let z = SparseCholesky::new(stiffness)?.solve(b);
    Ok(dot(b, &z).max(0.0).sqrt())
}

fn dirichlet_space(mesh: Arc<TriangleMesh>, degree: usize) -> Result<FiniteElementSpace> {
    FiniteElementSpace::new(mesh, Family::Lagrange(degree), Constraint::ZeroOnBoundary)
}

/// Discrete `H⁻¹` norm of `g`: `‖∇z_h‖` where `z_h ∈ P_degree ∩ H¹_0`
/// solves `(∇z_h, ∇w) = (g, w)`.
pub fn discrete_hminus1(mesh: Arc<TriangleMesh>, degree: usize, g: &dyn DataField) -> Result<f64> {
    let z = dirichlet_space(mesh, degree)?;
    let k = assemble_form(FormKind::BrokenStiffness, &z, &z)?;
    let b = assemble_rhs(RhsKind::Source, &z, g)?;
    riesz_norm(&k, &b)
}

/// Discrete `H⁻¹` norm of the PDE residual `w ↦ (f, w) − (∇u_h, ∇w)`, which
/// collects `Δ_h u_h + f` and the gradient jumps of `u_h`; measured on
/// `P_{k+1} ∩ H¹_0`.
pub fn residual_hminus1(u_h: &FeFunction, f: &dyn DataField) -> Result<f64> {
    let space = u_h.space();
    let z = dirichlet_space(Arc::clone(space.mesh()), space.degree() + 1)?;
    let k = assemble_form(FormKind::BrokenStiffness, &z, &z)?;
    let a = assemble_form(FormKind::BrokenStiffness, space, &z)?;
    let mut b = assemble_rhs(RhsKind::Source, &z, f)?;
    for (bi, ai) in b.iter_mut().zip(a.mul_vec(u_h.coefficients())) {
        *bi -= ai;
    }
    riesz_norm(&k, &b)
}

/// `sup_{w ∈ V₁ₕ} a(v, w) / ‖w‖_{H¹}` over `P_{k+1}` functions vanishing on Γ1.
pub fn discrete_cp_dual_norm(v: &FeFunction) -> Result<f64> {
    discrete_cp_dual_norm_with(v, v.space().degree() + 1)
}

/// As [`discrete_cp_dual_norm`] with an explicit test degree.
pub fn discrete_cp_dual_norm_with(v: &FeFunction, test_degree: usize) -> Result<f64> {
    let space = v.space();
    if !space.is_conforming() {
        return Err(Error::UnsupportedSpace("the cp dual norm needs a conforming function".into()));
    }
    let w = FiniteElementSpace::new(
        Arc::clone(space.mesh()),
        Family::Lagrange(test_degree),
        Constraint::ZeroOnGamma1,
    )?;
    let n = assemble_form(FormKind::BrokenH1, &w, &w)?;
    let b = assemble_form(FormKind::BrokenStiffness, space, &w)?.mul_vec(v.coefficients());
    if b.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let z = SparseCholesky::new(&n)?.solve(&b);
    Ok(dot(&b, &z).max(0.0).sqrt())
}

/// Least-squares slope of `log(error)` against `log(h)`.
pub fn fit_rate(h: &[f64], errors: &[f64]) -> Result<f64> {
    if h.len() != errors.len() {
        return Err(Error::InvalidArgument("h and error lists differ in length".into()));
    }
    if h.len() < 3 {
        return Err(Error::InvalidArgument("a rate fit needs at least 3 points".into()));
    }
    if h.iter().chain(errors).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument("rate fits need positive finite data".into()));
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("h values must not all coincide".into()));
    }
    Ok(sxy / sxx)
}

/// One CSV row; unmeasured quantities stay empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ErrorReport {
    pub h: f64,
    pub dofs_primal: Option<usize>,
    pub dofs_dual: Option<usize>,
    pub epsilon: Option<f64>,
    pub gamma: Option<f64>,
    pub n: Option<u32>,
    pub delta: Option<f64>,
    pub l2_omega: Option<f64>,
    pub h1_omega: Option<f64>,
    pub l2_g: Option<f64>,
    pub h1_g: Option<f64>,
    pub jump: Option<f64>,
    pub triple: Option<f64>,
    pub kappa2: Option<f64>,
    pub sigma_min: Option<f64>,
}

pub const CSV_HEADER: [&str; 15] = [
    "h",
    "dofs_primal",
    "dofs_dual",
    "epsilon",
    "gamma",
    "n",
    "delta",
    "l2_omega",
    "h1_omega",
    "l2_g",
    "h1_g",
    "jump",
    "triple",
    "kappa2",
    "sigma_min",
];

impl ErrorReport {
    /// Mesh and parameter columns of a scheme.
    pub fn for_scheme(scheme: &DiscreteScheme) -> Self {
        let c = &scheme.config;
        ErrorReport {
            h: scheme.mesh().h(),
            dofs_primal: Some(scheme.primal.ndofs()),
            dofs_dual: Some(scheme.dual.ndofs()),
            epsilon: Some(c.effective_epsilon()),
            gamma: Some(c.gamma),
            n: match c.exact {
                ExactSolution::Hadamard { n } => Some(n),
                _ => None,
            },
            delta: Some(c.noise.map_or(0.0, |n| n.amplitude)),
            ..Default::default()
        }
    }

    /// Fills the error columns: global and (if tagged) interior norms,
    /// jump seminorm and triple norm of `(u − u_h, λ_h)`.
    pub fn measure(mut self, scheme: &DiscreteScheme, solution: &Solution) -> Result<Self> {
        let exact = &scheme.config.exact;
        let omega = error_norms(&solution.u, exact, ErrorRegion::Omega)?;
        self.l2_omega = Some(omega.l2);
        self.h1_omega = Some(omega.h1);
        if scheme.mesh().region_count(Region::InteriorG) > 0 {
            let g = error_norms(&solution.u, exact, ErrorRegion::G)?;
            self.l2_g = Some(g.l2);
            self.h1_g = Some(g.h1);
        }
        self.jump = Some(jump_seminorm(&solution.u)?);
        self.triple = Some(triple_norm_of_error(solution, &scheme.config)?);
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let h = [0.5, 0.25, 0.125, 0.0625];
        let e1: Vec<f64> = h.to_vec();
        let e2: Vec<f64> = h.iter().map(|v| v * v).collect();
        assert!((fit_rate(&h, &e1).unwrap() - 1.0).abs() < 1e-12);
        assert!((fit_rate(&h, &e2).unwrap() - 2.0).abs() < 1e-12);
        assert!(fit_rate(&h, &[1.0, 0.0, 1.0, 1.0]).is_err());
        assert!(fit_rate(&h[..2], &e1[..2]).is_err());
    }
}
