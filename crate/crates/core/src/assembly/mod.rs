//! Bilinear forms and load vectors of the discrete systems.
//!
//! Matrices are laid out with test functions on the rows and trial functions
//! on the columns. All forms are broken (element-wise) so they apply equally
//! to conforming and Crouzeix–Raviart spaces. Facet terms use the local facet
//! length `h_F` and element terms the local diameter `h_K`.

mod sparse;

use std::sync::Arc;

use crate::fe_space::{to_physical, BasisValue, FeFunction, FiniteElementSpace, RefBasisValue};
use crate::mesh::{BoundaryTag, Point, Region, TriangleMesh};
use crate::parallel::{map_chunks, Execution};
use crate::quadrature::{edge_rule, triangle_rule, TriangleRule, MAX_ORDER};
use crate::{Error, Result};

pub use sparse::{dot, SparseMatrix};

/// Quadrature order used for non-polynomial data.
pub const DATA_ORDER: usize = MAX_ORDER;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormKind {
    /// `(∇_h u, ∇_h v)` over the elements.
    BrokenStiffness,
    /// `(u, v)_Ω`.
    L2Mass,
    /// Broken H¹ product: `L2Mass + BrokenStiffness`.
    BrokenH1,
    /// `(u, v)_ω` over triangles tagged [`Region::OmegaData`].
    OmegaMass,
    /// `Σ_{K ⊂ ω} h_K⁻² (u, v)_K`.
    OmegaMassInvH2,
    /// `∫_{Γ0} u v`.
    Gamma0Mass,
    /// `𝒥_h(u, v) = Σ_{F interior} h_F ∫_F ⟦∇u·n⟧⟦∇v·n⟧`.
    JumpPenalty,
    /// `Σ_{F ⊂ Γ0} h_F ∫_F (∇u·ν)(∇v·ν)`.
    NormalDerivGamma0,
    /// `Σ_{F ⊂ ∂Ω} h_F ∫_F (∇u·ν)(∇v·ν)`.
    BoundaryNormalDeriv,
    /// `Σ_K h_K² (Δu, Δv)_K`.
    ElementLaplacian,
    /// `Σ_K h_K² ⟨u, v⟩_{H¹(K)}`.
    MeshWeightedH1,
    /// `𝒥_h + BoundaryNormalDeriv + ElementLaplacian`.
    SStar,
}

impl FormKind {
    pub fn is_symmetric(self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RhsKind {
    /// `(q, v)_ω`.
    InteriorData,
    /// `Σ_{K ⊂ ω} h_K⁻² (q, v)_K`.
    InteriorDataInvH2,
    /// `(f, w)_Ω`.
    Source,
    /// `⟨φ, w⟩_{Γ0}`.
    NeumannGamma0,
}

/// Where a data field is being sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entity {
    Cell(usize),
    Facet(usize),
}

/// Pointwise data that may also depend on the element or facet it is
/// sampled on (piecewise-constant noise does).
pub trait DataField: Sync {
    fn value(&self, x: Point, at: Entity) -> f64;
}

impl<F> DataField for F
where
    F: Fn(Point) -> f64 + Sync,
{
    fn value(&self, x: Point, _at: Entity) -> f64 {
        self(x)
    }
}

fn check_same_mesh(a: &FiniteElementSpace, b: &FiniteElementSpace) -> Result<()> {
    if Arc::ptr_eq(a.mesh(), b.mesh()) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(
            "trial and test spaces live on different meshes".into(),
        ))
    }
}

pub fn assemble_form(
    kind: FormKind,
    trial: &FiniteElementSpace,
    test: &FiniteElementSpace,
) -> Result<SparseMatrix> {
    assemble_form_with(kind, trial, test, Execution::default())
}

pub fn assemble_form_with(
    kind: FormKind,
    trial: &FiniteElementSpace,
    test: &FiniteElementSpace,
    exec: Execution,
) -> Result<SparseMatrix> {
    check_same_mesh(trial, test)?;
    let mesh = trial.mesh().as_ref();
    let (ku, kv) = (trial.degree(), test.degree());
    let mass_order = ku + kv;
    let grad_order = (ku + kv).saturating_sub(2);
    let lap_order = (ku + kv).saturating_sub(4);
    let one = |_t: usize| Some(1.0);
    let require_omega = || -> Result<()> {
        if mesh.region_count(Region::OmegaData) == 0 {
            return Err(Error::MissingTag("the data region ω is empty".into()));
        }
        Ok(())
    };
    let require_gamma0 = || -> Result<()> {
        if !mesh.has_tag(BoundaryTag::Gamma0) {
            return Err(Error::MissingTag("no facets are tagged Γ0".into()));
        }
        Ok(())
    };
    match kind {
        FormKind::BrokenStiffness => {
            cell_form(trial, test, grad_order, exec, one, |u, v| grad_dot(u, v))
        }
        FormKind::L2Mass => cell_form(trial, test, mass_order, exec, one, |u, v| u.value * v.value),
        FormKind::BrokenH1 => cell_form(trial, test, mass_order, exec, one, |u, v| {
            u.value * v.value + grad_dot(u, v)
        }),
        FormKind::OmegaMass => {
            require_omega()?;
            let w = |t| mesh.in_region(t, Region::OmegaData).then_some(1.0);
            cell_form(trial, test, mass_order, exec, w, |u, v| u.value * v.value)
        }
        FormKind::OmegaMassInvH2 => {
            require_omega()?;
            let w = |t| {
                mesh.in_region(t, Region::OmegaData)
                    .then(|| mesh.cell_diameter(t).powi(-2))
            };
            cell_form(trial, test, mass_order, exec, w, |u, v| u.value * v.value)
        }
        FormKind::ElementLaplacian => {
            if ku < 2 || kv < 2 {
                return Ok(SparseMatrix::zeros(test.ndofs(), trial.ndofs()));
            }
            let w = |t| Some(mesh.cell_diameter(t).powi(2));
            cell_form(trial, test, lap_order, exec, w, |u, v| u.laplacian * v.laplacian)
        }
        FormKind::MeshWeightedH1 => {
            let w = |t| Some(mesh.cell_diameter(t).powi(2));
            cell_form(trial, test, mass_order, exec, w, |u, v| {
                u.value * v.value + grad_dot(u, v)
            })
        }
        FormKind::Gamma0Mass => {
            require_gamma0()?;
            let sel = |f| (mesh.boundary_tag(f) == Some(BoundaryTag::Gamma0)).then_some(1.0);
            facet_form(trial, test, mass_order, exec, sel, Trace::Value)
        }
        FormKind::JumpPenalty => {
            let sel = |f: usize| {
                let facet = &mesh.facets()[f];
                facet.is_interior().then_some(facet.length)
            };
            facet_form(trial, test, grad_order, exec, sel, Trace::GradJump)
        }
        FormKind::NormalDerivGamma0 => {
            require_gamma0()?;
            let sel = |f: usize| {
                (mesh.boundary_tag(f) == Some(BoundaryTag::Gamma0))
                    .then(|| mesh.facets()[f].length)
            };
            facet_form(trial, test, grad_order, exec, sel, Trace::NormalDerivative)
        }
        FormKind::BoundaryNormalDeriv => {
            let sel = |f: usize| {
                let facet = &mesh.facets()[f];
                (!facet.is_interior()).then_some(facet.length)
            };
            facet_form(trial, test, grad_order, exec, sel, Trace::NormalDerivative)
        }
        FormKind::SStar => {
            let j = assemble_form_with(FormKind::JumpPenalty, trial, test, exec)?;
            let b = assemble_form_with(FormKind::BoundaryNormalDeriv, trial, test, exec)?;
            let l = assemble_form_with(FormKind::ElementLaplacian, trial, test, exec)?;
            j.add_scaled(&b, 1.0)?.add_scaled(&l, 1.0)
        }
    }
}

fn grad_dot(u: &BasisValue, v: &BasisValue) -> f64 {
    u.grad[0] * v.grad[0] + u.grad[1] * v.grad[1]
}

fn tabulate(space: &FiniteElementSpace, rule: &TriangleRule) -> Vec<Vec<RefBasisValue>> {
    rule.points
        .iter()
        .map(|&lam| {
            let mut out = Vec::new();
            space.basis().eval(lam, &mut out);
            out
        })
        .collect()
}

fn cell_form<W, I>(
    trial: &FiniteElementSpace,
    test: &FiniteElementSpace,
    order: usize,
    exec: Execution,
    weight: W,
    integrand: I,
) -> Result<SparseMatrix>
where
    W: Fn(usize) -> Option<f64> + Sync,
    I: Fn(&BasisValue, &BasisValue) -> f64 + Sync,
{
    let rule = triangle_rule(order)?;
    let tab_u = tabulate(trial, rule);
    let tab_v = tabulate(test, rule);
    let (nu, nv) = (trial.local_len(), test.local_len());
    let mesh = trial.mesh();
    let triplets = map_chunks(mesh.num_triangles(), exec, |cells| {
        let mut out = Vec::new();
        let mut local = vec![0.0; nu * nv];
        let mut pu = vec![BasisValue::default(); nu];
        let mut pv = vec![BasisValue::default(); nv];
        for t in cells {
            let Some(wt) = weight(t) else { continue };
            let geo = mesh.geometry(t);
            local.fill(0.0);
            for (q, &w) in rule.weights.iter().enumerate() {
                let scale = w * 2.0 * geo.area * wt;
                for (p, r) in pu.iter_mut().zip(&tab_u[q]) {
                    *p = to_physical(r, &geo.grad_lambda);
                }
                for (p, r) in pv.iter_mut().zip(&tab_v[q]) {
                    *p = to_physical(r, &geo.grad_lambda);
                }
                for (i, v) in pv.iter().enumerate() {
                    for (j, u) in pu.iter().enumerate() {
                        local[i * nu + j] += scale * integrand(u, v);
                    }
                }
            }
            scatter(trial.cell_dofs(t), test.cell_dofs(t), &local, &mut out);
        }
        out
    });
    Ok(SparseMatrix::from_triplets(test.ndofs(), trial.ndofs(), triplets))
}

fn scatter(
    trial_dofs: &[Option<usize>],
    test_dofs: &[Option<usize>],
    local: &[f64],
    out: &mut Vec<(usize, usize, f64)>,
) {
    let nu = trial_dofs.len();
    for (i, di) in test_dofs.iter().enumerate() {
        let Some(di) = di else { continue };
        for (j, dj) in trial_dofs.iter().enumerate() {
            if let Some(dj) = dj {
                out.push((*di, *dj, local[i * nu + j]));
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Trace {
    /// `⟦∇v·n⟧ = (∇v|K0 − ∇v|K1)·n_F`, with `n_F` pointing out of `K0`.
    GradJump,
    /// `∇v·ν` on a boundary facet.
    NormalDerivative,
    Value,
}

/// Trace quantities of all local functions of both adjacent cells at `x`,
/// paired with their global dofs.
fn facet_traces(
    space: &FiniteElementSpace,
    mesh: &TriangleMesh,
    f: usize,
    x: Point,
    trace: Trace,
    out: &mut Vec<(Option<usize>, f64)>,
) {
    out.clear();
    let facet = &mesh.facets()[f];
    let n = facet.normal;
    for (side, cell) in facet.cells.iter().enumerate() {
        let Some(c) = *cell else { continue };
        let lam = mesh.geometry(c).barycentric(x);
        let sign = if side == 0 { 1.0 } else { -1.0 };
        for (b, d) in space.eval_basis(c, lam).iter().zip(space.cell_dofs(c)) {
            let q = match trace {
                Trace::GradJump | Trace::NormalDerivative => {
                    sign * (b.grad[0] * n[0] + b.grad[1] * n[1])
                }
                Trace::Value => b.value,
            };
            match out.iter_mut().find(|e| e.0.is_some() && e.0 == *d) {
                Some(e) => e.1 += q,
                None => out.push((*d, q)),
            }
        }
    }
}

fn facet_form<S>(
    trial: &FiniteElementSpace,
    test: &FiniteElementSpace,
    order: usize,
    exec: Execution,
    select: S,
    trace: Trace,
) -> Result<SparseMatrix>
where
    S: Fn(usize) -> Option<f64> + Sync,
{
    let rule = edge_rule(order)?;
    let mesh = trial.mesh().as_ref();
    let triplets = map_chunks(mesh.num_facets(), exec, |facets| {
        let mut out = Vec::new();
        let mut tu = Vec::new();
        let mut tv = Vec::new();
        let mut local: Vec<f64> = Vec::new();
        for f in facets {
            let Some(weight) = select(f) else { continue };
            let facet = &mesh.facets()[f];
            local.clear();
            let mut dims = (0, 0);
            for (s, w) in rule.iter() {
                let x = facet.point_at(mesh, s);
                facet_traces(trial, mesh, f, x, trace, &mut tu);
                facet_traces(test, mesh, f, x, trace, &mut tv);
                if local.is_empty() {
                    dims = (tv.len(), tu.len());
                    local.resize(dims.0 * dims.1, 0.0);
                }
                let scale = w * facet.length * weight;
                for (i, (_, qv)) in tv.iter().enumerate() {
                    for (j, (_, qu)) in tu.iter().enumerate() {
                        local[i * dims.1 + j] += scale * (qv * qu);
                    }
                }
            }
            for (i, (dv, _)) in tv.iter().enumerate() {
                let Some(dv) = dv else { continue };
                for (j, (du, _)) in tu.iter().enumerate() {
                    if let Some(du) = du {
                        out.push((*dv, *du, local[i * dims.1 + j]));
                    }
                }
            }
        }
        out
    });
    Ok(SparseMatrix::from_triplets(test.ndofs(), trial.ndofs(), triplets))
}

pub fn assemble_rhs(kind: RhsKind, test: &FiniteElementSpace, data: &dyn DataField) -> Result<Vec<f64>> {
    assemble_rhs_with(kind, test, data, Execution::default())
}

pub fn assemble_rhs_with(
    kind: RhsKind,
    test: &FiniteElementSpace,
    data: &dyn DataField,
    exec: Execution,
) -> Result<Vec<f64>> {
    let mesh = test.mesh().as_ref();
    let entries: Vec<(usize, f64)> = match kind {
        RhsKind::InteriorData | RhsKind::InteriorDataInvH2 | RhsKind::Source => {
            let region_only = kind != RhsKind::Source;
            if region_only && mesh.region_count(Region::OmegaData) == 0 {
                return Err(Error::MissingTag("the data region ω is empty".into()));
            }
            let rule = triangle_rule(DATA_ORDER)?;
            let tab = tabulate(test, rule);
            map_chunks(mesh.num_triangles(), exec, |cells| {
                let mut out = Vec::new();
                let mut local = vec![0.0; test.local_len()];
                for t in cells {
                    if region_only && !mesh.in_region(t, Region::OmegaData) {
                        continue;
                    }
                    let weight = if kind == RhsKind::InteriorDataInvH2 {
                        mesh.cell_diameter(t).powi(-2)
                    } else {
                        1.0
                    };
                    let geo = mesh.geometry(t);
                    let pts = mesh.cell_points(t);
                    local.fill(0.0);
                    for (q, (lam, w)) in rule.iter().enumerate() {
                        let x = [
                            lam[0] * pts[0][0] + lam[1] * pts[1][0] + lam[2] * pts[2][0],
                            lam[0] * pts[0][1] + lam[1] * pts[1][1] + lam[2] * pts[2][1],
                        ];
                        let fx = data.value(x, Entity::Cell(t)) * w * 2.0 * geo.area * weight;
                        for (l, r) in local.iter_mut().zip(&tab[q]) {
                            *l += fx * r.value;
                        }
                    }
                    for (d, v) in test.cell_dofs(t).iter().zip(&local) {
                        if let Some(d) = d {
                            out.push((*d, *v));
                        }
                    }
                }
                out
            })
        }
        RhsKind::NeumannGamma0 => {
            if !mesh.has_tag(BoundaryTag::Gamma0) {
                return Err(Error::MissingTag("no facets are tagged Γ0".into()));
            }
            let rule = edge_rule(DATA_ORDER)?;
            map_chunks(mesh.num_facets(), exec, |facets| {
                let mut out = Vec::new();
                let mut traces = Vec::new();
                for f in facets {
                    if mesh.boundary_tag(f) != Some(BoundaryTag::Gamma0) {
                        continue;
                    }
                    let facet = &mesh.facets()[f];
                    for (s, w) in rule.iter() {
                        let x = facet.point_at(mesh, s);
                        let fx = data.value(x, Entity::Facet(f)) * w * facet.length;
                        facet_traces(test, mesh, f, x, Trace::Value, &mut traces);
                        for (d, v) in &traces {
                            if let Some(d) = d {
                                out.push((*d, fx * v));
                            }
                        }
                    }
                }
                out
            })
        }
    };
    let mut rhs = vec![0.0; test.ndofs()];
    for (d, v) in entries {
        rhs[d] += v;
    }
    Ok(rhs)
}

/// Element-wise Laplacian `Δ_h u` of a discrete function.
#[derive(Debug, Clone, Copy)]
pub struct BrokenLaplacian<'a> {
    u: &'a FeFunction,
}

pub fn broken_laplacian(u: &FeFunction) -> BrokenLaplacian<'_> {
    BrokenLaplacian { u }
}

impl BrokenLaplacian<'_> {
    /// `Δ(u|_K)` at barycentric point `lam` of triangle `t`.
    pub fn eval(&self, t: usize, lam: [f64; 3]) -> f64 {
        self.u.eval(t, lam).laplacian
    }

    /// True when the space is piecewise affine, so `Δ_h u ≡ 0`.
    pub fn vanishes_identically(&self) -> bool {
        self.u.space().degree() < 2
    }
}
