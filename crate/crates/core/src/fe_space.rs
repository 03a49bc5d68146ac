//! Trial and test spaces: conforming Lagrange `P_k` (1 ≤ k ≤ 4) with
//! homogeneous boundary constraints, and first-order Crouzeix–Raviart.
//!
//! Constrained degrees of freedom are removed from the global numbering, so
//! every space is a plain coefficient space without penalty terms.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::mesh::{BoundaryTag, Point, TriangleMesh};
use crate::{Error, Result};

pub const MAX_LAGRANGE_DEGREE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Lagrange(usize),
    /// Crouzeix–Raviart of the given order; only order 1 is supported.
    CrouzeixRaviart(usize),
}

/// Boundary conditions built into a space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Constraint {
    None,
    /// V₀ₕ: zero on Γ0.
    ZeroOnGamma0,
    /// V₁ₕ: zero on Γ1.
    ZeroOnGamma1,
    /// Wₕ: zero on ∂Ω.
    ZeroOnBoundary,
    /// CR_{1,Γ0}: only interior and Γ0 facet moments are free.
    CrZeroMeanOffGamma0,
    /// CR_{1,0}: only interior facet moments are free.
    CrZeroMeanAll,
}

/// Value, derivatives with respect to the barycentric coordinates, and
/// second derivatives of a reference basis function.
#[derive(Debug, Clone, Copy, Default)]
pub struct RefBasisValue {
    pub value: f64,
    pub dlam: [f64; 3],
    pub d2lam: [[f64; 3]; 3],
}

/// Basis function evaluated in physical coordinates.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BasisValue {
    pub value: f64,
    pub grad: Point,
    pub laplacian: f64,
}

/// Shape functions on one triangle, written in barycentric coordinates.
#[derive(Debug, Clone)]
pub enum LocalBasis {
    /// Silvester's product form on equidistant barycentric nodes; one
    /// multi-index `(a, b, c)` with `a + b + c = k` per function.
    Lagrange { degree: usize, nodes: Vec<[usize; 3]> },
    /// `1 − 2λ_i` for the facet opposite local vertex `i`.
    CrouzeixRaviart,
}

impl LocalBasis {
    pub fn lagrange(degree: usize) -> Self {
        let k = degree;
        let mut nodes = vec![[k, 0, 0], [0, k, 0], [0, 0, k]];
        // edge nodes, grouped by the local edge (zero coordinate)
        for zero in 0..3 {
            let (i, j) = ((zero + 1) % 3, (zero + 2) % 3);
            for cj in 1..k {
                let mut n = [0; 3];
                n[i] = k - cj;
                n[j] = cj;
                nodes.push(n);
            }
        }
        for a in 1..k {
            for b in 1..k - a {
                let c = k - a - b;
                if c >= 1 {
                    nodes.push([a, b, c]);
                }
            }
        }
        LocalBasis::Lagrange { degree, nodes }
    }

    pub fn len(&self) -> usize {
        match self {
            LocalBasis::Lagrange { nodes, .. } => nodes.len(),
            LocalBasis::CrouzeixRaviart => 3,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn degree(&self) -> usize {
        match self {
            LocalBasis::Lagrange { degree, .. } => *degree,
            LocalBasis::CrouzeixRaviart => 1,
        }
    }

    /// Barycentric coordinates of the nodal point of each local function.
    pub fn nodes(&self) -> Vec<[f64; 3]> {
        match self {
            LocalBasis::Lagrange { degree, nodes } => nodes
                .iter()
                .map(|n| n.map(|c| c as f64 / *degree as f64))
                .collect(),
            LocalBasis::CrouzeixRaviart => (0..3)
                .map(|i| {
                    let mut lam = [0.5; 3];
                    lam[i] = 0.0;
                    lam
                })
                .collect(),
        }
    }

    pub fn eval(&self, lam: [f64; 3], out: &mut Vec<RefBasisValue>) {
        out.clear();
        match self {
            LocalBasis::Lagrange { degree, nodes } => {
                let k = *degree;
                // factors[d][a] = (R_a, R_a', R_a'') at λ_d
                let mut factors = [[(0.0, 0.0, 0.0); MAX_LAGRANGE_DEGREE + 1]; 3];
                for d in 0..3 {
                    let mut p = (1.0, 0.0, 0.0);
                    factors[d][0] = p;
                    for j in 0..k {
                        let alpha = k as f64 / (j + 1) as f64;
                        let l = alpha * lam[d] - j as f64 / (j + 1) as f64;
                        p = (p.0 * l, p.1 * l + p.0 * alpha, p.2 * l + 2.0 * p.1 * alpha);
                        factors[d][j + 1] = p;
                    }
                }
                for n in nodes {
                    let f = [factors[0][n[0]], factors[1][n[1]], factors[2][n[2]]];
                    let v = [f[0].0, f[1].0, f[2].0];
                    let d1 = [f[0].1, f[1].1, f[2].1];
                    let d2 = [f[0].2, f[1].2, f[2].2];
                    let mut r = RefBasisValue {
                        value: v[0] * v[1] * v[2],
                        ..Default::default()
                    };
                    for i in 0..3 {
                        let (j, l) = ((i + 1) % 3, (i + 2) % 3);
                        r.dlam[i] = d1[i] * v[j] * v[l];
                        r.d2lam[i][i] = d2[i] * v[j] * v[l];
                        r.d2lam[i][j] = d1[i] * d1[j] * v[l];
                        r.d2lam[j][i] = r.d2lam[i][j];
                    }
                    out.push(r);
                }
            }
            LocalBasis::CrouzeixRaviart => {
                for i in 0..3 {
                    let mut r = RefBasisValue {
                        value: 1.0 - 2.0 * lam[i],
                        ..Default::default()
                    };
                    r.dlam[i] = -2.0;
                    out.push(r);
                }
            }
        }
    }
}

/// Maps reference derivatives to physical ones on a triangle.
pub fn to_physical(r: &RefBasisValue, grad_lambda: &[Point; 3]) -> BasisValue {
    let mut grad = [0.0; 2];
    for (d, g) in r.dlam.iter().zip(grad_lambda) {
        grad[0] += d * g[0];
        grad[1] += d * g[1];
    }
    let mut laplacian = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            if r.d2lam[i][j] != 0.0 {
                laplacian += r.d2lam[i][j]
                    * (grad_lambda[i][0] * grad_lambda[j][0] + grad_lambda[i][1] * grad_lambda[j][1]);
            }
        }
    }
    BasisValue {
        value: r.value,
        grad,
        laplacian,
    }
}

/// A finite element space over a mesh with its global degree-of-freedom map.
#[derive(Debug, Clone)]
pub struct FiniteElementSpace {
    mesh: Arc<TriangleMesh>,
    family: Family,
    constraint: Constraint,
    basis: LocalBasis,
    /// Global dof of each local function, `None` when constrained.
    cell_dofs: Vec<Option<usize>>,
    ndofs: usize,
    dof_coords: Vec<Point>,
}

impl FiniteElementSpace {
    pub fn new(mesh: Arc<TriangleMesh>, family: Family, constraint: Constraint) -> Result<Self> {
        match family {
            Family::Lagrange(k) => {
                if k == 0 || k > MAX_LAGRANGE_DEGREE {
                    return Err(Error::UnsupportedSpace(format!(
                        "Lagrange degree {k} outside 1..={MAX_LAGRANGE_DEGREE}"
                    )));
                }
                if matches!(
                    constraint,
                    Constraint::CrZeroMeanAll | Constraint::CrZeroMeanOffGamma0
                ) {
                    return Err(Error::UnsupportedSpace(format!(
                        "{constraint:?} applies to Crouzeix-Raviart spaces only"
                    )));
                }
                Ok(Self::lagrange(mesh, k, constraint))
            }
            Family::CrouzeixRaviart(k) => {
                if k != 1 {
                    return Err(Error::UnsupportedSpace(format!(
                        "Crouzeix-Raviart order {k}: only order 1 is implemented"
                    )));
                }
                if !matches!(
                    constraint,
                    Constraint::None | Constraint::CrZeroMeanAll | Constraint::CrZeroMeanOffGamma0
                ) {
                    return Err(Error::UnsupportedSpace(format!(
                        "{constraint:?} is not a Crouzeix-Raviart constraint"
                    )));
                }
                Ok(Self::crouzeix_raviart(mesh, constraint))
            }
        }
    }

    fn lagrange(mesh: Arc<TriangleMesh>, k: usize, constraint: Constraint) -> Self {
        let basis = LocalBasis::lagrange(k);
        let nv = mesh.num_vertices();
        let nf = mesh.num_facets();
        let per_edge = k - 1;
        let per_cell = if k >= 3 { (k - 1) * (k - 2) / 2 } else { 0 };
        let full = nv + per_edge * nf + per_cell * mesh.num_triangles();

        let facet_blocked = |f: usize| -> bool {
            let tag = mesh.boundary_tag(f);
            match constraint {
                Constraint::ZeroOnGamma0 => tag == Some(BoundaryTag::Gamma0),
                Constraint::ZeroOnGamma1 => tag == Some(BoundaryTag::Gamma1),
                Constraint::ZeroOnBoundary => tag.is_some(),
                _ => false,
            }
        };
        let mut blocked = vec![false; full];
        for (f, facet) in mesh.facets().iter().enumerate() {
            if facet_blocked(f) {
                blocked[facet.vertices[0]] = true;
                blocked[facet.vertices[1]] = true;
                for p in 0..per_edge {
                    blocked[nv + f * per_edge + p] = true;
                }
            }
        }
        let mut renumber = vec![None; full];
        let mut ndofs = 0;
        for (slot, &b) in renumber.iter_mut().zip(&blocked) {
            if !b {
                *slot = Some(ndofs);
                ndofs += 1;
            }
        }

        let LocalBasis::Lagrange { nodes, .. } = &basis else {
            unreachable!()
        };
        let nloc = nodes.len();
        let mut cell_dofs = Vec::with_capacity(nloc * mesh.num_triangles());
        let mut dof_coords = vec![[0.0; 2]; ndofs];
        for t in 0..mesh.num_triangles() {
            let tri = mesh.triangles()[t];
            let facets = mesh.triangle_facets(t);
            let pts = mesh.cell_points(t);
            let mut interior = 0;
            for n in nodes {
                let zeros: Vec<usize> = (0..3).filter(|&i| n[i] == 0).collect();
                let full_index = match zeros.len() {
                    2 => tri[(0..3).find(|&i| n[i] != 0).unwrap()],
                    1 => {
                        let e = zeros[0];
                        let facet = &mesh.facets()[facets[e]];
                        // position counted from the lower-numbered endpoint
                        let hi = facet.vertices[1];
                        let local_hi = (0..3).find(|&i| tri[i] == hi).unwrap();
                        nv + facets[e] * per_edge + (n[local_hi] - 1)
                    }
                    _ => {
                        interior += 1;
                        nv + per_edge * nf + t * per_cell + interior - 1
                    }
                };
                let dof = renumber[full_index];
                if let Some(d) = dof {
                    let lam = n.map(|c| c as f64 / k as f64);
                    dof_coords[d] = [
                        lam[0] * pts[0][0] + lam[1] * pts[1][0] + lam[2] * pts[2][0],
                        lam[0] * pts[0][1] + lam[1] * pts[1][1] + lam[2] * pts[2][1],
                    ];
                }
                cell_dofs.push(dof);
            }
        }
        FiniteElementSpace {
            mesh,
            family: Family::Lagrange(k),
            constraint,
            basis,
            cell_dofs,
            ndofs,
            dof_coords,
        }
    }

    fn crouzeix_raviart(mesh: Arc<TriangleMesh>, constraint: Constraint) -> Self {
        let mut renumber = vec![None; mesh.num_facets()];
        let mut dof_coords = Vec::new();
        for (f, facet) in mesh.facets().iter().enumerate() {
            let keep = match constraint {
                Constraint::CrZeroMeanAll => facet.is_interior(),
                Constraint::CrZeroMeanOffGamma0 => {
                    facet.is_interior() || mesh.boundary_tag(f) == Some(BoundaryTag::Gamma0)
                }
                _ => true,
            };
            if keep {
                renumber[f] = Some(dof_coords.len());
                dof_coords.push(facet.midpoint(&mesh));
            }
        }
        let cell_dofs = (0..mesh.num_triangles())
            .flat_map(|t| mesh.triangle_facets(t).map(|f| renumber[f]))
            .collect();
        FiniteElementSpace {
            ndofs: dof_coords.len(),
            mesh,
            family: Family::CrouzeixRaviart(1),
            constraint,
            basis: LocalBasis::CrouzeixRaviart,
            cell_dofs,
            dof_coords,
        }
    }

    pub fn mesh(&self) -> &Arc<TriangleMesh> {
        &self.mesh
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn constraint(&self) -> Constraint {
        self.constraint
    }

    pub fn basis(&self) -> &LocalBasis {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn is_conforming(&self) -> bool {
        matches!(self.family, Family::Lagrange(_))
    }

    pub fn ndofs(&self) -> usize {
        self.ndofs
    }

    pub fn local_len(&self) -> usize {
        self.basis.len()
    }

    /// Global dofs of the local functions on triangle `t`.
    pub fn cell_dofs(&self, t: usize) -> &[Option<usize>] {
        let n = self.basis.len();
        &self.cell_dofs[t * n..(t + 1) * n]
    }

    /// Nodal location of each global dof.
    pub fn dof_coords(&self) -> &[Point] {
        &self.dof_coords
    }

    /// Values and physical derivatives of every local function of triangle
    /// `t` at barycentric point `lam`.
    pub fn eval_basis(&self, t: usize, lam: [f64; 3]) -> Vec<BasisValue> {
        let mut buf = Vec::with_capacity(self.basis.len());
        self.basis.eval(lam, &mut buf);
        let g = &self.mesh.geometry(t).grad_lambda;
        buf.iter().map(|r| to_physical(r, g)).collect()
    }

    /// Nodal interpolant of `f`; for CR1 the dof value is `f` at the facet midpoint.
    pub fn interpolate(self: &Arc<Self>, f: impl Fn(Point) -> f64) -> FeFunction {
        let coefficients = self.dof_coords.iter().map(|&x| f(x)).collect();
        FeFunction {
            space: Arc::clone(self),
            coefficients,
        }
    }

    pub fn zero_function(self: &Arc<Self>) -> FeFunction {
        FeFunction {
            space: Arc::clone(self),
            coefficients: vec![0.0; self.ndofs],
        }
    }
}

/// Coefficient vector over a space.
#[derive(Debug, Clone)]
pub struct FeFunction {
    space: Arc<FiniteElementSpace>,
    coefficients: Vec<f64>,
}

impl FeFunction {
    pub fn new(space: Arc<FiniteElementSpace>, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != space.ndofs() {
            return Err(Error::SpaceMismatch(format!(
                "{} coefficients for a space with {} dofs",
                coefficients.len(),
                space.ndofs()
            )));
        }
        Ok(FeFunction {
            space,
            coefficients,
        })
    }

    pub fn space(&self) -> &Arc<FiniteElementSpace> {
        &self.space
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coefficients
    }

    /// Local coefficients on triangle `t`; constrained dofs contribute zero.
    pub fn local_coefficients(&self, t: usize) -> Vec<f64> {
        self.space
            .cell_dofs(t)
            .iter()
            .map(|d| d.map_or(0.0, |d| self.coefficients[d]))
            .collect()
    }

    /// Value, gradient and Laplacian of the restriction to triangle `t`.
    pub fn eval(&self, t: usize, lam: [f64; 3]) -> BasisValue {
        let local = self.local_coefficients(t);
        let mut out = BasisValue::default();
        for (c, b) in local.iter().zip(self.space.eval_basis(t, lam)) {
            out.value += c * b.value;
            out.grad[0] += c * b.grad[0];
            out.grad[1] += c * b.grad[1];
            out.laplacian += c * b.laplacian;
        }
        out
    }

    /// Evaluates at a physical point (inside the triangle found by location).
    pub fn eval_at(&self, x: Point) -> BasisValue {
        let (t, lam) = self.space.mesh().locate(x);
        self.eval(t, lam)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::SquareSide;

    fn mesh(nx: usize, ny: usize) -> Arc<TriangleMesh> {
        Arc::new(TriangleMesh::structured(nx, ny).unwrap())
    }

    #[test]
    fn p1_unconstrained_on_single_cell() {
        let s = FiniteElementSpace::new(mesh(1, 1), Family::Lagrange(1), Constraint::None).unwrap();
        assert_eq!(s.ndofs(), 4);
    }

    #[test]
    fn p2_zero_on_boundary_on_2x2() {
        let s = FiniteElementSpace::new(mesh(2, 2), Family::Lagrange(2), Constraint::ZeroOnBoundary)
            .unwrap();
        assert_eq!(s.ndofs(), 9);
    }

    #[test]
    fn cr_single_interior_facet() {
        let s = FiniteElementSpace::new(
            mesh(1, 1),
            Family::CrouzeixRaviart(1),
            Constraint::CrZeroMeanAll,
        )
        .unwrap();
        assert_eq!(s.ndofs(), 1);
    }

    #[test]
    fn rejects_unsupported_families() {
        let m = mesh(2, 2);
        assert!(FiniteElementSpace::new(m.clone(), Family::CrouzeixRaviart(3), Constraint::None).is_err());
        assert!(FiniteElementSpace::new(m.clone(), Family::Lagrange(5), Constraint::None).is_err());
        assert!(FiniteElementSpace::new(m.clone(), Family::Lagrange(0), Constraint::None).is_err());
        assert!(FiniteElementSpace::new(m, Family::Lagrange(2), Constraint::CrZeroMeanAll).is_err());
    }

    #[test]
    fn cr_basis_is_one_at_own_midpoint() {
        let s = FiniteElementSpace::new(mesh(2, 2), Family::CrouzeixRaviart(1), Constraint::None)
            .unwrap();
        let nodes = s.basis().nodes();
        for (i, lam) in nodes.iter().enumerate() {
            let vals = s.eval_basis(3, *lam);
            for (j, v) in vals.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((v.value - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn lagrange_kronecker_and_partition_of_unity() {
        for k in 1..=MAX_LAGRANGE_DEGREE {
            let b = LocalBasis::lagrange(k);
            assert_eq!(b.len(), (k + 1) * (k + 2) / 2);
            let mut out = Vec::new();
            for (i, lam) in b.nodes().iter().enumerate() {
                b.eval(*lam, &mut out);
                for (j, v) in out.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((v.value - expect).abs() < 1e-13, "k={k} i={i} j={j}");
                }
            }
            b.eval([0.2, 0.3, 0.5], &mut out);
            let sum: f64 = out.iter().map(|v| v.value).sum();
            assert!((sum - 1.0).abs() < 1e-13);
            for (a, b) in [(0, 1), (1, 2)] {
                let tangential: f64 = out.iter().map(|v| v.dlam[a] - v.dlam[b]).sum();
                assert!(tangential.abs() < 1e-11);
            }
        }
    }

    #[test]
    fn interpolation_reproduces_affine_and_quadratic() {
        let m = mesh(3, 4);
        let p1 = Arc::new(FiniteElementSpace::new(m.clone(), Family::Lagrange(1), Constraint::None).unwrap());
        let u = p1.interpolate(|x| x[0]);
        assert!((u.eval_at([0.3, 0.7]).value - 0.3).abs() < 1e-14);
        let ones = p1.interpolate(|_| 1.0);
        assert!(ones.coefficients().iter().all(|&c| c == 1.0));

        let p2 = Arc::new(FiniteElementSpace::new(m, Family::Lagrange(2), Constraint::None).unwrap());
        let u = p2.interpolate(|x| x[0] * x[1]);
        for &x in &[[0.11, 0.92], [0.5, 0.5], [0.77, 0.13]] {
            let v = u.eval_at(x);
            assert!((v.value - x[0] * x[1]).abs() < 1e-13);
            assert!((v.grad[0] - x[1]).abs() < 1e-12 && (v.grad[1] - x[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn constrained_spaces_drop_boundary_nodes() {
        let m = Arc::new(
            TriangleMesh::structured(4, 4)
                .unwrap()
                .tag_boundary(&[SquareSide::Left, SquareSide::Bottom]),
        );
        let v0 = FiniteElementSpace::new(m.clone(), Family::Lagrange(1), Constraint::ZeroOnGamma0).unwrap();
        let v1 = FiniteElementSpace::new(m.clone(), Family::Lagrange(1), Constraint::ZeroOnGamma1).unwrap();
        // Γ0 closure holds 9 vertices, Γ1 closure 9 as well
        assert_eq!(v0.ndofs(), 25 - 9);
        assert_eq!(v1.ndofs(), 25 - 9);
        for x in v0.dof_coords() {
            assert!(x[0] > 0.0 && x[1] > 0.0);
        }
        let cr = FiniteElementSpace::new(m, Family::CrouzeixRaviart(1), Constraint::CrZeroMeanOffGamma0).unwrap();
        let interior = 3 * 16 - 8;
        assert_eq!(cr.ndofs(), interior + 8);
    }
}
