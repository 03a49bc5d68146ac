use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;
use quasirev::fe_space::{Constraint, Family, FiniteElementSpace};
use quasirev::mesh::{Rect, Region, SquareSide, TriangleMesh};
use quasirev::quadrature::{edge_rule, triangle_rule, MAX_ORDER};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mesh(nx: usize, ny: usize) -> Arc<TriangleMesh> {
    Arc::new(TriangleMesh::structured(nx, ny).unwrap())
}

fn space(m: &Arc<TriangleMesh>, family: Family, c: Constraint) -> Arc<FiniteElementSpace> {
    Arc::new(FiniteElementSpace::new(Arc::clone(m), family, c).unwrap())
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn fact(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn edges_by_dedup(m: &TriangleMesh) -> usize {
    let mut set = HashSet::new();
    for t in m.triangles() {
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            set.insert((a.min(b), a.max(b)));
        }
    }
    set.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn structured_mesh_topology(nx in 1usize..12, ny in 1usize..12) {
        let m = TriangleMesh::structured(nx, ny).unwrap();
        prop_assert_eq!(m.num_vertices(), (nx + 1) * (ny + 1));
        prop_assert_eq!(m.num_triangles(), 2 * nx * ny);
        let e = edges_by_dedup(&m);
        prop_assert_eq!(e, m.num_facets());
        prop_assert_eq!(m.num_vertices() as i64 - e as i64 + m.num_triangles() as i64, 1);
        for t in 0..m.num_triangles() {
            prop_assert!(m.geometry(t).area > 0.0);
        }
        for (fi, f) in m.facets().iter().enumerate() {
            let n = f.normal;
            prop_assert!(((n[0] * n[0] + n[1] * n[1]).sqrt() - 1.0).abs() < 1e-14);
            let t0 = f.cells[0].unwrap();
            let outward = m.geometry(t0).outward_normal(f.local_index[0]);
            prop_assert!((outward[0] - n[0]).abs() < 1e-14 && (outward[1] - n[1]).abs() < 1e-14);
            if let Some(t1) = f.cells[1] {
                let other = m.geometry(t1).outward_normal(f.local_index[1]);
                prop_assert!((other[0] + n[0]).abs() < 1e-14 && (other[1] + n[1]).abs() < 1e-14);
                prop_assert!(m.boundary_tag(fi).is_none());
            }
        }
        let hmax = (0..m.num_triangles()).map(|t| m.cell_diameter(t)).fold(0.0, f64::max);
        let hmin = (0..m.num_triangles()).map(|t| m.cell_diameter(t)).fold(f64::MAX, f64::min);
        let bound = 2f64.sqrt() * nx.max(ny) as f64 / nx.min(ny) as f64;
        prop_assert!(hmax / hmin <= bound + 1e-12);
    }

    #[test]
    fn dimension_formulas(nx in 1usize..7, ny in 1usize..7, k in 1usize..5) {
        let m = mesh(nx, ny);
        let (v, e, t) = (m.num_vertices(), m.num_facets(), m.num_triangles());
        let s = space(&m, Family::Lagrange(k), Constraint::None);
        prop_assert_eq!(s.ndofs(), v + (k - 1) * e + binom(k - 1, 2) * t);
        let cr = space(&m, Family::CrouzeixRaviart(1), Constraint::None);
        prop_assert_eq!(cr.ndofs(), e);
        let interior = m.facets().iter().filter(|f| f.is_interior()).count();
        let cr0 = space(&m, Family::CrouzeixRaviart(1), Constraint::CrZeroMeanAll);
        prop_assert_eq!(cr0.ndofs(), interior);
    }

    #[test]
    fn region_tagging_is_monotone(a in 0.0f64..0.5, b in 0.5f64..1.0, c in 0.0f64..0.5, d in 0.5f64..1.0, shrink in 0.0f64..0.2) {
        let outer = Rect::new(a, b, c, d);
        let inner = Rect::new(a + shrink, b - shrink, c + shrink, d - shrink);
        let m1 = TriangleMesh::structured(9, 7).unwrap().tag_region(outer, Region::InteriorG);
        let m2 = TriangleMesh::structured(9, 7).unwrap().tag_region(inner, Region::InteriorG);
        for t in 0..m1.num_triangles() {
            prop_assert!(!m2.in_region(t, Region::InteriorG) || m1.in_region(t, Region::InteriorG));
        }
    }

    #[test]
    fn random_polynomials_integrate_exactly(order in 0usize..=MAX_ORDER, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rule = triangle_rule(order).unwrap();
        let mut approx = 0.0;
        let mut exact = 0.0;
        let mut scale = 0.0;
        for a in 0..=order {
            for b in 0..=(order - a) {
                let c: f64 = rng.random_range(-1.0..1.0);
                let reference = fact(a) * fact(b) / fact(a + b + 2);
                exact += c * reference;
                scale += c.abs() * reference;
                approx += c * rule.iter().map(|(l, w)| w * l[1].powi(a as i32) * l[2].powi(b as i32)).sum::<f64>();
            }
        }
        prop_assert!((approx - exact).abs() <= 1e-13 * scale.max(1e-300));
        prop_assert!(rule.weights.iter().all(|&w| w > 0.0));
    }
}

#[test]
fn edge_rules_match_gauss_legendre() {
    let r1 = edge_rule(1).unwrap();
    assert_eq!(r1.len(), 1);
    assert!((r1.points[0] - 0.5).abs() < 1e-15 && (r1.weights[0] - 1.0).abs() < 1e-15);
    let r2 = edge_rule(3).unwrap();
    let mut p = r2.points.clone();
    p.sort_by(f64::total_cmp);
    let s = 1.0 / 3f64.sqrt();
    assert!((p[0] - 0.5 * (1.0 - s)).abs() < 1e-15);
    assert!((p[1] - 0.5 * (1.0 + s)).abs() < 1e-15);
    for order in 0..=MAX_ORDER {
        let r = edge_rule(order).unwrap();
        for d in 0..=order {
            let v: f64 = r.iter().map(|(x, w)| w * x.powi(d as i32)).sum();
            assert!((v - 1.0 / (d as f64 + 1.0)).abs() < 1e-14);
        }
    }
    assert!(edge_rule(MAX_ORDER + 1).is_err());
}

#[test]
fn g_box_on_finest_mesh_matches_brute_force() {
    let g = Rect::new(0.0, 0.8, 0.0, 0.5);
    let m = TriangleMesh::structured(128, 128).unwrap().tag_region(g, Region::InteriorG);
    let mut count = 0;
    for t in m.triangles() {
        let v = m.vertices();
        let cx = (v[t[0]][0] + v[t[1]][0] + v[t[2]][0]) / 3.0;
        let cy = (v[t[0]][1] + v[t[1]][1] + v[t[2]][1]) / 3.0;
        if (0.0..=0.8).contains(&cx) && (0.0..=0.5).contains(&cy) {
            count += 1;
        }
    }
    assert_eq!(m.region_count(Region::InteriorG), count);
    let m10 = TriangleMesh::structured(10, 10).unwrap().tag_region(g, Region::InteriorG);
    assert_eq!(m10.region_count(Region::InteriorG), 80);
}

#[test]
fn boundary_tags_never_overlap() {
    let m = TriangleMesh::structured(5, 3)
        .unwrap()
        .tag_boundary(&[SquareSide::Left, SquareSide::Bottom]);
    let g0: HashSet<usize> = m.tagged_facets(quasirev::mesh::BoundaryTag::Gamma0).collect();
    let g1: HashSet<usize> = m.tagged_facets(quasirev::mesh::BoundaryTag::Gamma1).collect();
    assert!(g0.is_disjoint(&g1));
    assert_eq!(g0.len(), 5 + 3);
    assert_eq!(g1.len(), 5 + 3);
}

/// Values of the local basis of each side of facet `f` at parameter `s`,
/// keyed by global dof.
fn facet_traces(sp: &FiniteElementSpace, f: usize, s: f64) -> [Vec<(usize, f64)>; 2] {
    let m = sp.mesh();
    let facet = &m.facets()[f];
    let x = facet.point_at(m, s);
    let mut out = [Vec::new(), Vec::new()];
    for (side, cell) in facet.cells.iter().enumerate() {
        if let Some(t) = *cell {
            let lam = m.geometry(t).barycentric(x);
            for (d, b) in sp.cell_dofs(t).iter().zip(sp.eval_basis(t, lam)) {
                if let Some(d) = *d {
                    out[side].push((d, b.value));
                }
            }
        }
    }
    out
}

fn jump_of(tr: &[Vec<(usize, f64)>; 2], dof: usize) -> f64 {
    let get = |v: &Vec<(usize, f64)>| v.iter().filter(|p| p.0 == dof).map(|p| p.1).sum::<f64>();
    get(&tr[0]) - get(&tr[1])
}

#[test]
fn lagrange_traces_are_continuous() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = mesh(4, 3);
    for k in 1..=4 {
        let sp = space(&m, Family::Lagrange(k), Constraint::None);
        let coef: Vec<f64> = (0..sp.ndofs()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let u = quasirev::fe_space::FeFunction::new(Arc::clone(&sp), coef).unwrap();
        for facet in m.facets() {
            let [Some(t0), Some(t1)] = facet.cells else { continue };
            for _ in 0..10 {
                let x = facet.point_at(&m, rng.random_range(0.0..1.0));
                let a = u.eval(t0, m.geometry(t0).barycentric(x)).value;
                let b = u.eval(t1, m.geometry(t1).barycentric(x)).value;
                assert!((a - b).abs() < 1e-12, "k = {k}: jump {}", a - b);
            }
        }
    }
}

#[test]
fn lagrange_partition_of_unity_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = mesh(3, 3);
    for k in 1..=4 {
        let sp = space(&m, Family::Lagrange(k), Constraint::None);
        for t in 0..m.num_triangles() {
            let a: f64 = rng.random_range(0.0..1.0);
            let b: f64 = rng.random_range(0.0..(1.0 - a));
            let s: f64 = sp.eval_basis(t, [a, b, 1.0 - a - b]).iter().map(|v| v.value).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn cr_weak_continuity_and_facet_orthogonality() {
    let m = mesh(4, 4);
    let sp = space(&m, Family::CrouzeixRaviart(1), Constraint::None);
    let rule = edge_rule(3).unwrap();
    for (f, facet) in m.facets().iter().enumerate() {
        if facet.is_interior() {
            for dof in 0..sp.ndofs() {
                let mean: f64 = rule
                    .iter()
                    .map(|(s, w)| w * jump_of(&facet_traces(&sp, f, s), dof))
                    .sum();
                let touches = facet_traces(&sp, f, 0.5).iter().flatten().any(|p| p.0 == dof);
                if touches {
                    assert!(mean.abs() < 1e-14, "facet {f}, dof {dof}: {mean}");
                }
            }
        }
    }
    for t in 0..m.num_triangles() {
        let dofs = sp.cell_dofs(t);
        let tf = m.triangle_facets(t);
        for i in 0..3 {
            for j in 0..3 {
                let facet = &m.facets()[tf[j]];
                let g = m.geometry(t);
                let mean: f64 = rule
                    .iter()
                    .map(|(s, w)| w * sp.eval_basis(t, g.barycentric(facet.point_at(&m, s)))[i].value)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((mean - expect).abs() < 1e-14, "triangle {t} dof {:?}", dofs[i]);
                if i == j {
                    let mid = sp.eval_basis(t, g.barycentric(facet.midpoint(&m)))[i].value;
                    assert!((mid - 1.0).abs() < 1e-14);
                }
            }
        }
    }
}

/// Largest ratio over cells and local basis functions of
/// `(h_K ‖v‖²_∂K / ‖v‖²_K, h_K² ‖∇v‖²_K / ‖v‖²_K, h_K ‖∇v·n‖²_∂K / ‖∇v‖²_K)`.
fn inequality_constants(n: usize, k: usize) -> [f64; 3] {
    let m = mesh(n, n);
    let sp = space(&m, Family::Lagrange(k), Constraint::None);
    let tri = triangle_rule(2 * k).unwrap();
    let edge = edge_rule(2 * k).unwrap();
    let mut worst = [0.0f64; 3];
    for t in 0..m.num_triangles() {
        let g = m.geometry(t);
        let h = m.cell_diameter(t);
        let nloc = sp.local_len();
        let mut l2 = vec![0.0; nloc];
        let mut grad = vec![0.0; nloc];
        for (lam, w) in tri.iter() {
            for (i, b) in sp.eval_basis(t, lam).iter().enumerate() {
                l2[i] += 2.0 * g.area * w * b.value * b.value;
                grad[i] += 2.0 * g.area * w * (b.grad[0] * b.grad[0] + b.grad[1] * b.grad[1]);
            }
        }
        let mut trace = vec![0.0; nloc];
        let mut ntrace = vec![0.0; nloc];
        for &f in &m.triangle_facets(t) {
            let facet = &m.facets()[f];
            for (s, w) in edge.iter() {
                let lam = g.barycentric(facet.point_at(&m, s));
                for (i, b) in sp.eval_basis(t, lam).iter().enumerate() {
                    let dn = b.grad[0] * facet.normal[0] + b.grad[1] * facet.normal[1];
                    trace[i] += facet.length * w * b.value * b.value;
                    ntrace[i] += facet.length * w * dn * dn;
                }
            }
        }
        for i in 0..nloc {
            worst[0] = worst[0].max(h * trace[i] / l2[i]);
            worst[1] = worst[1].max(h * h * grad[i] / l2[i]);
            worst[2] = worst[2].max(h * ntrace[i] / grad[i]);
        }
    }
    worst
}

#[test]
fn discrete_inequality_constants_do_not_grow() {
    for k in [1, 2] {
        let c: Vec<[f64; 3]> = [8, 16, 32].iter().map(|&n| inequality_constants(n, k)).collect();
        for i in 0..3 {
            assert!(c[0][i].is_finite() && c[0][i] > 0.0);
            assert!(c[1][i] <= c[0][i] * (1.0 + 1e-9));
            assert!(c[2][i] <= c[1][i] * (1.0 + 1e-9));
        }
    }
}
