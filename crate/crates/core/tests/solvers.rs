use std::sync::Arc;

use faer::{Mat, Side};
use quasirev::analysis::triple_norm_gram;
use quasirev::assembly::SparseMatrix;
use quasirev::experiments::ExperimentConfig;
use quasirev::linalg::{
    condition_number, infsup_constant, infsup_dense, infsup_lanczos, solve_sparse, ConditionMethod,
};
use quasirev::schemes::{build_system, DualSpace, Problem, SchemeConfig, Variant};
use quasirev::Error;

fn mesh_for(problem: Problem, n: usize) -> Arc<quasirev::mesh::TriangleMesh> {
    let ecfg = ExperimentConfig {
        problem,
        ..Default::default()
    };
    ecfg.mesh(n).unwrap()
}

fn catalogue() -> Vec<SchemeConfig> {
    use DualSpace::*;
    use Problem::*;
    vec![
        SchemeConfig::new(UniqueContinuation, Variant::Regularized, 1, Lagrange(2)),
        SchemeConfig::new(UniqueContinuation, Variant::Regularized, 2, Lagrange(3)),
        SchemeConfig::new(UniqueContinuation, Variant::L2Stabilized, 1, Lagrange(2)),
        SchemeConfig::new(UniqueContinuation, Variant::L2Stabilized, 2, Lagrange(2)),
        SchemeConfig::hadamard_cauchy(1, 1, 1),
        SchemeConfig::hadamard_cauchy(1, 2, 3),
        SchemeConfig::hadamard_cauchy(2, 3, 1),
        SchemeConfig::unregularized(UniqueContinuation),
        SchemeConfig::unregularized(Cauchy),
    ]
}

#[test]
fn catalogued_systems_solve_to_tolerance() {
    for cfg in catalogue() {
        let scheme = build_system(&cfg, mesh_for(cfg.problem, 8)).unwrap();
        let sol = scheme.solve().unwrap();
        let mut x = sol.u.coefficients().to_vec();
        x.extend_from_slice(sol.lambda.coefficients());
        let b = scheme.system.rhs();
        let ax = scheme.system.matrix().mul_vec(&x);
        let res = ax.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(res <= 1e-10 * (1.0 + bn), "{cfg:?}: residual {res:e}");
        assert!(scheme.system.a12.add_scaled(&scheme.system.a21.transpose(), -1.0).unwrap().max_abs() == 0.0);
    }
}

#[test]
fn dense_and_iterative_condition_numbers_agree() {
    let cfg = SchemeConfig::hadamard_cauchy(1, 2, 1).with_epsilon(1e-2);
    let scheme = build_system(&cfg, mesh_for(Problem::Cauchy, 8)).unwrap();
    let a = scheme.system.matrix();
    let dense = condition_number(&a, ConditionMethod::DenseExact).unwrap();
    let iter = condition_number(&a, ConditionMethod::Iterative).unwrap();
    assert!((iter / dense - 1.0).abs() < 0.05, "{dense} vs {iter}");
}

#[test]
fn singular_matrix_is_reported() {
    let a = SparseMatrix::from_triplets(3, 3, vec![(0, 0, 1.0), (1, 1, 2.0)]);
    for method in [ConditionMethod::DenseExact, ConditionMethod::Iterative] {
        assert!(matches!(condition_number(&a, method), Err(Error::Singular(_))));
    }
    assert!(solve_sparse(&a, &[1.0, 1.0, 1.0]).is_err());
}

#[test]
fn gram_must_be_positive_definite() {
    let a = SparseMatrix::identity(2);
    let bad = SparseMatrix::from_diagonal(&[1.0, -1.0]);
    assert!(matches!(infsup_constant(&a, &bad, &a), Err(Error::NotPositiveDefinite(_))));
    let diag = SparseMatrix::from_diagonal(&[2.0, 1.0]);
    assert!((infsup_constant(&diag, &a, &a).unwrap() - 1.0).abs() < 1e-14);
}

/// `N^{-1/2}` through the symmetric eigendecomposition.
fn inverse_sqrt(n: &Mat<f64>) -> Mat<f64> {
    let evd = n.self_adjoint_eigen(Side::Lower).unwrap();
    let u = evd.U();
    let s = evd.S().column_vector();
    let dim = n.nrows();
    Mat::from_fn(dim, dim, |i, j| (0..dim).map(|k| u[(i, k)] * u[(j, k)] / s[k].sqrt()).sum())
}

#[test]
fn infsup_matches_dense_svd_oracle() {
    let cfg = SchemeConfig::new(Problem::UniqueContinuation, Variant::Regularized, 1, DualSpace::Lagrange(2));
    let scheme = build_system(&cfg, mesh_for(Problem::UniqueContinuation, 8)).unwrap();
    let n = triple_norm_gram(&scheme).unwrap();
    let a = scheme.system.matrix();
    let r = inverse_sqrt(&n.to_dense());
    let m = &r * a.to_dense() * &r;
    let sv = m.singular_values().unwrap();
    let oracle = sv.iter().cloned().fold(f64::MAX, f64::min);
    let dense = infsup_dense(&a, &n, &n).unwrap();
    let lanczos = infsup_lanczos(&a, &n, &n).unwrap();
    assert!((dense / oracle - 1.0).abs() < 1e-6, "{dense} vs {oracle}");
    assert!((lanczos / oracle - 1.0).abs() < 1e-4, "{lanczos} vs {oracle}");
}
