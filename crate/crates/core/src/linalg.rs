//! Direct solves, condition numbers and inf-sup constants.
//!
//! Factorizations run single-threaded; independent systems are parallelized
//! one level up, in the experiment sweeps.

use std::sync::Once;

use faer::linalg::triangular_solve::solve_lower_triangular_in_place;
use faer::linalg::solvers::Solve;
use faer::{Mat, Par, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{dot, SparseMatrix};
use crate::{Error, Result};

/// Largest dimension handled by dense eigenvalue and singular value routines.
pub const DENSE_LIMIT: usize = 2000;

const LANCZOS_MAX_STEPS: usize = 400;
const LANCZOS_TOL: f64 = 1e-10;
const LANCZOS_SEED: u64 = 0x5eed;

fn init() {
    static ONCE: Once = Once::new();
    ONCE.call_once(|| faer::set_global_parallelism(Par::Seq));
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// The 2×2 block saddle-point system
/// `[[A11, A12], [A21, A22]] [u; λ] = [rhs_primal; rhs_dual]`.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub a11: SparseMatrix,
    pub a12: SparseMatrix,
    pub a21: SparseMatrix,
    pub a22: SparseMatrix,
    pub rhs_primal: Vec<f64>,
    pub rhs_dual: Vec<f64>,
}

impl BlockSystem {
    /// Builds the system from `A11`, the coupling `B = A21` (rows on the dual
    /// space) and `A22`; `A12` is set to `Bᵀ`.
    pub fn new(
        a11: SparseMatrix,
        b: SparseMatrix,
        a22: SparseMatrix,
        rhs_primal: Vec<f64>,
        rhs_dual: Vec<f64>,
    ) -> Result<Self> {
        let (np, nd) = (a11.nrows(), a22.nrows());
        let ok = a11.ncols() == np
            && a22.ncols() == nd
            && b.nrows() == nd
            && b.ncols() == np
            && rhs_primal.len() == np
            && rhs_dual.len() == nd;
        if !ok {
            return Err(Error::InvalidArgument("inconsistent block dimensions".into()));
        }
        Ok(BlockSystem {
            a11,
            a12: b.transpose(),
            a21: b,
            a22,
            rhs_primal,
            rhs_dual,
        })
    }

    pub fn primal_dim(&self) -> usize {
        self.a11.nrows()
    }

    pub fn dual_dim(&self) -> usize {
        self.a22.nrows()
    }

    pub fn dim(&self) -> usize {
        self.primal_dim() + self.dual_dim()
    }

    pub fn matrix(&self) -> SparseMatrix {
        SparseMatrix::block2x2(&self.a11, &self.a12, &self.a21, &self.a22)
            .expect("block dimensions checked on construction")
    }

    pub fn rhs(&self) -> Vec<f64> {
        let mut b = self.rhs_primal.clone();
        b.extend_from_slice(&self.rhs_dual);
        b
    }
}

/// Sparse LU factorization with partial pivoting.
pub struct SparseLu {
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    n: usize,
}

impl SparseLu {
    pub fn new(a: &SparseMatrix) -> Result<Self> {
        init();
        if a.nrows() != a.ncols() {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        let lu = a
            .to_faer()?
            .sp_lu()
            .map_err(|e| Error::Singular(format!("{e:?}")))?;
        Ok(SparseLu { lu, n: a.nrows() })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = Mat::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_in_place(x.as_mut());
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let mut x = Mat::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_transpose_in_place(x.as_mut());
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }
}

/// Sparse Cholesky factorization of a symmetric positive definite matrix.
pub struct SparseCholesky {
    llt: faer::sparse::linalg::solvers::Llt<usize, f64>,
    n: usize,
}

impl SparseCholesky {
    pub fn new(a: &SparseMatrix) -> Result<Self> {
        init();
        check_symmetric(a)?;
        let llt = a
            .to_faer()?
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::NotPositiveDefinite(format!("{e:?}")))?;
        Ok(SparseCholesky { llt, n: a.nrows() })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = Mat::from_fn(self.n, 1, |i, _| b[i]);
        self.llt.solve_in_place(x.as_mut());
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }
}

fn check_symmetric(a: &SparseMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotPositiveDefinite("matrix is not square".into()));
    }
    if a.asymmetry() > 1e-12 * a.max_abs().max(1.0) {
        return Err(Error::NotPositiveDefinite("matrix is not symmetric".into()));
    }
    Ok(())
}

/// Solves `A x = b` by sparse LU with a few steps of iterative refinement,
/// failing unless `‖b − A x‖ ≤ 1e-10 (1 + ‖b‖)`.
pub fn solve_sparse(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let lu = SparseLu::new(a)?;
    let mut x = lu.solve(b);
    let tol = 1e-10 * (1.0 + norm(b));
    let mut res = 0.0;
    for _ in 0..4 {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular("factorization produced non-finite values".into()));
        }
        let ax = a.mul_vec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
        res = norm(&r);
        if res <= tol {
            return Ok(x);
        }
        for (xi, di) in x.iter_mut().zip(lu.solve(&r)) {
            *xi += di;
        }
    }
    Err(Error::Numerical(format!(
        "residual {res:.3e} above tolerance {tol:.3e}"
    )))
}

/// Solves the saddle-point system, returning primal and dual coefficients.
pub fn solve_direct(system: &BlockSystem) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut x = solve_sparse(&system.matrix(), &system.rhs())?;
    let dual = x.split_off(system.primal_dim());
    Ok((x, dual))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionMethod {
    /// All singular values of the dense matrix; limited to [`DENSE_LIMIT`].
    DenseExact,
    /// Lanczos on `AᵀA` for `σ_max` and on `(AᵀA)⁻¹` through the sparse LU
    /// for `σ_min`.
    Iterative,
}

/// Euclidean condition number `σ_max / σ_min`.
pub fn condition_number(a: &SparseMatrix, method: ConditionMethod) -> Result<f64> {
    init();
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::InvalidArgument("matrix is not square".into()));
    }
    let n = a.nrows();
    let (smax, smin) = match method {
        ConditionMethod::DenseExact => {
            if n > DENSE_LIMIT {
                return Err(Error::InvalidArgument(format!(
                    "dense condition number limited to {DENSE_LIMIT} unknowns, got {n}"
                )));
            }
            let s = dense_singular_values(&a.to_dense())?;
            (s[0], *s.last().unwrap())
        }
        ConditionMethod::Iterative => {
            let at = a.transpose();
            let big = lanczos_max(n, |x| at.mul_vec(&a.mul_vec(x)), dot)?;
            let lu = SparseLu::new(a)?;
            let inv = lanczos_max(n, |x| lu.solve(&lu.solve_transpose(x)), dot)?;
            if !inv.is_finite() || inv <= 0.0 {
                return Err(Error::Singular("inverse iteration diverged".into()));
            }
            (big.sqrt(), 1.0 / inv.sqrt())
        }
    };
    if !(smin > smax * f64::EPSILON) {
        return Err(Error::Singular(format!(
            "smallest singular value {smin:.3e} vs largest {smax:.3e}"
        )));
    }
    Ok(smax / smin)
}

/// Singular values in nonincreasing order.
pub fn dense_singular_values(a: &Mat<f64>) -> Result<Vec<f64>> {
    init();
    a.singular_values()
        .map_err(|e| Error::Numerical(format!("singular value decomposition: {e:?}")))
}

fn dense_cholesky_factor(n: &Mat<f64>) -> Result<Mat<f64>> {
    let llt = n
        .llt(Side::Lower)
        .map_err(|e| Error::NotPositiveDefinite(format!("{e:?}")))?;
    Ok(llt.L().to_owned())
}

/// Smallest generalized singular value of `A` with respect to the Gram
/// matrices of the trial and test norms:
/// `min_x max_y yᵀAx / (‖x‖_{N_trial} ‖y‖_{N_test})`.
///
/// Dense up to [`DENSE_LIMIT`] unknowns, Lanczos beyond.
pub fn infsup_constant(a: &SparseMatrix, n_trial: &SparseMatrix, n_test: &SparseMatrix) -> Result<f64> {
    if a.nrows().max(a.ncols()) <= DENSE_LIMIT {
        infsup_dense(a, n_trial, n_test)
    } else {
        infsup_lanczos(a, n_trial, n_test)
    }
}

fn check_infsup_dims(a: &SparseMatrix, n_trial: &SparseMatrix, n_test: &SparseMatrix) -> Result<()> {
    if n_trial.nrows() != a.ncols() || n_test.nrows() != a.nrows() {
        return Err(Error::InvalidArgument("Gram matrix dimensions do not match".into()));
    }
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidArgument("operator must be square".into()));
    }
    check_symmetric(n_trial)?;
    check_symmetric(n_test)
}

/// `σ_min(L_test⁻¹ A L_trial⁻ᵀ)` with Cholesky factors `N = L Lᵀ`.
pub fn infsup_dense(a: &SparseMatrix, n_trial: &SparseMatrix, n_test: &SparseMatrix) -> Result<f64> {
    init();
    check_infsup_dims(a, n_trial, n_test)?;
    let l_test = dense_cholesky_factor(&n_test.to_dense())?;
    let l_trial = dense_cholesky_factor(&n_trial.to_dense())?;
    let mut x = a.to_dense();
    solve_lower_triangular_in_place(l_test.as_ref(), x.as_mut(), Par::Seq);
    let mut m = x.transpose().to_owned();
    solve_lower_triangular_in_place(l_trial.as_ref(), m.as_mut(), Par::Seq);
    let s = dense_singular_values(&m)?;
    Ok(*s.last().unwrap())
}

/// Lanczos on `T = A⁻¹ N_test A⁻ᵀ N_trial`, self-adjoint in the `N_trial`
/// inner product with largest eigenvalue `1 / σ_min²`.
pub fn infsup_lanczos(a: &SparseMatrix, n_trial: &SparseMatrix, n_test: &SparseMatrix) -> Result<f64> {
    check_infsup_dims(a, n_trial, n_test)?;
    SparseCholesky::new(n_trial)?;
    SparseCholesky::new(n_test)?;
    let lu = SparseLu::new(a)?;
    let apply = |x: &[f64]| lu.solve(&n_test.mul_vec(&lu.solve_transpose(&n_trial.mul_vec(x))));
    let inner = |x: &[f64], y: &[f64]| n_trial.bilinear(x, y);
    let mu = lanczos_max(a.ncols(), apply, inner)?;
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::Singular("operator is singular".into()));
    }
    Ok(1.0 / mu.sqrt())
}

/// Largest eigenvalue of an operator that is self-adjoint and positive
/// semidefinite in the inner product `inner`, by Lanczos with full
/// reorthogonalization from a fixed pseudo-random start.
pub fn lanczos_max<F, G>(n: usize, mut apply: F, inner: G) -> Result<f64>
where
    F: FnMut(&[f64]) -> Vec<f64>,
    G: Fn(&[f64], &[f64]) -> f64,
{
    init();
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let q_norm = inner(&q, &q).sqrt();
    if !(q_norm > 0.0) {
        return Err(Error::NotPositiveDefinite("inner product is degenerate".into()));
    }
    q.iter_mut().for_each(|v| *v /= q_norm);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last = f64::NAN;
    let steps = LANCZOS_MAX_STEPS.min(n);
    for k in 0..steps {
        let mut w = apply(&q);
        let a = inner(&w, &q);
        basis.push(q);
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = inner(&w, b);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
            }
        }
        let b = inner(&w, &w).max(0.0).sqrt();
        let ritz = tridiagonal_max(&alpha, &beta)?;
        let converged = (ritz - last).abs() <= LANCZOS_TOL * ritz.abs();
        if converged || b <= 1e-14 * ritz.abs().max(f64::MIN_POSITIVE) || k + 1 == steps {
            return Ok(ritz);
        }
        last = ritz;
        beta.push(b);
        q = w.into_iter().map(|v| v / b).collect();
    }
    Ok(last)
}

fn tridiagonal_max(alpha: &[f64], beta: &[f64]) -> Result<f64> {
    let k = alpha.len();
    let t = Mat::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let ev = t
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("tridiagonal eigenvalues: {e:?}")))?;
    Ok(*ev.last().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_block_system() {
        let sys = BlockSystem::new(
            SparseMatrix::identity(2),
            SparseMatrix::zeros(1, 2),
            SparseMatrix::identity(1),
            vec![1.0, 0.0],
            vec![0.0],
        )
        .unwrap();
        let (u, l) = solve_direct(&sys).unwrap();
        assert_eq!(u, vec![1.0, 0.0]);
        assert_eq!(l, vec![0.0]);
    }

    #[test]
    fn trivial_condition_numbers() {
        for method in [ConditionMethod::DenseExact, ConditionMethod::Iterative] {
            let k = condition_number(&SparseMatrix::identity(3), method).unwrap();
            assert!((k - 1.0).abs() < 1e-12);
            let k = condition_number(&SparseMatrix::from_diagonal(&[1.0, 10.0]), method).unwrap();
            assert!((k - 10.0).abs() < 1e-9, "{k}");
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = SparseMatrix::from_diagonal(&[1.0, 0.0]);
        let err = condition_number(&a, ConditionMethod::DenseExact).unwrap_err();
        assert!(matches!(err, Error::Singular(_)));
        assert!(solve_sparse(&a, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn trivial_infsup() {
        let i = SparseMatrix::identity(2);
        assert!((infsup_constant(&i, &i, &i).unwrap() - 1.0).abs() < 1e-12);
        let a = SparseMatrix::from_diagonal(&[2.0, 1.0]);
        assert!((infsup_dense(&a, &i, &i).unwrap() - 1.0).abs() < 1e-12);
        assert!((infsup_lanczos(&a, &i, &i).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infsup_rejects_indefinite_gram() {
        let i = SparseMatrix::identity(2);
        let bad = SparseMatrix::from_diagonal(&[1.0, -1.0]);
        assert!(matches!(
            infsup_dense(&i, &bad, &i),
            Err(Error::NotPositiveDefinite(_))
        ));
        assert!(matches!(
            infsup_lanczos(&i, &i, &bad),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn weighted_infsup_matches_dense() {
        let a = SparseMatrix::from_triplets(
            3,
            3,
            vec![(0, 0, 2.0), (0, 1, 1.0), (1, 1, 3.0), (2, 0, 0.5), (2, 2, 1.0)],
        );
        let n1 = SparseMatrix::from_triplets(
            3,
            3,
            vec![(0, 0, 2.0), (0, 1, 0.5), (1, 0, 0.5), (1, 1, 1.0), (2, 2, 4.0)],
        );
        let n2 = SparseMatrix::from_diagonal(&[1.0, 2.0, 0.5]);
        let d = infsup_dense(&a, &n1, &n2).unwrap();
        let l = infsup_lanczos(&a, &n1, &n2).unwrap();
        assert!((d - l).abs() < 1e-8 * d, "{d} vs {l}");
    }
}
