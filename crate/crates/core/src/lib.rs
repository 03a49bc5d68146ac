//! Mixed quasi-reversibility finite elements for ill-posed Poisson problems.
//!
//! The crate discretizes the unique continuation problem (data on an interior
//! subdomain ω) and the elliptic Cauchy problem (Dirichlet and Neumann data on
//! a boundary part Γ0) on the unit square. Both are written as symmetric
//! indefinite saddle-point systems
//!
//! ```text
//! [ εM_H1 + D    Bᵀ    ] [u]   [g]
//! [ B         −γ²S     ] [λ] = [l]
//! ```
//!
//! where the primal space is a conforming Lagrange space and the dual
//! (multiplier) space is chosen so that the pair is inf-sup stable in the
//! residual-type triple norm: `P_k`–`P_{k+1}` conforming pairs, or `P1`–`CR1`
//! without any Tikhonov term.
//!
//! # Layout
//!
//! - [`mesh`]: structured triangulations with boundary and region tags
//! - [`quadrature`]: triangle and Gauss–Legendre edge rules
//! - [`fe_space`]: Lagrange `P_k` (k ≤ 4) and Crouzeix–Raviart `CR1` spaces
//! - [`assembly`]: sparse bilinear forms and load vectors
//! - [`linalg`]: direct solves, condition numbers and inf-sup constants
//! - [`schemes`]: the discrete systems and their parameter couplings
//! - [`analysis`]: error norms, triple norms, discrete dual norms, rate fits
//! - [`experiments`]: the numerical studies, emitting CSV tables
//!
//! Element and facet loops run on rayon when the `parallel` feature is on
//! (the default); [`Execution::Sequential`] gives the same bits on one thread.
//!
//! # Example
//!
//! ```no_run
//! use std::sync::Arc;
//! use quasirev::mesh::{SquareSide, TriangleMesh};
//! use quasirev::schemes::{build_system, SchemeConfig};
//!
//! let mesh = TriangleMesh::structured(16, 16)?
//!     .tag_boundary(&[SquareSide::Left, SquareSide::Bottom]);
//! let scheme = build_system(&SchemeConfig::hadamard_cauchy(1, 2, 1), Arc::new(mesh))?;
//! let solution = scheme.solve()?;
//! println!("{} primal dofs", solution.u.coefficients().len());
//! # Ok::<(), quasirev::Error>(())
//! ```

pub mod analysis;
pub mod assembly;
mod error;
pub mod experiments;
pub mod fe_space;
pub mod linalg;
pub mod mesh;
mod parallel;
pub mod quadrature;
pub mod schemes;

pub use error::{Error, Result};
pub use parallel::Execution;
