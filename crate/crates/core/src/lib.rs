//! Spectral solver for an even-order equation with a Caputo derivative of
//! order α ∈ (0,1) above the interface y = 0 and order β ∈ (1,2) below it,
//! glued by continuity and flux conditions and closed by the nonlocal datum
//! `u(x, b) − u(x, −a) = φ(x)`.
//!
//! The crate provides:
//!
//! * [`mittag_leffler`]: error-bounded evaluation of `E_{μ,η}` on the real axis,
//!   its large-argument expansion and its real zeros;
//! * [`spectral_basis`]: eigenpairs of `(−1)^s X^{(2s)} + p₀X = λX` with
//!   Dirichlet-type end conditions, Fourier coefficients and checks on them;
//! * [`mode_solver`]: per-mode closed-form solutions, the uniqueness
//!   determinant Δ(k), series assembly and the degenerate case;
//! * [`caputo_oracle`]: finite-difference Caputo operators and time steppers
//!   used to validate the closed forms independently;
//! * [`config`] and [`verify`]: the JSON problem description and the
//!   verification report used by the command-line tool.

pub mod caputo_oracle;
pub mod config;
pub mod error;
pub mod grid;
pub mod mittag_leffler;
pub mod mode_solver;
pub mod roots;
pub mod spectral_basis;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use mittag_leffler::{ml_eval, MLQuery, MLResult, Method, MittagLeffler};


pub use mode_solver::{FieldSolution, ModeSolution, ProblemConfig, UniquenessReport};
pub use spectral_basis::{EigenPair, Phi, Potential, SourceData};
