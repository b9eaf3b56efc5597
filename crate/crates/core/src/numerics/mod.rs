//! Numerical substrate: jets, finite differences and dense linear algebra.

pub mod fd;
pub mod jet;
pub mod linalg;

pub use fd::{central_fd, fd_hessians, fd_jacobian, FdDerivative, FdOrder, DEFAULT_FD_STEP};
pub use jet::{dot, jet2_eval, Jet2, Real};
pub use linalg::{skew_eigen, spd_check, tol_eig, SkewPairing};
