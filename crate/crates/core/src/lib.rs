//! Newton's method with deflation for isolated singular roots of polynomial
//! systems.
//!
//! At a singular root the Jacobian loses rank and Newton's method slows to
//! linear convergence. Each deflation stage appends the equations
//! `A(x) B lambda = 0` and `<h, lambda> = 1` for random `B`, `h` and new
//! unknowns `lambda`; the root lifts to a root of the larger system whose
//! multiplicity is strictly lower. Repeating until the Jacobian has full
//! column rank restores quadratic convergence.
//!
//! ```
//! use deflation::{deflate_loop, fixtures, C64, DeflateOptions, LoopStatus};
//!
//! let f = fixtures::cbms1();
//! let x0 = [C64::new(1e-3, 0.0), C64::new(-5e-4, 2e-4), C64::new(3e-4, 0.0)];
//! let out = deflate_loop(&f, &x0, &DeflateOptions::default()).unwrap();
//! assert_eq!(out.status, LoopStatus::ConvergedRegular);
//! assert_eq!(out.coranks, vec![3, 0]);
//! ```

pub mod batch;
pub mod deflate;
pub mod error;
pub mod fixtures;
pub(crate) mod jet;
pub mod linalg;
pub mod newton;
pub mod oracle;
pub mod polysys;
pub mod report;

pub use deflate::{
    deflate_loop, deflate_once, DeflateOptions, DeflatedSystem, DeflationOutcome, LoopStatus,
};
pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use newton::{refine, Evaluator, NewtonOptions, RefineStatus};
pub use oracle::{multiplicity, Multiplicity};
pub use polysys::{parse_system, PolySystem, Polynomial};
pub use report::SolverReport;
