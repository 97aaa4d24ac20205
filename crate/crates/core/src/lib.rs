//! Exact solver for l0-regularized least squares
//!
//! ```text
//! min_x  ½‖y − Ax‖² + λ‖x‖₀
//! ```
//!
//! The solver is a depth-first branch-and-bound over support decisions. Each
//! node is bounded by an interval relaxation of the l0 term over a box
//! `[l, u]` (the Big-M constraint), solved by coordinate descent. While the
//! relaxation runs, Fenchel-dual certificates are used to *peel* the box:
//! coordinate bounds are tightened whenever the removed slab provably holds
//! no point beating the incumbent. Peeled boxes are inherited by children, so
//! relaxations get tighter as the tree deepens.
//!
//! Modules:
//!
//! - [`instance`]: problem data, synthetic generation, Big-M calibration, file I/O
//! - [`relax`]: node relaxation and its coordinate-descent solver
//! - [`dual`]: dual objective and the conjugates it is built from
//! - [`peel`]: per-coordinate peeling tests and their parallel application
//! - [`bnb`]: the tree search
//! - [`oracle`]: brute-force reference solvers
//! - [`sweep`]: experiment harness writing CSV

// `!(x > 0.0)` style checks are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bnb;
pub mod dual;
mod error;
pub mod instance;
mod linalg;
pub mod oracle;
pub mod peel;
pub mod relax;
pub mod sweep;

pub use bnb::{solve, SolveReport, SolverConfig, Termination};
pub use error::{Error, Result};
pub use instance::{BoxBounds, ProblemInstance};
pub use relax::{Fixing, NodePartition};
