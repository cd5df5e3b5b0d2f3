//! Solvers for variational inequalities over the common fixed-point set of a
//! finite family of nonexpansive maps in `R^d`.
//!
//! Given nonexpansive maps `T_1, ..., T_N` with common fixed-point set `F`,
//! a contraction `f` with constant `alpha`, and a `k`-Lipschitz,
//! `eta`-strongly monotone operator `A`, the problem is to find `x' in F`
//! with
//!
//! ```text
//! <(gamma f - mu A) x', y - x'> <= 0   for all y in F.
//! ```
//!
//! The main driver ([`solver::run_explicit`]) runs the cyclic iteration
//!
//! ```text
//! x_{n+1} = alpha_n gamma f(x_n) + (I - alpha_n mu A) T_n x_n,   T_n = T_{n mod N}
//! ```
//!
//! and records per-step residuals. [`solver::run_halpern`] and
//! [`solver::specialize`] cover the classical single-operator schemes it
//! generalizes. The [`oracle`] module computes the same solution by an
//! unrelated route (projected fixed-point iteration with Dykstra projections)
//! so results can be cross-checked.
//!
//! ## Modules
//!
//! * [`hilbert`] -- dense vectors and the Euclidean inner product.
//! * [`operators`] -- projections and other nonexpansive maps, contractions,
//!   strongly monotone operators.
//! * [`schedules`] -- step sizes `alpha_n` and checks of their limit conditions.
//! * [`solver`] -- the explicit cyclic scheme, specializations, implicit path.
//! * [`oracle`] -- Dykstra projection and an independent VI solver.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod hilbert;
pub mod operators;
pub mod oracle;
pub mod sampling;
pub mod schedules;
pub mod solver;

pub use error::{Error, Result};
pub use hilbert::Vector;
pub use operators::{Contraction, MonotoneOperator, NonexpansiveOp};
pub use schedules::Schedule;
