//! Integer QUBO compilation for satisfiability and Hamiltonian-cycle
//! instances.
//!
//! The crate builds exact-integer QUBO matrices from affine-expression
//! penalties, compiles CNF formulas through binary satisfied-literal counters,
//! compiles graphs through per-edge position registers (with a one-hot
//! baseline for comparison), and ships desk-scale solvers plus independent
//! brute-force oracles so every produced matrix can be checked end to end.
//!
//! The crate is `no_std` with `alloc`; IO and file formats live in the
//! companion `qubo-tools` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod generators;
pub mod hc;
pub mod oracles;
pub mod qubo;
pub mod sat;
pub mod solvers;

pub use hc::{Graph, HcCompilation, OneHotCompilation, SizeReport};
pub use qubo::{AffineExpr, Label, QuboAccumulator, VarId, VariableRegistry};
pub use sat::{Clause, Formula, Literal, SatCompilation};
pub use solvers::{SaParams, SolveResult};
