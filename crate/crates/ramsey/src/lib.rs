//! A workbench for computing Ramsey numbers of three kinds: ordered Ramsey
//! numbers of ordered graphs under 2-edge-colorings, canonical (Erdős–Rado)
//! Ramsey numbers of ordered graphs under colorings with arbitrarily many
//! colors, and unordered canonical Ramsey numbers forbidding an orderable
//! copy of one graph and a rainbow copy of another.
//!
//! Lower bounds come from explicit witness colorings (complete enumeration,
//! tabu search, or a DFS decision procedure for the 2-color ordered case).
//! Exact values and upper bounds come from exhaustion of the enumeration,
//! or from exported models: integer programs in LP/CNF text form and
//! flag-algebra semidefinite programs in sparse SDPA form, both handed to
//! external solvers.
//!
//! The crate is a library first; see `examples/` for one runnable example
//! per capability and `src/main.rs` for the thin batch CLI.

pub mod cli;
pub mod enumeration;
pub mod flags;
pub mod graphs;
pub mod heuristics;
pub mod ilp;
pub mod patterns;
pub mod problem;
pub mod report;

pub use graphs::{ColoredCompleteGraph, GraphPattern, Symmetry};
pub use problem::{ColorRegime, ProblemSpec, Variant};
