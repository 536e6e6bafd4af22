//! CNF formulas and the solvers that consume them.

mod cnf;
mod complete;
mod dimacs;
mod local;

pub use cnf::{var_of, Assignment, Cnf, Lit};
pub use complete::{solve_complete, CompleteOutcome};
pub use dimacs::{export_assignment, export_dimacs, import_assignment, parse_dimacs};
pub use local::{
    solve_local_search, solve_local_search_parallel, solve_local_search_with, LocalOutcome,
    LocalSearchParams, NeighborRelation, Progress, SearchControl, SearchState,
};
