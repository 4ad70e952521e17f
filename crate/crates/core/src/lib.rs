//! Decision procedures for Diophantine satisfiability over Robinson
//! arithmetic `Q` and its strengthening `Q+` (`Q` plus `0*x = 0`).
//!
//! The pipeline:
//!
//! 1. [`decide::blackhole_reduce`] evaluates both sides of `t = u` in the
//!    black-hole model `N ∪ {∞}`. Either both sides are `∞` (satisfiable
//!    outright), both are numerals, or the problem becomes `t = n`.
//! 2. For `Q+`, [`decide::sol_qplus`] decomposes `t = n` top-down.
//! 3. For `Q`, [`decide::search_witness`] looks for a labelling of the
//!    subterm occurrences of `t` that satisfies the witness conditions. The
//!    reduced forms needed by those conditions are computed succinctly with
//!    [`descriptor`]s, so checking a witness takes polynomial time.
//! 4. Every SAT answer carries a [`decide::Certificate`] that
//!    [`decide::verify_certificate`] re-checks independently: a model over
//!    reduced terms ([`models::reduced_model_eval`]) must satisfy the
//!    equations of the witness.
//!
//! [`rewrite`] implements the rewriting system whose normal forms are the
//! reduced terms, and [`models`] the executable models used for checking.

pub mod decide;
pub mod descriptor;
pub mod interchange;
pub mod models;
pub mod parse;
pub mod rewrite;
pub mod term;

pub use decide::{decide_positive_existential, decide_q, decide_qplus, Verdict};
pub use descriptor::Descriptor;
pub use parse::{parse_equation, parse_formula, parse_term, ParseError};
pub use rewrite::{rtn_normalize, ReducedSystem};
pub use term::{bnum, unum, Equation, Path, Step, Term, VarId, VarTable};

/// Resource limits. Exceeding any of them is reported as an error, never as
/// an answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Rule applications allowed in one normalization.
    pub rewrite_steps: u64,
    /// Nodes allowed in a materialized term (unary numerals, normal forms,
    /// model values).
    pub term_nodes: u64,
    /// Nodes allowed when expanding a descriptor into a term.
    pub expand_nodes: u64,
    /// Search-tree nodes allowed in witness search and in `sol`.
    pub search_nodes: u64,
    /// Conjuncts allowed in a disjunctive normal form.
    pub dnf_conjuncts: usize,
    /// Assignments the brute-force oracle may enumerate.
    pub oracle_assignments: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            rewrite_steps: 1_000_000,
            term_nodes: 10_000_000,
            expand_nodes: 1_000_000,
            search_nodes: 10_000_000,
            dnf_conjuncts: 4096,
            oracle_assignments: 10_000_000,
        }
    }
}
