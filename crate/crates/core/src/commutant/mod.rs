//! Commutants, conditional expectations and averaging at finite dimension.

mod algebra;
mod monomial;
mod pipeline;

pub use algebra::{
    algebra_closure, averaging_expectation, commutant, commutant_of, conditional_expectation, orthogonality_check,
    relative_commutant, SubalgebraBasis, COMMUTANT_CAPACITY,
};
pub use monomial::{monomial_commutant, monomial_commutant_with_capacity, MonomialCommutant, MONOMIAL_COMMUTANT_CAPACITY};
pub use pipeline::{
    averaging_pipeline, check_r_step, check_slot_averaging, monomial_inner, project_monomials, r_degree, s_at_level,
    select_level, tail_unitary, tensor_a_basis, truncated_relative_commutant, AveragingStep, PipelineOutcome, StepKind,
};
