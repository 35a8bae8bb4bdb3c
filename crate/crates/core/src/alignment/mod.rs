//! Symbolic signaling plans and the receiver-side dimension structure.
//!
//! Coefficients are exact monomials in the channel gains, so which symbols
//! align at a receiver is decided algebraically and never by comparing
//! sampled floats.

mod monomial;
mod plan;

pub use monomial::{GainSymbol, Monomial};
pub use plan::{
    alignment_violations, build_plan, build_plan_with_delta, dimension_census, expected_dims, receiver_space,
    Dimension, ReceiverSpace, SignalingPlan, SymbolId, Term, COINCIDENCE_GAP,
};
