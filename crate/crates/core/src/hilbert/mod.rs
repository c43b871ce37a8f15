//! Hilbert systems: schema matching, derivation checking and the
//! constructive transformations on derivations.

mod builder;
mod deduction;
mod derivation;
mod internalize;
mod schema;
mod taut;

pub use builder::{Builder, Lemma, NamePool};
pub use deduction::{deduction, discharge_in, DeductionError};
pub use derivation::{
    check_derivation, check_derivation_with, validate_cs, CheckError, CheckOptions, ConstantSpec,
    CsError, CsMode, Derivation, Justification, Line, LineError, Verdict,
};
pub use internalize::{internalize, v_lift, Internalized, LiftError, LiftItem, Lifted};
pub use schema::{all_matches, match_axiom, Bindings, Schema, SystemId};
pub use taut::NotTautology;
