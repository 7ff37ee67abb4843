//! State-to-function transition systems over semirings, with PEPA and IML
//! front-ends and a bisimulation minimizer.

pub mod futs;
pub mod gen;
pub mod iml;
pub mod pepa;
pub mod process;
pub mod semiring;
pub mod xcheck;

pub use futs::{
    brute_force_coarsest, coarsest_bisimulation, distinguish, is_bisimulation,
    is_quotient_homomorphism, quotient, Continuation, FutsError, FutsModel, Partition,
    RelationSchema, StateId, Witness,
};
pub use process::{Explored, ParseError, SemanticsError, DEFAULT_STATE_CAP};
pub use semiring::{FiniteSupportFn, Rational, Semiring, SemiringKind, SemiringValue};
