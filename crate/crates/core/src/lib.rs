//! Process-theory toolkit: transition systems, their composition, process
//! expressions, recursive specifications, nets and equivalence checking.

pub mod compose;
pub mod equiv;
pub mod error;
pub mod expr;
pub mod hml;
pub mod lts;
pub mod models;
pub mod petri;
pub mod random;
pub mod recspec;

pub use compose::CommFn;
pub use error::{ComposeError, ExprError, LtsError, ModelError, NetError, SpecError, SyntaxError};
pub use lts::{Action, Lts, LtsBuilder, StateId, Trace, Transition};
