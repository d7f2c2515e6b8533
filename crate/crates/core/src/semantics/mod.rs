//! Truth values, finite models, evaluation, crispification and model
//! enumeration.
//!
//! Domains are finite, so the glb/lub quantifier clauses reduce to min/max.

mod crisp;
mod enumerate;
mod eval;
mod model;
mod value;

pub use crisp::{crispify, AtomCell};
pub use enumerate::{
    blank_model, element_names, enumerate_models, signature_cells, CellOdometer, ConstantMapping,
};
pub use eval::{eval, eval_atom, eval_closed, Assignment, EvalError};
pub use model::{Element, Model, ModelBuilder, ModelError, Table};
pub use value::{TruthValue, ValueError, ValueSet};
