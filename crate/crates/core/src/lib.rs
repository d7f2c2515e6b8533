//! A logic engine for fuzzy models and parameterised tolerant consequence.

pub mod syntax;
pub mod semantics;
pub mod parameter;
pub mod calculus;
pub mod consequence;
pub mod corpus;
