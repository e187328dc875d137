//! Satisfiability checking and translations for standpoint linear
//! temporal logic (SLTL).
//!
//! * [`syntax`]: formulas, parser, normal forms, closure sets.
//! * [`semantics`]: evaluation over ultimately periodic models and a
//!   bounded satisfiability oracle.
//! * [`psl`]: complete satisfiability for propositional standpoint logic
//!   on normalised grid models.
//! * [`translate`]: formula-to-formula reductions and generators.
//! * [`automaton`]: on-the-fly generalised Büchi automaton for the
//!   LTL⊕PSL fragment.
//! * [`solver`]: the decision pipeline producing checkable witnesses.

pub mod automaton;
pub mod psl;
pub mod semantics;
pub mod solver;
pub mod syntax;
pub mod translate;

pub use syntax::{parse, Formula, Fragment, Standpoint};
