//! Rewriting toolkit for Kan extensions of category actions, normal-form
//! automata, reduction machines, noncommutative Gröbner bases and
//! identities among relations.

pub mod automata;
pub mod idrel;
pub mod kan;
pub mod machines;
pub mod ncpoly;
pub mod presentations;
