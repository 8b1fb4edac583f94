//! Exact toric GIT quotients, prunings and Chow quotients of C*-actions on
//! lattice polytopes, and the blowup diagram relating them.

pub mod action;
pub mod dd;
pub mod examples;
pub mod exactnum;
pub mod fan;
pub mod polytope;
pub mod quotient;
pub mod report;
