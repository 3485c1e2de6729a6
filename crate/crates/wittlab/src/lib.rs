//! wittlab: exact decision procedures for diagonal forms over structured
//! fields — isotropy and universality through residue recursion and
//! local-global tests, p-basis linear algebra for rational function fields
//! in positive characteristic, mod-2 symbol calculus with iterated tame
//! residues, and genus bounds for elementary abelian covers of the line.
//!
//! Every decision path is exact (no floating point, no probabilistic
//! primality or factoring shortcuts) and the test suite cross-checks each
//! procedure against an independent oracle.

pub mod error;
pub mod fields;
pub mod linalg;
pub mod milnor;
pub mod pbasis;
pub mod pfister;
pub mod quadform;

pub use error::{Error, Result};
pub use fields::{make_field, FieldDescriptor, FieldElement};
