//! Computations in presheaf toposes `Set^(C^op)` over finite base categories.

pub mod builtins;
pub mod corpus;
pub mod decidable;
pub mod error;
pub mod fincat;
pub mod harness;
pub mod forcing;
pub mod format;
pub mod limits;
pub mod precohesion;
pub mod presheaf;
pub mod search;
pub mod sublattice;

pub use error::{Error, Result};
pub use fincat::{FinCategory, MorId, ObjId};
pub use presheaf::{NatTrans, Presheaf};
pub use sublattice::Subobject;
