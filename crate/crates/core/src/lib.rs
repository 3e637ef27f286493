//! Exact computations on simplicial posets: f- and h-vectors, order-complex
//! homology and the Gorenstein* test, the face ring with its restriction
//! maps, and the localized index map used to certify the parity of facet
//! counts.

pub mod algebra;
pub mod face_ring;
pub mod generators;
pub mod homology;
pub mod index;
pub mod poset;

pub use poset::{ElementId, SimplicialPoset};
