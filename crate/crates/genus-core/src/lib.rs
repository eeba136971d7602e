//! Genus estimation and certified rotation-system embeddings for dense graphs.
//!
//! The crate is organised around a pipeline that takes a simple graph,
//! partitions it into quasirandom bipartite and tripartite pieces, packs
//! triangles fractionally on the quotient to predict the genus, and then
//! realises an embedding by matching short directed cycles into faces of a
//! rotation system.  Every stage exposes its intermediate artifacts (partition,
//! quotient, LP packing, cycle families, face census) so results can be
//! re-verified independently.
//!
//! The crate is `no_std` + `alloc`; IO, file formats and the CLI live in the
//! companion `genus-kit` crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod count;
pub mod cut;
pub mod decompose;
pub mod exact;
pub mod family;
pub mod graph;
pub mod hypergraph;
pub mod packing;
pub mod partition;
pub mod pipeline;
pub mod quotient;
pub mod rng;
pub mod rotation;
pub mod simplex;

pub use graph::{Digraph, Graph, GraphError};
pub use rotation::{FaceCensus, RotationSystem};
