//! Constructive toolkit for Hamiltonian circles in prisms of locally finite graphs.
//!
//! The crate builds faithful spanning subgraphs (2-connected bipartite,
//! cactus, semi-cactus) on finite truncations of generator graphs, produces
//! explicit Hamiltonian cycles in prisms of even cacti and semi-cacti, and
//! emits self-contained certificates that can be re-checked without any of
//! the construction code.

pub mod bipartite;
pub mod cactus;
pub mod cert;
pub mod error;
pub mod flow;
pub mod graph;
pub mod infinite;
pub mod io;
pub mod named;
pub mod prism;
pub mod search;
pub mod linegraph;
pub mod square;
pub mod structure;

pub use error::{Error, Result};
pub use graph::Multigraph;
