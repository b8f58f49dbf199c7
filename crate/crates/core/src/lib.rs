//! Graphs of graphs and the machinery to build and check them: Serre graphs
//! and their morphisms, Stallings subgroup graphs, finite cyclic covers of
//! 2-complexes, the three cleanliness predicates for graphs of free groups,
//! and the `A(2,n,∞)` pipeline producing the Θₙ family.

pub mod complex;
pub mod constructions;
pub mod dot;
pub mod error;
pub mod gog;
pub mod graph;
pub mod io;
pub mod iso;
pub mod snf;
pub mod stallings;
pub mod whitehead;
pub mod word;

pub use error::{Error, Result};
