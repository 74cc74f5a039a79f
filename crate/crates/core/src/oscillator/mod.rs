//! The q-deformed oscillator on its position and momentum lattices.
mod algebra;
mod lattice;
mod literature;
mod model;

pub use algebra::*;
pub use lattice::*;
pub use literature::*;
pub use model::*;
