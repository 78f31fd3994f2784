//! Interpolation bounds for diluted mean-field spin systems on random
//! hypergraphs with a prescribed degree sequence.

pub mod bounds;
pub mod confgraph;
pub mod distributions;
pub mod error;
pub mod hardcore;
pub mod interpolate;
pub mod mc;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};
