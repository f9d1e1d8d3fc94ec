//! Statevector toolkit for Chebyshev-basis quantum models: polynomial and
//! node-grid math, the Chebyshev feature map and transform circuits,
//! analytic derivative operators, and a small trainable generative model
//! with computational-basis sampling.

pub mod chebmath;
pub mod dqgm;
pub mod encodings;
pub mod error;
pub mod qcht;
pub mod simcore;

pub use error::{Error, Result};
