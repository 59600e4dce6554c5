//! Explicit ReLU network constructions for approximating continuous functions
//! on the unit cube, together with the tooling to check them numerically.
//!
//! Every builder returns a plain [`ReluNetwork`]: a list of dense affine layers
//! with ReLU between them. Nothing is trained; all weights are computed.

pub mod approx;
pub mod bits;
pub mod cpwl;
pub mod error;
pub mod harness;
pub mod intmath;
pub mod network;
pub mod step;

pub use error::{Error, Result};
pub use network::{AffineLayer, NetworkStats, ReluNetwork};
