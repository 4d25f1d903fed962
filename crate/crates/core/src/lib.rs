//! Exact polyhedral-cone truncation calculus.

pub mod arith;
pub mod cones;
pub mod error;
pub mod fan;
pub mod indicator;
pub mod io;
pub mod linalg;
pub mod period;
pub mod roots;
pub mod transforms;

pub use arith::{RationalVector, Q};
pub use cones::{Cone, Face, Space, Subspace};
pub use error::{Error, Result};
