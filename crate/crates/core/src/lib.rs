// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod elastica;
pub mod error;
pub mod gravity;
pub mod kinematics;
pub mod numerics;
pub mod rupture;
pub mod shell;
pub mod surface;

pub use error::{Error, Result};
