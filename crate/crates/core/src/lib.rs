//! Randers metrics of constant flag curvature built by Zermelo navigation on
//! the sphere, Euclidean space and hyperbolic space.

pub mod catalog;
pub mod classifier;
pub mod error;
pub mod finsler;
pub mod geodesics;
pub mod navigation;
pub mod normal_forms;
pub mod numerics;
pub mod sampling;
pub mod spaceforms;
pub mod winds;

pub use error::{Error, Result};
