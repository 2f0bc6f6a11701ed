//! Numerical analysis of a May–Holling–Tanner predator-prey model whose prey
//! growth carries multiple Allee effects.

pub mod atlas;
pub mod basins;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod export;
pub mod integrator;
pub mod linalg;
pub mod manifolds;
pub mod model;
pub mod sampling;

pub use error::{Error, Result};
