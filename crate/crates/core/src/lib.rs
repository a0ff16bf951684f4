//! Numerical differential geometry on loop groups: forms on loop-space charts, connections,
//! Higgs fields and their holonomy, path fibrations, and central-extension bundle gerbes.

pub mod caloron;
pub mod centralext;
pub mod coefficient;
pub mod connections;
pub mod combinatorics;
pub mod error;
pub mod formscalc;
pub mod liecore;
pub mod loopspace;
pub mod pathfibration;
pub mod sampling;

pub use error::{Error, Result};
