//! Quadruples of torsion points of elliptic curves whose cross ratio is
//! independent of the curve.

pub mod classifier;
pub mod curve_forms;
pub mod cyclo;
pub mod error;
pub mod goodness;
pub mod identities;
pub mod level;
pub mod modular_groups;
pub mod numeric;
pub mod qseries;
pub mod rat;
pub mod roots;
pub mod series;
pub mod sl2;
pub mod torsion;

pub use error::{Error, Result};
pub use rat::Rat;
pub use sl2::{Mat2, Mat2ModN, SubgroupModN};
pub use torsion::{Quad, TorsionCoord};
