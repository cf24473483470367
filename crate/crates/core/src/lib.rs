//! Exact finite geometry over GF(q): field reduction, Desarguesian spreads,
//! Segre varieties, linear sets, polar spaces, blocking sets and semifields.

pub mod applications;
pub mod error;
pub mod gf;
pub mod harness;
pub mod linalg;
pub mod linset;
pub mod polar;
pub mod projspace;
pub mod reduction;

pub use error::{Error, Result};
pub use gf::{Field, FieldElement, FieldTower};
pub use projspace::{PointCodec, ProjSubspace, SemilinearMap};
