//! Blocking sets obtained by field reduction, and semifields with their
//! spread sets and linear sets.

pub mod blocking;
pub mod semifield;

pub use blocking::{
    conic, cone_blocking_set, is_blocking, is_semioval, linear_blocking_set, subplane,
    tangent_counts, BlockingReport, ConeBlockingSet, LinearBlockingSet, PointSetInstance, Role,
};
pub use semifield::{
    check_semifield, semifield_spread, Nuclei, SemifieldReport, SemifieldSpreadSet, SemifieldTable,
    Substructure,
};
