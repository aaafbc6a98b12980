//! Exhaustive verification of the `p3109` model: brute-force oracles for
//! the value set and the rounding grid, and suites that check every
//! structural claim about the codec, rounding, projection, FastTwoSum and
//! ExtractScalar over complete format enumerations.

pub mod lattice;
pub mod registry;
pub mod report;
pub mod rn;
pub mod suites;

pub use lattice::{midpoint_lattice, Grid, ValueLattice};
pub use registry::{run, suite_names, Options, RegistryError, FAMILIES, REQUIRED};
pub use report::{Failure, Report};
pub use suites::Ctx;
