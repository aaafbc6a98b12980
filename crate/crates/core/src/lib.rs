//! Executable model of the parametric P3109 low-precision floating-point
//! formats.
//!
//! A format is fixed by its bit width `K`, precision `P`, signedness and
//! domain. Values move between three views that are kept in bijection:
//! integer encodings ([`codec`]), the algebraic [`Value`] type ([`model`]),
//! and exact extended reals ([`numerics`]). Arithmetic is exact addition
//! followed by [`projection`]: rounding to `P` bits, saturation, encoding.

pub mod algorithms;
pub mod codec;
pub mod formats;
pub mod model;
pub mod numerics;
pub mod projection;
pub mod rounding;

pub use codec::{Codec, Encoding, Mutation};
pub use formats::{Domain, Format, FormatError, Signedness};
pub use model::Value;
pub use numerics::{Dyadic, XReal};
pub use projection::{ProjectionSpec, SatMode};
pub use rounding::{EntropySource, FixedEntropy, NoEntropy, RoundingMode, SeededEntropy};
