//! The property suites. Each function checks one family of claims on one
//! format (or a group of formats) and returns one report per claim.

pub mod codec;
pub mod extract;
pub mod formats;
pub mod fts;
pub mod projection;
pub mod rounding;

use p3109::codec::{Codec, Mutation};
use p3109::Format;
use serde::Serialize;
use serde_json::Value as Json;

/// Settings shared by every suite in one run.
#[derive(Debug, Clone)]
pub struct Ctx {
    pub deep: bool,
    pub seed: u64,
    /// Corrupts the codec the codec-level suites test.
    pub mutation: Option<Mutation>,
    /// Largest stochastic-rounding width swept by the rounding and
    /// projection suites.
    pub sr_bits: u32,
    /// Stochastic-rounding width used in each step of the FastTwoSum sweep.
    pub fts_sr_bits: u32,
}

impl Default for Ctx {
    fn default() -> Self {
        Ctx {
            deep: false,
            seed: 0,
            mutation: None,
            sr_bits: 6,
            fts_sr_bits: 4,
        }
    }
}

impl Ctx {
    pub fn codec(&self, f: &Format) -> Codec {
        match self.mutation {
            Some(m) => Codec::mutated(f, m),
            None => Codec::new(f),
        }
    }
}

pub(crate) fn js<T: Serialize + ?Sized>(t: &T) -> Json {
    serde_json::to_value(t).expect("serializable")
}
