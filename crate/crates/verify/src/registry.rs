//! Every suite by name, the formats each one covers, and the runner.

use std::collections::BTreeSet;

use p3109::codec::Mutation;
use p3109::Format;
use rayon::prelude::*;
use thiserror::Error;

use crate::report::Report;
use crate::suites::{self, Ctx};

type PerFormat = fn(&Format, &Ctx) -> Vec<Report>;
type Whole = fn(&[Format], &Ctx) -> Vec<Report>;

#[derive(Clone, Copy)]
enum Runner {
    PerFormat(PerFormat),
    Whole(Whole),
}

/// A group of suites computed together over one set of formats.
#[derive(Clone, Copy)]
pub struct Family {
    pub suites: &'static [&'static str],
    /// Default width range, and the upper width under `deep`.
    pub kmin: u32,
    pub kmax: u32,
    pub deep_kmax: u32,
    /// Whether the codec mutation affects this family.
    pub uses_codec: bool,
    filter: fn(&Format) -> bool,
    runner: Runner,
}

fn any(_: &Format) -> bool {
    true
}

fn signed(f: &Format) -> bool {
    f.is_signed()
}

fn unsigned_extended(f: &Format) -> bool {
    !f.is_signed() && f.is_extended()
}

fn precision_one(f: &Format) -> bool {
    f.precision() == 1
}

fn signed_multibit(f: &Format) -> bool {
    f.is_signed() && f.precision() >= 2
}

fn signed_p1(f: &Format) -> bool {
    f.is_signed() && f.precision() == 1
}

pub const FAMILIES: &[Family] = &[
    Family {
        suites: &["emax-consistency"],
        kmin: 3,
        kmax: 10,
        deep_kmax: 12,
        uses_codec: true,
        filter: any,
        runner: Runner::PerFormat(suites::formats::emax_consistency),
    },
    Family {
        suites: &["emax-errata"],
        kmin: 3,
        kmax: 10,
        deep_kmax: 12,
        uses_codec: true,
        filter: unsigned_extended,
        runner: Runner::PerFormat(suites::formats::emax_errata),
    },
    Family {
        suites: &["reserved-encodings"],
        kmin: 3,
        kmax: 10,
        deep_kmax: 12,
        uses_codec: true,
        filter: any,
        runner: Runner::PerFormat(suites::formats::reserved_encodings),
    },
    Family {
        suites: &["triangle-isomorphism"],
        kmin: 3,
        kmax: 8,
        deep_kmax: 10,
        uses_codec: true,
        filter: any,
        runner: Runner::PerFormat(suites::codec::triangle),
    },
    Family {
        suites: &["differential-decode"],
        kmin: 3,
        kmax: 8,
        deep_kmax: 10,
        uses_codec: true,
        filter: any,
        runner: Runner::PerFormat(suites::codec::differential),
    },
    Family {
        suites: &["reduction"],
        kmin: 3,
        kmax: 8,
        deep_kmax: 10,
        uses_codec: true,
        filter: signed,
        runner: Runner::PerFormat(suites::codec::reduction),
    },
    Family {
        suites: &["region-disjointness"],
        kmin: 3,
        kmax: 8,
        deep_kmax: 10,
        uses_codec: true,
        filter: any,
        runner: Runner::PerFormat(suites::codec::regions),
    },
    Family {
        suites: &["canonical-codec"],
        kmin: 3,
        kmax: 8,
        deep_kmax: 10,
        uses_codec: true,
        filter: any,
        runner: Runner::PerFormat(suites::codec::canonical_image),
    },
    Family {
        suites: &["lattice-codec"],
        kmin: 3,
        kmax: 8,
        deep_kmax: 10,
        uses_codec: true,
        filter: any,
        runner: Runner::PerFormat(suites::codec::lattice_vs_codec),
    },
    Family {
        suites: &["round-faithful", "round-exact", "round-monotonic", "round-weak-monotonic", "round-carry"],
        kmin: 3,
        kmax: 6,
        deep_kmax: 8,
        uses_codec: false,
        filter: any,
        runner: Runner::PerFormat(suites::rounding::rounding),
    },
    Family {
        suites: &["rne-p1-ties"],
        kmin: 3,
        kmax: 8,
        deep_kmax: 10,
        uses_codec: false,
        filter: precision_one,
        runner: Runner::PerFormat(suites::rounding::rne_p1_ties),
    },
    Family {
        suites: &["nearest-oracle"],
        kmin: 3,
        kmax: 6,
        deep_kmax: 8,
        uses_codec: false,
        filter: any,
        runner: Runner::PerFormat(suites::rounding::nearest_oracle),
    },
    Family {
        suites: &["project-identity", "project-faith", "project-overflow", "project-closure"],
        kmin: 3,
        kmax: 6,
        deep_kmax: 8,
        uses_codec: false,
        filter: any,
        runner: Runner::PerFormat(suites::projection::projection),
    },
    Family {
        suites: &[
            "fts-exact-z",
            "fts-delta-in-f",
            "fts-eft",
            "fts-faith",
            "fts-overflow-immune",
            "fts-overflow-exact",
        ],
        kmin: 3,
        kmax: 6,
        deep_kmax: 8,
        uses_codec: false,
        filter: signed,
        runner: Runner::PerFormat(suites::fts::fts),
    },
    Family {
        suites: &["extract-scalar"],
        kmin: 3,
        kmax: 6,
        deep_kmax: 8,
        uses_codec: false,
        filter: signed_multibit,
        runner: Runner::PerFormat(suites::extract::extract),
    },
    Family {
        suites: &["extract-scalar-d-p1"],
        kmin: 3,
        kmax: 8,
        deep_kmax: 10,
        uses_codec: false,
        filter: signed_p1,
        runner: Runner::Whole(suites::extract::extract_p1),
    },
];

/// Every claim that must have a registered suite.
pub const REQUIRED: &[&str] = &[
    "emax-consistency",
    "emax-errata",
    "reserved-encodings",
    "triangle-isomorphism",
    "differential-decode",
    "reduction",
    "region-disjointness",
    "canonical-codec",
    "lattice-codec",
    "round-faithful",
    "round-exact",
    "round-monotonic",
    "round-weak-monotonic",
    "round-carry",
    "rne-p1-ties",
    "nearest-oracle",
    "project-identity",
    "project-faith",
    "project-overflow",
    "project-closure",
    "fts-exact-z",
    "fts-delta-in-f",
    "fts-eft",
    "fts-faith",
    "fts-overflow-immune",
    "fts-overflow-exact",
    "extract-scalar",
    "extract-scalar-d-p1",
];

/// Names of all registered suites in registry order.
pub fn suite_names() -> Vec<&'static str> {
    FAMILIES.iter().flat_map(|f| f.suites.iter().copied()).collect()
}

/// Required claims with no suite, and suites no claim asks for.
pub fn coverage_gaps() -> (Vec<&'static str>, Vec<&'static str>) {
    let have: BTreeSet<_> = suite_names().into_iter().collect();
    let want: BTreeSet<_> = REQUIRED.iter().copied().collect();
    (
        want.difference(&have).copied().collect(),
        have.difference(&want).copied().collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

/// What to run and how.
#[derive(Debug, Clone)]
pub struct Options {
    /// Suite names; empty or `all` selects every suite.
    pub suites: Vec<String>,
    pub kmin: Option<u32>,
    /// Replaces every family's default upper width.
    pub kmax: Option<u32>,
    pub ctx: Ctx,
    /// Run only the families the codec mutation can affect.
    pub codec_only: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            suites: Vec::new(),
            kmin: None,
            kmax: None,
            ctx: Ctx::default(),
            codec_only: false,
        }
    }
}

impl Options {
    pub fn with_suites(names: &[&str]) -> Options {
        Options {
            suites: names.iter().map(|s| s.to_string()).collect(),
            ..Options::default()
        }
    }

    pub fn with_mutation(mut self, m: Mutation) -> Options {
        self.ctx.mutation = Some(m);
        self.codec_only = true;
        self
    }
}

fn selected(opts: &Options) -> Result<BTreeSet<&'static str>, RegistryError> {
    let names = suite_names();
    if opts.suites.is_empty() || opts.suites.iter().any(|s| s == "all") {
        return Ok(names.into_iter().collect());
    }
    opts.suites
        .iter()
        .map(|s| {
            names
                .iter()
                .find(|n| **n == s.as_str())
                .copied()
                .ok_or_else(|| RegistryError::UnknownSuite(s.clone()))
        })
        .collect()
}

/// Formats a family covers under `opts`.
pub fn formats_for(family: &Family, opts: &Options) -> Vec<Format> {
    let kmin = opts.kmin.unwrap_or(family.kmin).max(3);
    let default_max = if opts.ctx.deep { family.deep_kmax } else { family.kmax };
    let kmax = opts.kmax.unwrap_or(default_max);
    Format::all(kmin, kmax).into_iter().filter(|f| (family.filter)(f)).collect()
}

/// Runs the selected suites. Reports come back in registry order, then
/// format order, whatever the thread schedule.
pub fn run(opts: &Options) -> Result<Vec<Report>, RegistryError> {
    let want = selected(opts)?;
    let mut out = Vec::new();
    for family in FAMILIES {
        if !family.suites.iter().any(|s| want.contains(s)) || (opts.codec_only && !family.uses_codec) {
            continue;
        }
        let formats = formats_for(family, opts);
        let reports: Vec<Report> = match family.runner {
            Runner::PerFormat(run) => formats
                .par_iter()
                .map(|f| run(f, &opts.ctx))
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .collect(),
            Runner::Whole(run) => run(&formats, &opts.ctx),
        };
        out.extend(reports.into_iter().filter(|r| want.contains(r.suite.as_str())));
    }
    Ok(out)
}
