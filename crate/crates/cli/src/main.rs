//! `p3109`: inspect formats, project values, trace the algorithms, run the
//! verification suites and export encoding tables.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use p3109::algorithms::{extract_scalar, fast_two_sum};
use p3109::codec::{self, decode_reference, Row};
use p3109::model::{self, Value};
use p3109::projection::project;
use p3109::{Codec, Encoding, Format, Mutation, ProjectionSpec, RoundingMode, SatMode, SeededEntropy, XReal};
use p3109_verify::{run, suite_names, Options, Report};
use serde_json::json;

#[derive(Parser)]
#[command(name = "p3109", version, about = "Bit-exact reference model of P3109 low-precision formats")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every encoding of a format with its value.
    Inspect {
        format: Format,
        /// One JSON object per encoding.
        #[arg(long)]
        json: bool,
    },
    /// Project one real value into a format.
    Project {
        format: Format,
        /// Exact decimal (`-0.375`), `m*2^e`, `inf`, `-inf` or `nan`.
        #[arg(allow_hyphen_values = true)]
        value: String,
        #[arg(long, default_value = "rne")]
        rnd: RoundingMode,
        #[arg(long, default_value = "satfin")]
        sat: SatMode,
        /// Seeds the entropy for stochastic rounding.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Trace FastTwoSum on two values of a signed format, as JSON.
    Fts {
        format: Format,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        /// `rnd:sat` for all three steps, or three times for each step in turn.
        #[arg(long = "spec", value_parser = parse_spec)]
        specs: Vec<ProjectionSpec>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Trace ExtractScalar on `sigma` and `x`, as JSON.
    Extract {
        format: Format,
        #[arg(allow_hyphen_values = true)]
        sigma: String,
        #[arg(allow_hyphen_values = true)]
        x: String,
        /// Saturation for all three steps, or three times for each step in turn.
        #[arg(long = "sat")]
        sats: Vec<SatMode>,
    },
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Compare the decoder with the independent reference decoder.
    Diff {
        /// Formats to check; defaults to every format in the width range.
        formats: Vec<Format>,
        #[command(flatten)]
        range: Range,
        #[arg(long, value_enum)]
        mutate: Option<MutationArg>,
    },
    /// Write one encoding table per format.
    Export {
        /// Formats to export; defaults to every format in the width range.
        formats: Vec<Format>,
        #[command(flatten)]
        range: Range,
        #[arg(long, default_value = "data")]
        dir: PathBuf,
        /// Write JSON lines instead of CSV.
        #[arg(long)]
        jsonl: bool,
    },
}

#[derive(Args)]
struct Range {
    #[arg(long, default_value_t = 3)]
    kmin: u32,
    #[arg(long, default_value_t = 8)]
    kmax: u32,
}

impl Range {
    fn formats(&self, explicit: &[Format]) -> Vec<Format> {
        if explicit.is_empty() {
            Format::all(self.kmin, self.kmax)
        } else {
            explicit.to_vec()
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, repeatable; `all` runs everything.
    #[arg(long = "suite", default_value = "all")]
    suites: Vec<String>,
    #[arg(long)]
    kmin: Option<u32>,
    /// Upper width for every selected suite.
    #[arg(long)]
    kmax: Option<u32>,
    /// Raise each suite's default upper width.
    #[arg(long)]
    deep: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// One JSON report per line.
    #[arg(long)]
    json: bool,
    /// Report zero wall time so runs compare byte for byte.
    #[arg(long)]
    no_timing: bool,
    /// Corrupt one codec constant and run the codec suites against it.
    #[arg(long, value_enum)]
    mutate: Option<MutationArg>,
    /// List suite names and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    NanSlot,
    InfSlot,
    Bias,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Mutation {
        match m {
            MutationArg::NanSlot => Mutation::NanSlot,
            MutationArg::InfSlot => Mutation::InfSlot,
            MutationArg::Bias => Mutation::Bias,
        }
    }
}

fn parse_spec(s: &str) -> Result<ProjectionSpec, String> {
    // `sr:4:satfin` splits at the last separator
    let (rnd, sat) = s.rsplit_once([':', ',']).ok_or_else(|| format!("expected rnd:sat, got `{s}`"))?;
    Ok(ProjectionSpec::new(
        rnd.parse().map_err(|e| format!("{e}"))?,
        sat.parse().map_err(|e| format!("{e}"))?,
    ))
}

enum Failure {
    Usage(String),
    Failed(String),
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl ToString) -> Failure {
    Failure::Usage(msg.to_string())
}

fn io_err(e: io::Error) -> Failure {
    Failure::Failed(e.to_string())
}

fn real(text: &str) -> Result<XReal, Failure> {
    XReal::parse(text).map_err(|e| usage(format!("{e}; values are exact decimals or m*2^e")))
}

fn member(f: &Format, text: &str) -> Result<Value, Failure> {
    let x = real(text)?;
    model::encode_value(f, &x).map_err(|e| usage(format!("{text} is not a value of {f}: {e}")))
}

fn replicate<T: Copy>(items: &[T], default: T, what: &str) -> Result<[T; 3], Failure> {
    match items {
        [] => Ok([default; 3]),
        [one] => Ok([*one; 3]),
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err(usage(format!("give {what} once or three times"))),
    }
}

fn shown(row: &Row) -> String {
    match row.value {
        Value::Finite { .. } => row.real.to_decimal_string(),
        other => other.to_string(),
    }
}

fn inspect(f: &Format, json: bool) -> Outcome {
    let rows = codec::enumerate(f).map_err(usage)?;
    let mut out = io::stdout().lock();
    if json {
        return codec::write_jsonl(f, &rows, out).map_err(|e| Failure::Failed(e.to_string()));
    }
    let width = f.width() as usize;
    for row in &rows {
        writeln!(
            out,
            "{:>5}  {:0width$b}  {:<9}  {}",
            row.encoding.0,
            row.encoding.0,
            row.class(f),
            shown(row)
        )
        .map_err(io_err)?;
    }
    Ok(())
}

fn project_cmd(f: &Format, text: &str, spec: ProjectionSpec, seed: u64, json: bool) -> Outcome {
    let x = real(text)?;
    let v = project(f, &x, spec, &mut SeededEntropy::new(seed));
    let enc = Codec::new(f).encode(&v).map_err(|e| Failure::Failed(e.to_string()))?;
    let value = model::eval(&v);
    if json {
        let line = json!({
            "format": f.to_string(),
            "input": x,
            "spec": spec.to_string(),
            "encoding": enc.0,
            "value": value,
            "repr": v.to_string(),
        });
        println!("{line}");
    } else {
        println!("encoding {enc}");
        println!("value {value}");
        println!("repr {v}");
    }
    Ok(())
}

fn print_json(text: serde_json::Result<String>) -> Outcome {
    println!("{}", text.map_err(|e| Failure::Failed(e.to_string()))?);
    Ok(())
}

fn verify(args: &VerifyArgs) -> Outcome {
    if args.list {
        for name in suite_names() {
            println!("{name}");
        }
        return Ok(());
    }
    let mut opts = Options {
        suites: args.suites.clone(),
        kmin: args.kmin,
        kmax: args.kmax,
        ..Options::default()
    };
    opts.ctx.deep = args.deep;
    opts.ctx.seed = args.seed;
    if let Some(m) = args.mutate {
        opts = opts.with_mutation(m.into());
    }
    let mut reports = run(&opts).map_err(usage)?;
    if args.no_timing {
        reports.iter_mut().for_each(|r| r.ms = 0);
    }
    let mut out = io::stdout().lock();
    if args.json {
        for r in &reports {
            writeln!(out, "{}", r.to_json_line()).map_err(io_err)?;
        }
    } else {
        summarize(&mut out, &reports, !args.no_timing).map_err(io_err)?;
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        return Err(Failure::Failed(format!("{failed} reports failed")));
    }
    Ok(())
}

fn summarize(out: &mut impl Write, reports: &[Report], timing: bool) -> io::Result<()> {
    let mut names: Vec<&str> = Vec::new();
    for r in reports {
        if !names.contains(&r.suite.as_str()) {
            names.push(&r.suite);
        }
    }
    for name in names {
        let group: Vec<&Report> = reports.iter().filter(|r| r.suite == name).collect();
        let cases: u64 = group.iter().map(|r| r.cases).sum();
        let failures: u64 = group.iter().map(|r| r.failures_total).sum();
        let witnesses: usize = group.iter().map(|r| r.witnesses.len()).sum();
        let status = if failures == 0 { "PASS" } else { "FAIL" };
        write!(out, "{status} {name}: {} formats, {cases} cases, {failures} failures", group.len())?;
        if witnesses > 0 {
            write!(out, ", {witnesses} witnesses")?;
        }
        if timing {
            write!(out, ", {} ms", group.iter().map(|r| r.ms).sum::<u64>())?;
        }
        writeln!(out)?;
        for r in group.iter().filter(|r| !r.passed()) {
            for fail in &r.failures {
                writeln!(out, "  {} {}", r.format, serde_json::to_string(fail).expect("failure serializes"))?;
            }
        }
    }
    Ok(())
}

fn diff(formats: &[Format], mutate: Option<MutationArg>) -> Outcome {
    let mut out = io::stdout().lock();
    let mut total = 0u64;
    for f in formats {
        let codec = match mutate {
            Some(m) => Codec::mutated(f, m.into()),
            None => Codec::new(f),
        };
        let mut mismatches = 0u64;
        for n in 0..f.encoding_count() {
            let got = codec.decode(n);
            let want = decode_reference(f, Encoding(n));
            if got != want {
                mismatches += 1;
                let show = |r: &Result<Value, _>| match r {
                    Ok(v) => v.to_string(),
                    Err(e) => format!("error: {e}"),
                };
                writeln!(out, "{f} {n}: decode {} reference {}", show(&got), show(&want)).map_err(io_err)?;
            }
        }
        writeln!(out, "{f}: {} encodings, {mismatches} mismatches", f.encoding_count()).map_err(io_err)?;
        total += mismatches;
    }
    if total > 0 {
        return Err(Failure::Failed(format!("{total} mismatches")));
    }
    Ok(())
}

fn export(formats: &[Format], dir: &PathBuf, jsonl: bool) -> Outcome {
    fs::create_dir_all(dir).map_err(io_err)?;
    for f in formats {
        let rows = codec::enumerate(f).map_err(usage)?;
        let ext = if jsonl { "jsonl" } else { "csv" };
        let path = dir.join(format!("{f}.{ext}"));
        let file = io::BufWriter::new(fs::File::create(&path).map_err(io_err)?);
        let written = if jsonl {
            codec::write_jsonl(f, &rows, file)
        } else {
            codec::write_csv(f, &rows, file)
        };
        written.map_err(|e| Failure::Failed(e.to_string()))?;
    }
    eprintln!("wrote {} tables to {}", formats.len(), dir.display());
    Ok(())
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Inspect { format, json } => inspect(&format, json),
        Command::Project {
            format,
            value,
            rnd,
            sat,
            seed,
            json,
        } => project_cmd(&format, &value, ProjectionSpec::new(rnd, sat), seed, json),
        Command::Fts {
            format,
            a,
            b,
            specs,
            seed,
        } => {
            let specs = replicate(&specs, ProjectionSpec::new(RoundingMode::RNE, SatMode::SatFinite), "--spec")?;
            let (a, b) = (member(&format, &a)?, member(&format, &b)?);
            let trace = fast_two_sum(&format, &a, &b, specs, &mut SeededEntropy::new(seed)).map_err(usage)?;
            print_json(serde_json::to_string_pretty(&trace))
        }
        Command::Extract { format, sigma, x, sats } => {
            let sats = replicate(&sats, SatMode::SatFinite, "--sat")?;
            let (sigma, x) = (member(&format, &sigma)?, member(&format, &x)?);
            let trace = extract_scalar(&format, &sigma, &x, sats).map_err(usage)?;
            print_json(serde_json::to_string_pretty(&trace))
        }
        Command::Verify(args) => verify(&args),
        Command::Diff { formats, range, mutate } => diff(&range.formats(&formats), mutate),
        Command::Export {
            formats,
            range,
            dir,
            jsonl,
        } => export(&range.formats(&formats), &dir, jsonl),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}
