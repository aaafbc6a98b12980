//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fail.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use p3109::codec::Mutation;
use p3109::{Codec, Format, XReal};
use p3109_verify::registry::coverage_gaps;
use p3109_verify::{run, Options, Report};

struct Outcome {
    ok: bool,
    detail: String,
}

fn suites(names: &[&str], kmax: Option<u32>) -> (Vec<Report>, Duration) {
    let mut opts = Options::with_suites(names);
    opts.kmax = kmax;
    let t = Instant::now();
    let reports = run(&opts).expect("registered suites");
    (reports, t.elapsed())
}

fn summarize(reports: &[Report]) -> (u64, u64, usize) {
    let cases = reports.iter().map(|r| r.cases).sum();
    let failures = reports.iter().map(|r| r.failures_total).sum();
    let formats = reports
        .iter()
        .map(|r| r.format.as_str())
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    (cases, failures, formats)
}

fn first_failure(reports: &[Report]) -> String {
    match reports.iter().find(|r| !r.passed()) {
        Some(r) => format!("; first: {} {} {}", r.suite, r.format, serde_json::to_string(&r.failures.first()).unwrap()),
        None => String::new(),
    }
}

fn zero_failures(names: &[&str], kmax: Option<u32>, limit: Option<Duration>) -> Outcome {
    let (reports, took) = suites(names, kmax);
    let (cases, failures, formats) = summarize(&reports);
    let in_time = limit.map_or(true, |l| took < l);
    let mut detail = format!("{formats} formats, {cases} cases, {failures} failures, {:.2?}", took);
    if let Some(l) = limit {
        detail.push_str(&format!(" (limit {l:?})"));
    }
    detail.push_str(&first_failure(&reports));
    Outcome {
        ok: failures == 0 && cases > 0 && in_time,
        detail,
    }
}

fn triangle() -> Outcome {
    zero_failures(&["triangle-isomorphism"], Some(8), Some(Duration::from_secs(30)))
}

fn differential() -> Outcome {
    zero_failures(&["differential-decode"], Some(8), None)
}

fn errata() -> Outcome {
    let mut out = zero_failures(&["emax-errata"], Some(10), None);
    let mut checked = 0;
    for f in Format::all(3, 10).into_iter().filter(|f| !f.is_signed() && f.is_extended()) {
        let (w, b) = (f.exponent_width() as i64, f.bias());
        let default = (1i64 << w) - 1 - b;
        let want = match f.precision() {
            1 => Some((1i64 << w) - 3 - b),
            2 => Some((1i64 << w) - 2 - b),
            _ => None,
        };
        let slot = (1u64 << f.width()) - 2;
        let inf_ok = Codec::new(&f).decode(slot).map(|v| p3109::model::eval(&v)) == Ok(XReal::PosInf);
        let emax_ok = want.map_or(true, |e| f.emax() == e && e != default);
        if !(inf_ok && emax_ok) {
            out.ok = false;
            out.detail.push_str(&format!("; {f}: emax {} inf slot {inf_ok}", f.emax()));
        }
        checked += 1;
    }
    out.detail.push_str(&format!("; direct check over {checked} unsigned extended formats"));
    out
}

fn projection() -> Outcome {
    let t = Instant::now();
    let (reports, _) = suites(&["project-faith", "project-identity"], Some(6));
    let took = t.elapsed();
    let signed: Vec<Report> = reports
        .into_iter()
        .filter(|r| r.format.parse::<Format>().is_ok_and(|f| f.is_signed()))
        .collect();
    let (cases, failures, formats) = summarize(&signed);
    let faith = signed.iter().filter(|r| r.suite == "project-faith").count();
    Outcome {
        ok: failures == 0 && faith > 0 && took < Duration::from_secs(60),
        detail: format!(
            "{formats} signed formats, {cases} cases, {failures} failures, {took:.2?} (limit 60s){}",
            first_failure(&signed)
        ),
    }
}

fn fts() -> Outcome {
    let names = [
        "fts-exact-z",
        "fts-delta-in-f",
        "fts-eft",
        "fts-faith",
        "fts-overflow-immune",
        "fts-overflow-exact",
    ];
    let (reports, took) = suites(&names, Some(6));
    let (cases, failures, formats) = summarize(&reports);
    let small_p = reports
        .iter()
        .filter(|r| r.suite == "fts-overflow-immune" && r.cases > 0)
        .filter_map(|r| r.format.parse::<Format>().ok())
        .filter(|f| f.precision() <= 2)
        .count();
    let every_suite_ran = names
        .iter()
        .all(|n| reports.iter().any(|r| r.suite == *n && r.cases > 0));
    Outcome {
        ok: failures == 0 && every_suite_ran && small_p > 0 && took < Duration::from_secs(120),
        detail: format!(
            "{formats} formats ({small_p} with P <= 2), {cases} cases, {failures} failures, {took:.2?} (limit 120s){}",
            first_failure(&reports)
        ),
    }
}

fn extract() -> Outcome {
    let mut out = zero_failures(&["extract-scalar"], Some(6), None);
    let (reports, _) = suites(&["extract-scalar-d-p1"], Some(8));
    let witnesses: Vec<_> = reports.iter().flat_map(|r| r.witnesses.iter()).collect();
    let (cases, _, _) = summarize(&reports);
    let known = reports.iter().all(Report::passed) && !witnesses.is_empty();
    out.ok &= known;
    out.detail.push_str(&format!("; P = 1 search: {cases} inputs, {} witnesses recorded", witnesses.len()));
    if let Some(w) = witnesses.first() {
        out.detail.push_str(&format!(", e.g. {w}"));
    }
    out
}

fn rne_ties() -> Outcome {
    zero_failures(&["rne-p1-ties"], Some(8), None)
}

fn mutations() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in Mutation::ALL {
        let mut opts = Options::default().with_mutation(m);
        opts.kmax = Some(6);
        let reports = run(&opts).expect("registered suites");
        let mut names: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.suite.as_str()).collect();
        let failures: u64 = reports.iter().map(|r| r.failures_total).sum();
        names.dedup();
        ok &= failures > 0;
        parts.push(format!("{m:?}: {failures} failures in {}", names.join(",")));
    }
    Outcome { ok, detail: parts.join("; ") }
}

fn coverage() -> Outcome {
    let (missing, extra) = coverage_gaps();
    Outcome {
        ok: missing.is_empty() && extra.is_empty(),
        detail: format!("missing {missing:?}, unlisted {extra:?}"),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 triangle isomorphism, K 3..8", triangle),
        ("2 differential decode, K 3..8", differential),
        ("3 emax errata and infinity slot, K 3..10", errata),
        ("4 projection faith and identity, signed K <= 6", projection),
        ("5 FastTwoSum suites, signed K <= 6", fts),
        ("6 ExtractScalar (a)-(d) and P = 1 witness", extract),
        ("7 P = 1 RNE ties, K <= 8", rne_ties),
        ("8 codec mutations are caught", mutations),
        ("- suite coverage", coverage),
    ];
    let mut all = true;
    for (name, check) in criteria {
        let o = check();
        all &= o.ok;
        println!("{} {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
