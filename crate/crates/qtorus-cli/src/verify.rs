use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use qtorus::nctorus::{
    clock_shift_model, nc_cosine, rep_operator, star_multiply, weyl_multiply, Laurent, LaurentPoly, NCWord,
    SymbolElement,
};
use qtorus::observables::{c_action, c_matrix, four_term_form, pairing_form, product_to_sum, SlopeData};
use qtorus::linalg::FieldMatrix;
use qtorus::torus_space::{pairing_vectors, recursion_oracle, TorusVector};
use qtorus::tqft::{
    bracket_s, c_bracket, collapse_via_lemma, lemma_scan, literal_bracket_s, neg_cfrac, sl2_word_check,
    slope_expansion, GaussSumChain, LemmaLedger, LemmaScanRow, LemmaTuple,
};
use qtorus::{CycloContext, Error, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Levels, Suite, VerifyArgs};
use crate::compute::CliResult;
use crate::report::Output;

/// `(level, tuple, holds)` as recorded by a lemma ledger.
type LemmaRecord = (u32, LemmaTuple, bool);

/// A failed check with its full parameter tuple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Failure {
    pub key: Vec<i64>,
    pub what: String,
    pub lhs: String,
    pub rhs: String,
}

impl Failure {
    fn new(key: Vec<i64>, what: impl Into<String>, lhs: impl ToString, rhs: impl ToString) -> Self {
        Failure { key, what: what.into(), lhs: lhs.to_string(), rhs: rhs.to_string() }
    }

    fn from_error(key: Vec<i64>, what: &str, e: Error) -> Self {
        match e {
            Error::VerificationFailed { location, lhs, rhs } => Failure::new(key, format!("{what} at {location}"), lhs, rhs),
            other => Failure::new(key, format!("{what}: {other}"), "error", ""),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub levels: String,
    pub parameters: BTreeMap<&'static str, Value>,
    pub checked: usize,
    pub passed: bool,
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

/// Per-item results gathered from the worker pool.
#[derive(Default)]
struct Tally {
    checked: usize,
    failures: Vec<Failure>,
}

impl Tally {
    fn check(&mut self, ok: bool, fail: impl FnOnce() -> Failure) {
        self.checked += 1;
        if !ok {
            self.failures.push(fail());
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.failures.extend(other.failures);
        self
    }
}

fn ctx(r: i64) -> CycloContext {
    CycloContext::new(r).expect("levels are validated at parse time")
}

fn sweep<T: Sync>(items: &[T], f: impl Fn(&T) -> Tally + Sync + Send) -> Tally {
    items.par_iter().map(f).reduce(Tally::default, Tally::merge)
}

fn levels_or(levels: Option<Levels>, lo: i64, hi: i64) -> Levels {
    levels.unwrap_or(Levels { lo, hi })
}

fn nonneg(v: Option<i64>, default: i64, flag: &str) -> CliResult<i64> {
    match v.unwrap_or(default) {
        b if b >= 0 => Ok(b),
        b => Err(format!("--{flag} must be nonnegative, got {b}")),
    }
}

/// All primitive `(p', q')` with both coordinates in `[−b, b]`.
fn primitive_slopes(b: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for p in -b..=b {
        for q in -b..=b {
            if SlopeData::new(p, q).d == 1 {
                out.push((p, q));
            }
        }
    }
    out
}

fn quads(b: i64) -> Vec<(i64, i64, i64, i64)> {
    let r = || -b..=b;
    let mut out = Vec::new();
    for m in r() {
        for n in r() {
            for p in r() {
                for q in r() {
                    out.push((m, n, p, q));
                }
            }
        }
    }
    out
}

pub fn run(args: &VerifyArgs) -> CliResult<(Output, bool)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .map_err(|e| e.to_string())?;
    let report = pool.install(|| dispatch(args))?;
    let passed = report.passed;
    Ok((render(report), passed))
}

fn dispatch(args: &VerifyArgs) -> CliResult<SuiteReport> {
    match args.suite {
        Suite::ProductToSum => {
            product_to_sum_suite(levels_or(args.level, 3, 8), nonneg(args.bound, 4, "bound")?)
        }
        Suite::Thm2Consistency => thm2_suite(levels_or(args.level, 3, 8), nonneg(args.bound, 6, "bound")?),
        Suite::PipelineVsClosedForm => pipeline_suite(
            levels_or(args.level, 3, 5),
            nonneg(args.slope_bound, 5, "slope-bound")?,
            nonneg(args.d_max, 3, "d-max")?,
        ),
        Suite::LemmaScan => lemma_scan_suite(
            levels_or(args.level, 3, 6),
            nonneg(args.range, 3, "range")?,
            nonneg(args.slope_bound, 5, "slope-bound")?,
            nonneg(args.d_max, 3, "d-max")?,
        ),
        Suite::NcTorus => nc_torus_suite(levels_or(args.level, 3, 6), nonneg(args.bound, 4, "bound")?),
        Suite::Associativity => associativity_suite(levels_or(args.level, 3, 6), args.samples, args.seed),
        Suite::Cfrac => cfrac_suite(nonneg(args.bound, 12, "bound")?),
        Suite::ReductionOracle => reduction_suite(levels_or(args.level, 3, 8)),
    }
}

fn finish(
    suite: &'static str,
    levels: String,
    parameters: BTreeMap<&'static str, Value>,
    tally: Tally,
    details: Value,
) -> SuiteReport {
    let mut failures = tally.failures;
    failures.sort();
    SuiteReport { suite, levels, parameters, checked: tally.checked, passed: failures.is_empty(), failures, details }
}

fn product_to_sum_suite(levels: Levels, bound: i64) -> CliResult<SuiteReport> {
    let items: Vec<(i64, (i64, i64, i64, i64))> =
        levels.iter().flat_map(|r| quads(bound).into_iter().map(move |x| (r, x))).collect();
    let tally = sweep(&items, |&(r, (m, n, p, q))| {
        let mut t = Tally::default();
        let res = product_to_sum(&ctx(r), m, n, p, q);
        let ok = res.is_ok();
        t.check(ok, || Failure::from_error(vec![r, m, n, p, q], "product-to-sum", res.unwrap_err()));
        t
    });
    let params = BTreeMap::from([("bound", json!(bound))]);
    Ok(finish("product-to-sum", levels.to_string(), params, tally, Value::Null))
}

fn thm2_suite(levels: Levels, bound: i64) -> CliResult<SuiteReport> {
    let mut items = Vec::new();
    for r in levels.iter() {
        for p in -bound..=bound {
            for q in -bound..=bound {
                items.push((r, p, q));
            }
        }
    }
    let tally = sweep(&items, |&(r, p, q)| {
        let c = ctx(r);
        let mut t = Tally::default();
        for k in 1..r {
            let act = c_action(&c, p, q, k);
            for m in 1..r {
                let closed = pairing_form(&c, p, q, k, m);
                let direct = pairing_vectors(&act, &TorusVector::color(&c, m)).and_then(|s| s.into_value());
                match direct {
                    Ok(v) => t.check(v == closed, || Failure::new(vec![r, p, q, k, m], "action vs pairing form", &v, &closed)),
                    Err(e) => t.check(false, || Failure::from_error(vec![r, p, q, k, m], "action", e)),
                }
                let four = four_term_form(&c, p, q, k, m);
                t.check(four == closed, || Failure::new(vec![r, p, q, k, m], "four-term vs pairing form", &four, &closed));
            }
        }
        t
    });
    let params = BTreeMap::from([("bound", json!(bound))]);
    Ok(finish("thm2-consistency", levels.to_string(), params, tally, Value::Null))
}

/// Pipeline and lemma-collapse checks for one `(r, p', q', d)`, plus the
/// lemma tuples the collapse used.
fn pipeline_item(r: i64, pp: i64, qp: i64, d: i64, literal: bool) -> (Tally, LemmaLedger) {
    let c = ctx(r);
    let (p, q) = (d * pp, d * qp);
    let mut t = Tally::default();
    let mut ledger = LemmaLedger::new();
    for k in 1..r {
        for m in 1..r {
            let key = vec![r, p, q, k, m];
            let closed = pairing_form(&c, p, q, k, m);
            match c_bracket(&c, p, q, k, m) {
                Ok(v) => t.check(v == closed, || Failure::new(key.clone(), "pipeline vs closed form", &v, &closed)),
                Err(e) => t.check(false, || Failure::from_error(key.clone(), "pipeline", e)),
            }
            let collapsed = GaussSumChain::for_cosine(p, q, k, m).and_then(|ch| collapse_via_lemma(&c, &ch, &mut ledger));
            match collapsed {
                Ok(col) => t.check(col.value == closed, || {
                    Failure::new(key.clone(), "lemma collapse vs closed form", &col.value, &closed)
                }),
                Err(e) => t.check(false, || Failure::from_error(key.clone(), "lemma collapse", e)),
            }
            if literal {
                for color in 1..=d + 1 {
                    let key = vec![r, pp, qp, color, k, m];
                    let chain = bracket_s(&c, pp, qp, color, k, m);
                    let lit = literal_bracket_s(&c, pp, qp, color, k, m);
                    match (lit, chain) {
                        (Ok(a), Ok(b)) => t.check(a == b, || Failure::new(key, "literal sum vs matrix chain", &a, &b)),
                        (Err(e), _) | (_, Err(e)) => t.check(false, || Failure::from_error(key, "literal sum", e)),
                    }
                }
            }
        }
    }
    (t, ledger)
}

struct PipelineRun {
    tally: Tally,
    tuples: BTreeSet<(u32, LemmaTuple)>,
    literal_slopes: usize,
}

fn run_pipeline(levels: Levels, slope_bound: i64, d_max: i64) -> PipelineRun {
    let mut slopes = primitive_slopes(slope_bound);
    for s in [(1, 0), (0, 1)] {
        if !slopes.contains(&s) {
            slopes.push(s);
        }
    }
    let mut items = Vec::new();
    for r in levels.iter() {
        for &(pp, qp) in &slopes {
            for d in 1..=d_max {
                let literal = r == 3 && slope_expansion(pp, qp).map(|cf| cf.len() <= 2).unwrap_or(false);
                items.push((r, pp, qp, d, literal));
            }
        }
    }
    let results: Vec<(Tally, Vec<LemmaRecord>, bool)> = items
        .par_iter()
        .map(|&(r, pp, qp, d, literal)| {
            let (t, ledger) = pipeline_item(r, pp, qp, d, literal);
            (t, ledger.records(), literal)
        })
        .collect();
    let mut tally = Tally::default();
    let mut tuples = BTreeSet::new();
    let mut literal_slopes = 0;
    for (t, records, literal) in results {
        tally = tally.merge(t);
        literal_slopes += literal as usize;
        for (r, tuple, ok) in records {
            tuples.insert((r, tuple));
            if !ok {
                tally.failures.push(Failure::new(
                    vec![r as i64, tuple.a, tuple.b, tuple.c, tuple.d, tuple.e],
                    "pipeline lemma tuple",
                    "lhs",
                    "rhs",
                ));
            }
        }
    }
    tally.failures.dedup();
    PipelineRun { tally, tuples, literal_slopes }
}

fn pipeline_suite(levels: Levels, slope_bound: i64, d_max: i64) -> CliResult<SuiteReport> {
    let run = run_pipeline(levels, slope_bound, d_max);
    let params = BTreeMap::from([("slope_bound", json!(slope_bound)), ("d_max", json!(d_max))]);
    let details = json!({ "lemma_tuples": run.tuples.len(), "literal_items": run.literal_slopes });
    Ok(finish("pipeline-vs-closed-form", levels.to_string(), params, run.tally, details))
}

pub fn scan_rows(levels: Levels, range: i64) -> Vec<LemmaScanRow> {
    let per_level: Vec<Vec<LemmaScanRow>> =
        levels.iter().collect::<Vec<_>>().par_iter().map(|&r| lemma_scan(&ctx(r), range)).collect();
    let mut rows: Vec<LemmaScanRow> = per_level.into_iter().flatten().collect();
    rows.sort_by_key(|x| (x.level, x.a, x.b, x.c, x.d, x.e));
    rows
}

pub fn scan_csv(rows: &[LemmaScanRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|x| {
            [x.level as i64, x.a, x.b, x.c, x.d, x.e]
                .iter()
                .map(i64::to_string)
                .chain([x.equal.to_string()])
                .collect()
        })
        .collect()
}

pub const SCAN_HEADER: [&str; 7] = ["level", "a", "b", "c", "d", "e", "equal"];

fn lemma_scan_suite(levels: Levels, range: i64, slope_bound: i64, d_max: i64) -> CliResult<SuiteReport> {
    let rows = scan_rows(levels, range);
    let scan_failures: Vec<&LemmaScanRow> = rows.iter().filter(|x| !x.equal).collect();
    let run = run_pipeline(levels, slope_bound, d_max);
    // only the tuples the collapse actually used are hard requirements
    let mut tally = Tally { checked: run.tuples.len(), failures: Vec::new() };
    tally.failures.extend(run.tally.failures.into_iter().filter(|f| f.what == "pipeline lemma tuple"));
    let params = BTreeMap::from([
        ("range", json!(range)),
        ("slope_bound", json!(slope_bound)),
        ("d_max", json!(d_max)),
    ]);
    let details = json!({
        "scan_rows": rows.len(),
        "scan_failures": scan_failures,
        "csv": scan_csv(&rows),
    });
    Ok(finish("lemma-scan", levels.to_string(), params, tally, details))
}

fn nc_torus_suite(levels: Levels, bound: i64) -> CliResult<SuiteReport> {
    let mut tally = Tally::default();
    for r in levels.iter() {
        let c = ctx(r);
        let cs = clock_shift_model(&c);
        let n = cs.size();
        let id = FieldMatrix::identity(&c, n);
        let uv = cs.u() * cs.v();
        let vu = cs.v() * cs.u();
        tally.check(uv == vu.scale(&c.t_power(2)), || Failure::new(vec![r], "UV = t^2 VU", "UV", "t^2 VU"));
        let (mut up, mut vp) = (id.clone(), id.clone());
        for _ in 0..2 * r {
            up = &up * cs.u();
            vp = &vp * cs.v();
        }
        tally.check(up == id, || Failure::new(vec![r], "U^{2r} = 1", "U^{2r}", "1"));
        tally.check(vp == id, || Failure::new(vec![r], "V^{2r} = 1", "V^{2r}", "1"));

        let b2 = 2 * bound;
        let mut cosines = BTreeMap::new();
        let mut ops = BTreeMap::new();
        for p in -b2..=b2 {
            for q in -b2..=b2 {
                cosines.insert((p, q), cs.evaluate(&nc_cosine(&c, p, q)).expect("same level"));
                ops.insert((p, q), c_matrix(&c, p, q));
            }
        }
        let items = quads(bound);
        let t = sweep(&items, |&(m, nn, p, q)| {
            let mut t = Tally::default();
            let key = vec![r, m, nn, p, q];
            let d = m * q - nn * p;
            let (td, tmd) = (c.t_power(d), c.t_power(-d));

            let lhs = weyl_multiply(&nc_cosine(&c, m, nn), &nc_cosine(&c, p, q)).expect("same ring");
            let rhs = nc_cosine(&c, m + p, nn + q)
                .scale(&td)
                .try_add(&nc_cosine(&c, m - p, nn - q).scale(&tmd))
                .expect("same ring");
            t.check(lhs == rhs, || Failure::new(key.clone(), "nc cosine product-to-sum", &lhs, &rhs));

            let lhs = &cosines[&(m, nn)] * &cosines[&(p, q)];
            let rhs = &cosines[&(m + p, nn + q)].scale(&td) + &cosines[&(m - p, nn - q)].scale(&tmd);
            t.check(lhs == rhs, || Failure::new(key.clone(), "clock-shift product-to-sum", "lhs", "rhs"));

            let star = star_multiply(&SymbolElement::symbol(&c, m, nn), &SymbolElement::symbol(&c, p, q))
                .and_then(|s| rep_operator(&c, &s));
            let prod = &ops[&(m, nn)] * &ops[&(p, q)];
            match star {
                Ok(s) => t.check(s == prod, || Failure::new(key.clone(), "rep homomorphism", "rep(A*B)", "rep(A)rep(B)")),
                Err(e) => t.check(false, || Failure::from_error(key.clone(), "rep", e)),
            }
            t
        });
        tally = tally.merge(t);
    }
    let params = BTreeMap::from([("bound", json!(bound))]);
    Ok(finish("nc-torus", levels.to_string(), params, tally, Value::Null))
}

fn random_laurent(rng: &mut ChaCha8Rng) -> LaurentPoly {
    let mut c = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        c = -c;
    }
    LaurentPoly::monomial(Rational::from_int(c), rng.gen_range(-3..=3))
}

fn random_symbol(rng: &mut ChaCha8Rng) -> SymbolElement<Laurent> {
    let mut s = SymbolElement::zero(&Laurent);
    for _ in 0..rng.gen_range(1..=3) {
        let (p, q) = (rng.gen_range(-5..=5), rng.gen_range(-5..=5));
        s.add_term(p, q, &random_laurent(rng));
    }
    s
}

fn random_word(rng: &mut ChaCha8Rng) -> NCWord<Laurent> {
    let mut w = NCWord::zero(&Laurent);
    for _ in 0..rng.gen_range(1..=3) {
        let (p, q) = (rng.gen_range(-5..=5), rng.gen_range(-5..=5));
        w.add_term(p, q, &random_laurent(rng));
    }
    w
}

fn associativity_suite(levels: Levels, samples: usize, seed: u64) -> CliResult<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols: Vec<_> = (0..samples).map(|_| [0; 3].map(|_| random_symbol(&mut rng))).collect();
    let words: Vec<_> = (0..samples).map(|_| [0; 3].map(|_| random_word(&mut rng))).collect();
    let indexed: Vec<usize> = (0..samples).collect();
    let level_list: Vec<i64> = levels.iter().collect();
    let tally = sweep(&indexed, |&i| {
        let mut t = Tally::default();
        let [a, b, c] = &symbols[i];
        let left = star_multiply(&star_multiply(a, b).unwrap(), c).unwrap();
        let right = star_multiply(a, &star_multiply(b, c).unwrap()).unwrap();
        t.check(left == right, || Failure::new(vec![i as i64], "star associativity (laurent)", &left, &right));

        let [x, y, z] = &words[i];
        let wl = weyl_multiply(&weyl_multiply(x, y).unwrap(), z).unwrap();
        let wr = weyl_multiply(x, &weyl_multiply(y, z).unwrap()).unwrap();
        t.check(wl == wr, || Failure::new(vec![i as i64], "weyl associativity (laurent)", &wl, &wr));

        for &r in &level_list {
            let k = ctx(r);
            let (x, y, z) = (x.specialize(&k), y.specialize(&k), z.specialize(&k));
            let wl = weyl_multiply(&weyl_multiply(&x, &y).unwrap(), &z).unwrap();
            let wr = weyl_multiply(&x, &weyl_multiply(&y, &z).unwrap()).unwrap();
            t.check(wl == wr, || Failure::new(vec![i as i64, r], "weyl associativity (field)", &wl, &wr));
        }
        t
    });
    let params = BTreeMap::from([("samples", json!(samples)), ("seed", json!(seed))]);
    Ok(finish("associativity", levels.to_string(), params, tally, Value::Null))
}

fn cfrac_suite(bound: i64) -> CliResult<SuiteReport> {
    let items: Vec<(i64, i64)> = primitive_slopes(bound).into_iter().filter(|&(p, q)| p * q != 0).collect();
    let tally = sweep(&items, |&(p, q)| {
        let mut t = Tally::default();
        match neg_cfrac(p, q) {
            Ok(cf) => {
                let value = cf.value();
                let expect = Ratio::new(q, p);
                t.check(value == Some(expect), || {
                    Failure::new(vec![p, q], format!("round trip of {cf}"), format!("{value:?}"), expect)
                });
                t.check(sl2_word_check(&cf, p, q), || Failure::new(vec![p, q], format!("sl2 word of {cf}"), "false", "true"));
            }
            Err(e) => t.check(false, || Failure::from_error(vec![p, q], "neg_cfrac", e)),
        }
        t
    });
    let params = BTreeMap::from([("bound", json!(bound))]);
    Ok(finish("cfrac", "-".into(), params, tally, Value::Null))
}

fn reduction_suite(levels: Levels) -> CliResult<SuiteReport> {
    let items: Vec<(i64, i64)> = levels.iter().flat_map(|r| (-3 * r..=3 * r).map(move |n| (r, n))).collect();
    let tally = sweep(&items, |&(r, n)| {
        let c = ctx(r);
        let mut t = Tally::default();
        let (a, b) = (TorusVector::color(&c, n), recursion_oracle(&c, n));
        t.check(a == b, || Failure::new(vec![r, n], "reduced color vs recursion", format!("{a:?}"), format!("{b:?}")));
        t
    });
    Ok(finish("reduction-oracle", levels.to_string(), BTreeMap::new(), tally, Value::Null))
}

fn render(report: SuiteReport) -> Output {
    let status = if report.passed { "PASS" } else { "FAIL" };
    let mut pretty = format!("{} r={}: {status} ({} checks)", report.suite, report.levels, report.checked);
    if let Some(n) = report.details.get("lemma_tuples") {
        pretty.push_str(&format!("\n  lemma tuples checked: {n}"));
    }
    if let Some(rows) = report.details.get("scan_rows") {
        let bad = report.details["scan_failures"].as_array().map_or(0, Vec::len);
        pretty.push_str(&format!("\n  scan: {rows} tuples, {bad} where the identity fails"));
    }
    for f in &report.failures {
        pretty.push_str(&format!("\n  FAIL {:?} {}: {} != {}", f.key, f.what, f.lhs, f.rhs));
    }

    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = match report.details.get("csv") {
        Some(csv) => (SCAN_HEADER.to_vec(), serde_json::from_value(csv.clone()).unwrap_or_default()),
        None => (
            vec!["key", "what", "lhs", "rhs"],
            report
                .failures
                .iter()
                .map(|f| {
                    let key = f.key.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
                    vec![key, f.what.clone(), f.lhs.clone(), f.rhs.clone()]
                })
                .collect(),
        ),
    };
    let mut json = serde_json::to_value(&report).expect("report serializes");
    if let Some(d) = json.get_mut("details").and_then(Value::as_object_mut) {
        d.remove("csv");
    }
    Output::new(json, pretty).with_csv(&header, rows)
}
