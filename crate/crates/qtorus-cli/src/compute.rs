use qtorus::nctorus::{kernel_compare, nc_cosine, Laurent, NCWord, ScalarRing};
use qtorus::observables::{c_matrix, pairing_form, s_matrix_op};
use qtorus::torus_space::OperatorMatrix;
use qtorus::tqft::{c_bracket, lemma_check, sl2_word_check, slope_expansion, MoveWord};
use qtorus::{CycloContext, CycloElement};
use serde_json::{json, Value};

use crate::args::{ComputeArgs, ComputeOp, Levels};
use crate::report::{approx, Output};

pub type CliResult<T> = Result<T, String>;

pub fn context(level: Option<Levels>) -> CliResult<CycloContext> {
    let levels = level.ok_or("this operation needs -r/--level")?;
    let r = levels.single().ok_or_else(|| format!("expected a single level, got {levels}"))?;
    CycloContext::new(r).map_err(|e| e.to_string())
}

fn need(value: Option<i64>, flag: &str) -> CliResult<i64> {
    value.ok_or_else(|| format!("missing -{flag}"))
}

fn positional<const N: usize>(values: &[i64], what: &str) -> CliResult<[i64; N]> {
    values.try_into().map_err(|_| format!("expected {N} integers ({what}), got {}", values.len()))
}

/// `p q` from the flags, or from two positional integers.
fn slope_args(args: &ComputeArgs) -> CliResult<(i64, i64)> {
    match (args.p, args.q, args.values.as_slice()) {
        (Some(p), Some(q), []) => Ok((p, q)),
        (None, None, _) => positional::<2>(&args.values, "p q").map(|[p, q]| (p, q)),
        _ => Err("give the slope either as -p/-q or as two positional integers".into()),
    }
}

pub fn exact(x: &CycloElement) -> Value {
    let z = x.to_complex();
    json!({ "exact": x.to_string(), "approx": approx(z.re, z.im), "wire": x })
}

fn matrix_output(m: &OperatorMatrix, header: Value) -> Output {
    let n = m.dim();
    let rows: Vec<Vec<String>> = (1..=n).map(|i| (1..=n).map(|j| m.get(i, j).to_string()).collect()).collect();
    let pretty = format!(
        "[{}]",
        rows.iter().map(|r| format!("[{}]", r.join(", "))).collect::<Vec<_>>().join(", ")
    );
    let mut csv = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            let s = m.get(i, j);
            let z = s.to_complex();
            csv.push(vec![i.to_string(), j.to_string(), s.to_string(), approx(z.re, z.im)]);
        }
    }
    let mut json = header;
    json["exact"] = json!(rows);
    json["matrix"] = json!(m);
    Output::new(json, pretty).with_csv(&["row", "col", "exact", "approx"], csv)
}

fn value_output(x: &CycloElement, header: Value, keys: &[(&str, i64)]) -> Output {
    let mut json = header;
    json["value"] = exact(x);
    let z = x.to_complex();
    let mut hdr: Vec<&str> = keys.iter().map(|(k, _)| *k).collect();
    hdr.extend(["exact", "approx"]);
    let mut row: Vec<String> = keys.iter().map(|(_, v)| v.to_string()).collect();
    row.extend([x.to_string(), approx(z.re, z.im)]);
    Output::new(json, x.to_string()).with_csv(&hdr, vec![row])
}

fn word_output<R: ScalarRing>(w: &NCWord<R>, header: Value) -> Output {
    let rows = w.terms().iter().map(|(&(p, q), c)| vec![p.to_string(), q.to_string(), c.to_string()]).collect();
    let mut json = header;
    json["word"] = json!(w);
    Output::new(json, w.to_string()).with_csv(&["p", "q", "coeff"], rows)
}

pub fn run(args: &ComputeArgs) -> CliResult<Output> {
    match args.op {
        ComputeOp::CMatrix | ComputeOp::SMatrixOp => {
            let ctx = context(args.level)?;
            let (p, q) = slope_args(args)?;
            let (name, m) = match args.op {
                ComputeOp::CMatrix => ("c-matrix", c_matrix(&ctx, p, q)),
                _ => ("s-matrix-op", s_matrix_op(&ctx, p, q)),
            };
            Ok(matrix_output(&m, json!({ "op": name, "level": ctx.level(), "p": p, "q": q })))
        }
        ComputeOp::PairingForm => {
            let ctx = context(args.level)?;
            let (p, q) = (need(args.p, "p")?, need(args.q, "q")?);
            let (k, m) = (need(args.k, "k")?, need(args.m, "m")?);
            let x = pairing_form(&ctx, p, q, k, m);
            let header = json!({ "op": "pairing-form", "level": ctx.level(), "p": p, "q": q, "k": k, "m": m });
            Ok(value_output(&x, header, &[("level", ctx.level() as i64), ("p", p), ("q", q), ("k", k), ("m", m)]))
        }
        ComputeOp::Bracket => {
            let ctx = context(args.level)?;
            let (p, q) = (need(args.p, "p")?, need(args.q, "q")?);
            let (k, m) = (need(args.k, "k")?, need(args.m, "m")?);
            let pipeline = c_bracket(&ctx, p, q, k, m).map_err(|e| e.to_string())?;
            let closed = pairing_form(&ctx, p, q, k, m);
            let ok = pipeline == closed;
            let json = json!({
                "op": "bracket", "level": ctx.level(), "p": p, "q": q, "k": k, "m": m,
                "pipeline": exact(&pipeline), "closed_form": exact(&closed), "match": ok,
            });
            let pretty = format!("pipeline    = {pipeline}\nclosed form = {closed}\nmatch       = {ok}");
            let row = vec![
                ctx.level().to_string(), p.to_string(), q.to_string(), k.to_string(), m.to_string(),
                pipeline.to_string(), closed.to_string(), ok.to_string(),
            ];
            Ok(Output::new(json, pretty)
                .with_csv(&["level", "p", "q", "k", "m", "pipeline", "closed_form", "match"], vec![row]))
        }
        ComputeOp::Lemma => {
            let ctx = context(args.level)?;
            let [a, b, c, d, e] = positional::<5>(&args.values, "a b c d e")?;
            let lc = lemma_check(&ctx, a, b, c, d, e);
            let json = json!({
                "op": "lemma", "level": ctx.level(),
                "tuple": { "a": a, "b": b, "c": c, "d": d, "e": e },
                "lhs": exact(&lc.lhs), "rhs": exact(&lc.rhs), "equal": lc.equal,
            });
            let pretty = format!("lhs   = {}\nrhs   = {}\nequal = {}", lc.lhs, lc.rhs, lc.equal);
            let row = vec![
                ctx.level().to_string(), a.to_string(), b.to_string(), c.to_string(), d.to_string(),
                e.to_string(), lc.lhs.to_string(), lc.rhs.to_string(), lc.equal.to_string(),
            ];
            Ok(Output::new(json, pretty)
                .with_csv(&["level", "a", "b", "c", "d", "e", "lhs", "rhs", "equal"], vec![row]))
        }
        ComputeOp::Cfrac => {
            let (p, q) = slope_args(args)?;
            let cf = slope_expansion(p, q).map_err(|e| e.to_string())?;
            let word = MoveWord::from_cfrac(&cf);
            let ok = sl2_word_check(&cf, p, q);
            let terms = cf.terms().iter().map(i64::to_string).collect::<Vec<_>>().join(", ");
            let json = json!({ "op": "cfrac", "p": p, "q": q, "cfrac": cf.terms(), "word": word.to_string(), "sl2_check": ok });
            let row = vec![p.to_string(), q.to_string(), terms.replace(", ", " "), word.to_string(), ok.to_string()];
            Ok(Output::new(json, format!("[{terms}]")).with_csv(&["p", "q", "cfrac", "word", "sl2_check"], vec![row]))
        }
        ComputeOp::NcCosine => {
            let (p, q) = slope_args(args)?;
            match args.level {
                Some(_) => {
                    let ctx = context(args.level)?;
                    let header = json!({ "op": "nc-cosine", "ring": format!("level {}", ctx.level()), "p": p, "q": q });
                    Ok(word_output(&nc_cosine(&ctx, p, q), header))
                }
                None => {
                    let header = json!({ "op": "nc-cosine", "ring": "laurent", "p": p, "q": q });
                    Ok(word_output(&nc_cosine(&Laurent, p, q), header))
                }
            }
        }
        ComputeOp::KernelCompare => {
            let ctx = context(args.level)?;
            let n = args.bound.ok_or("kernel-compare needs -N/--bound")?;
            let rep = kernel_compare(&ctx, n);
            let pretty = format!(
                "level        = {}\nN            = {}\nsymbols      = {}\ndim_ker_op   = {}\ndim_ker_nc   = {}\nnc_subset_op = {}",
                rep.level, rep.n, rep.symbols, rep.dim_ker_op, rep.dim_ker_nc, rep.nc_subset_op
            );
            let row = vec![
                rep.level.to_string(), rep.n.to_string(), rep.symbols.to_string(), rep.dim_ker_op.to_string(),
                rep.dim_ker_nc.to_string(), rep.nc_subset_op.to_string(),
            ];
            Ok(Output::new(json!(rep), pretty)
                .with_csv(&["level", "N", "symbols", "dim_ker_op", "dim_ker_nc", "nc_subset_op"], vec![row]))
        }
    }
}
