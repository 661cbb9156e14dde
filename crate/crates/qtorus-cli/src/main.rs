mod args;
mod compute;
mod report;
mod verify;

use std::process::ExitCode;

use clap::Parser;
use qtorus::observables::{pairing_form, SlopeData};
use qtorus::torus_space::pairing;
use qtorus::tqft::bracket_s;
use serde_json::json;

use args::{parse_slope, Cli, Command, JonesArgs, LemmaScanArgs};
use compute::CliResult;
use report::Output;

const USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Compute(a) => compute::run(a).map(|o| (o, true, a.format)),
        Command::Verify(a) => verify::run(a).map(|(o, ok)| (o, ok, a.format)),
        Command::Jones(a) => jones(a).map(|o| (o, true, a.format)),
        Command::LemmaScan(a) => lemma_scan(a).map(|o| (o, true, a.format)),
    };
    match result {
        Ok((out, ok, format)) => {
            if let Err(e) = out.emit(format) {
                if e.kind() == std::io::ErrorKind::BrokenPipe {
                    return ExitCode::SUCCESS;
                }
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
    }
}

/// The `V^n`-colored slope curve between `V^k` and `V^m`, against the sum
/// of cosine pairings it expands into.
fn jones(a: &JonesArgs) -> CliResult<Output> {
    let ctx = compute::context(Some(a.level))?;
    let (p, q) = parse_slope(&a.slope)?;
    if SlopeData::new(p, q).d != 1 {
        return Err(format!("slope {p}/{q} is not primitive"));
    }
    if a.color < 1 {
        return Err(format!("color must be positive, got {}", a.color));
    }
    let bracket = bracket_s(&ctx, p, q, a.color, a.k, a.m).map_err(|e| e.to_string())?;
    let mut closed = if a.color % 2 == 1 { pairing(&ctx, a.k, a.m) } else { ctx.zero() };
    let mut j = a.color - 1;
    while j > 0 {
        closed += &pairing_form(&ctx, j * p, j * q, a.k, a.m);
        j -= 2;
    }
    let ok = bracket.clone().into_value().is_ok_and(|v| v == closed);
    let json = json!({
        "level": ctx.level(), "slope": [p, q], "color": a.color, "k": a.k, "m": a.m,
        "bracket": bracket, "bracket_exact": bracket.to_string(),
        "closed_form": closed, "closed_form_exact": closed.to_string(), "match": ok,
    });
    let pretty = format!("bracket     = {bracket}\nclosed form = {closed}\nmatch       = {ok}");
    let row = vec![
        ctx.level().to_string(), format!("{p}/{q}"), a.color.to_string(), a.k.to_string(), a.m.to_string(),
        bracket.to_string(), closed.to_string(), ok.to_string(),
    ];
    Ok(Output::new(json, pretty)
        .with_csv(&["level", "slope", "color", "k", "m", "bracket", "closed_form", "match"], vec![row]))
}

fn lemma_scan(a: &LemmaScanArgs) -> CliResult<Output> {
    if a.range < 0 {
        return Err(format!("--range must be nonnegative, got {}", a.range));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .map_err(|e| e.to_string())?;
    let rows = pool.install(|| verify::scan_rows(a.level, a.range));
    let failing: Vec<_> = rows.iter().filter(|x| !x.equal).collect();
    let pretty = format!(
        "r={} range={}: {} tuples, {} where the identity fails",
        a.level,
        a.range,
        rows.len(),
        failing.len()
    );
    let json = json!({ "levels": a.level.to_string(), "range": a.range, "rows": rows.len(), "failures": failing });
    Ok(Output::new(json, pretty).with_csv(&verify::SCAN_HEADER, verify::scan_csv(&rows)))
}
