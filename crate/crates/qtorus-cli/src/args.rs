use std::fmt;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qtorus", version, about = "Exact computations with quantized torus observables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute a single exact value.
    Compute(ComputeArgs),
    /// Run a verification sweep; exit 0 on pass, 1 on failure.
    Verify(VerifyArgs),
    /// Bracket of a colored torus link against its closed form.
    Jones(JonesArgs),
    /// Check the Gauss-sum identity on a box of tuples and emit CSV.
    LemmaScan(LemmaScanArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

/// A single level `r` or an inclusive range `a..b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Levels {
    pub lo: i64,
    pub hi: i64,
}

impl Levels {
    pub fn iter(self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn single(self) -> Option<i64> {
        (self.lo == self.hi).then_some(self.lo)
    }
}

impl FromStr for Levels {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |x: &str| x.trim().parse::<i64>().map_err(|_| format!("not an integer: {x:?}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let r = parse(s)?;
                (r, r)
            }
        };
        if lo < 3 {
            return Err(format!("level must be at least 3, got {lo}"));
        }
        if hi < lo {
            return Err(format!("empty level range {lo}..{hi}"));
        }
        Ok(Levels { lo, hi })
    }
}

impl fmt::Display for Levels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.single() {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "{}..{}", self.lo, self.hi),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ComputeOp {
    #[value(name = "c-matrix")]
    CMatrix,
    #[value(name = "s-matrix-op")]
    SMatrixOp,
    #[value(name = "pairing-form")]
    PairingForm,
    Bracket,
    Lemma,
    Cfrac,
    #[value(name = "nc-cosine")]
    NcCosine,
    #[value(name = "kernel-compare")]
    KernelCompare,
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    pub op: ComputeOp,
    #[arg(short = 'r', long = "level")]
    pub level: Option<Levels>,
    #[arg(short, allow_negative_numbers = true)]
    pub p: Option<i64>,
    #[arg(short, allow_negative_numbers = true)]
    pub q: Option<i64>,
    #[arg(short, allow_negative_numbers = true)]
    pub k: Option<i64>,
    #[arg(short, allow_negative_numbers = true)]
    pub m: Option<i64>,
    /// Truncation bound for kernel-compare.
    #[arg(short = 'N', long = "bound")]
    pub bound: Option<u32>,
    #[arg(long, value_enum, default_value = "pretty")]
    pub format: Format,
    /// Positional integers: `p q` for cfrac, `a b c d e` for lemma.
    #[arg(allow_negative_numbers = true)]
    pub values: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    #[value(name = "product-to-sum")]
    ProductToSum,
    #[value(name = "thm2-consistency")]
    Thm2Consistency,
    #[value(name = "pipeline-vs-closed-form")]
    PipelineVsClosedForm,
    #[value(name = "lemma-scan")]
    LemmaScan,
    #[value(name = "nc-torus")]
    NcTorus,
    Associativity,
    Cfrac,
    #[value(name = "reduction-oracle")]
    ReductionOracle,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub suite: Suite,
    #[arg(short = 'r', long = "level")]
    pub level: Option<Levels>,
    /// Bound on the integer parameters of the sweep.
    #[arg(long)]
    pub bound: Option<i64>,
    #[arg(long)]
    pub slope_bound: Option<i64>,
    #[arg(long)]
    pub d_max: Option<i64>,
    /// Box size for the lemma scan.
    #[arg(long)]
    pub range: Option<i64>,
    /// Number of sampled triples for the associativity suite.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "pretty")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct JonesArgs {
    #[arg(short = 'r', long = "level")]
    pub level: Levels,
    /// Primitive slope `p/q`.
    #[arg(long, allow_hyphen_values = true)]
    pub slope: String,
    #[arg(long, default_value_t = 1)]
    pub color: i64,
    #[arg(long, allow_negative_numbers = true)]
    pub k: i64,
    #[arg(long, allow_negative_numbers = true)]
    pub m: i64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct LemmaScanArgs {
    #[arg(short = 'r', long = "level")]
    pub level: Levels,
    #[arg(long, default_value_t = 3)]
    pub range: i64,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

/// Parses `p/q` into a pair.
pub fn parse_slope(s: &str) -> Result<(i64, i64), String> {
    let (p, q) = s.split_once('/').ok_or_else(|| format!("slope must look like p/q, got {s:?}"))?;
    let p = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let q = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    Ok((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels_parse() {
        assert_eq!("4".parse::<Levels>().unwrap(), Levels { lo: 4, hi: 4 });
        assert_eq!("3..8".parse::<Levels>().unwrap(), Levels { lo: 3, hi: 8 });
        assert_eq!("3..=5".parse::<Levels>().unwrap(), Levels { lo: 3, hi: 5 });
        assert!("2".parse::<Levels>().is_err());
        assert!("6..4".parse::<Levels>().is_err());
        assert!("x".parse::<Levels>().is_err());
    }

    #[test]
    fn slope_parse() {
        assert_eq!(parse_slope("3/-2").unwrap(), (3, -2));
        assert!(parse_slope("3").is_err());
    }
}
