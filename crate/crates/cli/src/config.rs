//! Command line, environment fallbacks (flag > env > default) and the validated session.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phigamma_core::cohomology::Truncation;
use phigamma_core::padic::{is_odd_prime, PrecisionPolicy};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "phigamma", version, about = "p-adic (phi, Gamma)-module, Selmer and refinement computations")]
pub struct Cli {
    #[command(flatten)]
    pub session: SessionArgs,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Args, Debug)]
pub struct SessionArgs {
    /// odd prime p
    #[arg(long, global = true, env = "PHIGAMMA_P", default_value_t = 5)]
    pub p: u32,
    /// absolute precision N
    #[arg(long, global = true, env = "PHIGAMMA_PREC", default_value_t = 20)]
    pub prec: i64,
    /// guard digits g
    #[arg(long, global = true, env = "PHIGAMMA_GUARD", default_value_t = 5)]
    pub guard: i64,
    /// truncation window K
    #[arg(long, global = true, env = "PHIGAMMA_TRUNC", default_value_t = 40)]
    pub trunc: usize,
    /// integer-recognition window w
    #[arg(long, global = true, env = "PHIGAMMA_WINDOW", default_value_t = 100)]
    pub window: i64,
    /// worker threads for per-record parallelism
    #[arg(long, global = true, env = "PHIGAMMA_JOBS", default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true, env = "PHIGAMMA_FORMAT", value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// result cache; disabled when unset
    #[arg(long, global = true, env = "PHIGAMMA_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Args, Debug)]
pub struct CharacterInput {
    /// character "p^a*u ; tors=j ; princ=v" (repeatable)
    #[arg(long)]
    pub delta: Vec<String>,
    /// file with one character per line
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InstanceInput {
    /// instance file (TOML)
    #[arg(long, conflicts_with = "seeds")]
    pub instance: Option<PathBuf>,
    /// random integer instances, e.g. 0..100
    #[arg(long)]
    pub seeds: Option<String>,
    /// a..b (primes a <= f < b), a..=b, or a comma list (polynomials allowed)
    #[arg(long)]
    pub primes: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// weight and exceptionality of characters
    Character(CharacterInput),
    /// dim H^0 of rank-one modules
    RankoneH0(CharacterInput),
    /// dim H^1 of rank-one modules
    RankoneH1(CharacterInput),
    /// dimension counts along a triangulation
    Devissage {
        /// parameter characters in filtration order
        #[arg(long, required = true)]
        delta: Vec<String>,
        #[arg(long)]
        a: usize,
        /// compute each graded H^1 instead of using the formula
        #[arg(long)]
        cross_check: bool,
    },
    /// Selmer semicontinuity over a set of primes
    SelmerSim(InstanceInput),
    /// injectivity and cokernel bound at each prime
    Form1Check(InstanceInput),
    /// newform refinement pipeline on a JSONL corpus
    Refine {
        #[arg(long)]
        input: PathBuf,
    },
    /// refined-family axioms on a sample (JSON)
    FamilyCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        c: u64,
    },
    /// dimensions of H^1_f, H^1_g, H^1_e of Q_p(n)
    IwasawaTable {
        /// odd integers (repeatable); default -3 -1 1 3 5
        #[arg(long, allow_negative_numbers = true)]
        n: Vec<i64>,
    },
}

/// Settings that change results, echoed in every p-adic record.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Precision {
    pub p: u32,
    #[serde(rename = "N")]
    pub n: i64,
    pub g: i64,
    #[serde(rename = "K")]
    pub k: usize,
    pub w: i64,
}

pub struct Session {
    pub precision: Precision,
    pub policy: PrecisionPolicy,
    pub trunc: Truncation,
    pub jobs: usize,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
}

impl Session {
    pub fn from_args(a: &SessionArgs) -> Result<Self, String> {
        if !is_odd_prime(a.p as u64) {
            return Err(format!("--p {} is not an odd prime", a.p));
        }
        let policy = PrecisionPolicy::new(a.prec, a.guard, a.window).map_err(|e| e.to_string())?;
        if a.trunc == 0 {
            return Err("--trunc must be positive".into());
        }
        if a.jobs == 0 {
            return Err("--jobs must be positive".into());
        }
        Ok(Session {
            precision: Precision { p: a.p, n: a.prec, g: a.guard, k: a.trunc, w: a.window },
            policy,
            trunc: Truncation { k: a.trunc, n: a.prec },
            jobs: a.jobs,
            format: a.format,
            cache_dir: a.cache_dir.clone(),
        })
    }
}
