//! Subcommands as lists of independent items; each item yields one output record.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use phigamma_core::characters::{CharacterError, PadicCharacter};
use phigamma_core::cohomology::{
    devissage_dims, h0_rank_one, h1_rank_one, is_noncritical, is_nonexceptional, CohomologyError, CohomologyReport,
    TriangulineParameter,
};
use phigamma_core::par::Execution;
use phigamma_core::refined::{
    family_axiom_check, ingest_newforms, iwasawa_reference, theorem_gates, FamilySample, RefinedError,
};
use phigamma_core::selmer::{
    form1_check, instance_to_toml, parse_instance, primes_below, random_instance, semicontinuity_experiment, AnyInstance,
    Pid, SelmerError, SelmerInstance,
};
use serde::Serialize;
use serde_json::Value;

use crate::cache::{self, Cache};
use crate::config::{CharacterInput, Command, InstanceInput, Precision, Session};

/// Result states. Only `Error` is a failure of the run.
pub enum Failure {
    NotConverging(String),
    Ambiguous(String),
    Error(String),
}

impl From<CharacterError> for Failure {
    fn from(e: CharacterError) -> Self {
        match e {
            CharacterError::AmbiguousAtPrecision(_) => Failure::Ambiguous(e.to_string()),
            _ => Failure::Error(e.to_string()),
        }
    }
}

impl From<CohomologyError> for Failure {
    fn from(e: CohomologyError) -> Self {
        match e {
            CohomologyError::Character(c) => c.into(),
            CohomologyError::NotConverging(_) => Failure::NotConverging(e.to_string()),
            _ => Failure::Error(e.to_string()),
        }
    }
}

impl From<RefinedError> for Failure {
    fn from(e: RefinedError) -> Self {
        match e {
            RefinedError::Character(c) => c.into(),
            RefinedError::Cohomology(c) => c.into(),
            _ => Failure::Error(e.to_string()),
        }
    }
}

impl From<SelmerError> for Failure {
    fn from(e: SelmerError) -> Self {
        Failure::Error(e.to_string())
    }
}

type Job = Box<dyn Fn() -> Result<(&'static str, Value), Failure> + Send + Sync>;

pub struct Item {
    op: &'static str,
    /// shown in the record
    input: String,
    /// hashed into the cache key
    key_input: String,
    /// precision metadata; None for exact computations
    precision: Option<Value>,
    job: Job,
}

#[derive(Serialize)]
struct Record<'a> {
    op: &'a str,
    input: &'a str,
    status: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
    precision: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

/// One JSON line and its exit code (0 or 2).
pub fn evaluate(item: &Item, s: &Session, cache: Option<&Cache>) -> (String, i32) {
    let settings = to_value(&s.precision).to_string();
    let key = cache::key(item.op, &item.key_input, &settings);
    if let Some(line) = cache.and_then(|c| c.lookup(&key)) {
        return (line, 0);
    }
    let precision = item.precision.clone().unwrap_or_else(|| Value::from("exact"));
    let (status, message, result) = match (item.job)() {
        Ok((status, v)) => (status, None, Some(v)),
        Err(Failure::NotConverging(m)) => ("not_converging", Some(m), None),
        Err(Failure::Ambiguous(m)) => ("ambiguous", Some(m), None),
        Err(Failure::Error(m)) => ("error", Some(m), None),
    };
    let rec = Record { op: item.op, input: &item.input, status, message, precision, result };
    let line = serde_json::to_string(&rec).expect("record serializes");
    if status == "error" {
        return (line, 2);
    }
    if let Some(c) = cache {
        c.store(&key, &line);
    }
    (line, 0)
}

pub fn run_items(items: &[Item], s: &Session, cache: Option<&Cache>) -> Vec<(String, i32)> {
    let f = |it: &Item| evaluate(it, s, cache);
    #[cfg(feature = "parallel")]
    if s.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(s.jobs).build().expect("thread pool");
        return pool.install(|| Execution::Parallel.map(items, f));
    }
    #[cfg(not(feature = "parallel"))]
    if s.jobs > 1 {
        eprintln!("phigamma: warning: built without the parallel feature, --jobs ignored");
    }
    Execution::Sequential.map(items, f)
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn characters(inp: &CharacterInput, s: &Session) -> Result<Vec<PadicCharacter>, String> {
    let mut texts = inp.delta.clone();
    if let Some(path) = &inp.input {
        texts.extend(read(path)?.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(String::from));
    }
    if texts.is_empty() {
        return Err("no characters given (use --delta or --input)".into());
    }
    texts
        .iter()
        .map(|t| PadicCharacter::parse(t, s.precision.p, s.precision.n + 10).map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

fn cohomology_status(r: &CohomologyReport) -> &'static str {
    if r.stabilized { "ok" } else { "unstable" }
}

fn character_items(op: &'static str, inp: &CharacterInput, s: &Session) -> Result<Vec<Item>, String> {
    let (policy, t) = (s.policy, s.trunc);
    let session = to_value(&s.precision);
    Ok(characters(inp, s)?
        .into_iter()
        .map(|c| {
            let text = c.to_string();
            let job: Job = match op {
                "character" => Box::new(move || {
                    let w = c.weight(&policy)?;
                    let e = c.exceptionality(&policy)?;
                    Ok(("ok", serde_json::json!({ "weight": w, "exceptionality": e, "exceptional": e.is_exceptional() })))
                }),
                "rankone-h0" => Box::new(move || {
                    let r = h0_rank_one(&c, t, &policy, Execution::Sequential)?;
                    Ok((cohomology_status(&r), to_value(&r)))
                }),
                _ => Box::new(move || {
                    let r = h1_rank_one(&c, t, &policy, Execution::Sequential)?;
                    Ok((cohomology_status(&r), to_value(&r)))
                }),
            };
            Item { op, input: text.clone(), key_input: text, precision: Some(session.clone()), job }
        })
        .collect())
}

fn parse_primes<R: Pid>(text: &str) -> Result<Vec<R>, String> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let (b, inclusive) = match b.strip_prefix('=') {
            Some(b) => (b, true),
            None => (b, false),
        };
        let a: u64 = a.trim().parse().map_err(|_| format!("bad range start in {text:?}"))?;
        let b: u64 = b.trim().parse().map_err(|_| format!("bad range end in {text:?}"))?;
        let below = if inclusive { b + 1 } else { b };
        return primes_below(below)
            .into_iter()
            .filter(|q| *q >= BigInt::from(a))
            .map(|q| {
                let f = R::parse_element(&q.to_string()).map_err(|e| e.to_string())?;
                R::check_prime(&f).map_err(|_| "prime ranges need an integer instance".to_string())?;
                Ok(f)
            })
            .collect();
    }
    text.split(',')
        .map(|t| {
            let f = R::parse_element(t).map_err(|e| e.to_string())?;
            R::check_prime(&f).map_err(|e| e.to_string())?;
            Ok(f)
        })
        .collect()
}

fn parse_seeds(text: &str) -> Result<Vec<u64>, String> {
    let bad = || format!("bad seed list {text:?}");
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = match b.strip_prefix('=') {
            Some(b) => b.trim().parse::<u64>().map_err(|_| bad())? + 1,
            None => b.trim().parse().map_err(|_| bad())?,
        };
        return Ok((a..b).collect());
    }
    text.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

/// (display name, instance)
fn instances(inp: &InstanceInput) -> Result<Vec<(String, AnyInstance)>, String> {
    match (&inp.instance, &inp.seeds) {
        (Some(path), _) => {
            let inst = parse_instance(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
            let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
            Ok(vec![(name, inst)])
        }
        (None, Some(seeds)) => {
            Ok(parse_seeds(seeds)?.into_iter().map(|s| (format!("seed {s}"), AnyInstance::Integers(random_instance(s)))).collect())
        }
        (None, None) => Err("give --instance or --seeds".into()),
    }
}

fn selmer_items<R: Pid>(op: &'static str, name: String, inst: SelmerInstance<R>, primes: &str) -> Result<Vec<Item>, String> {
    let primes: Vec<R> = parse_primes(primes)?;
    let canon = instance_to_toml(&inst);
    if op == "selmer-sim" {
        let key_input = format!("{canon}\n{}", primes.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(","));
        let job: Job = Box::new(move || {
            let r = semicontinuity_experiment(&inst, &primes)?;
            Ok(("ok", to_value(&r)))
        });
        return Ok(vec![Item { op, input: name, key_input, precision: None, job }]);
    }
    Ok(primes
        .into_iter()
        .map(|f| {
            let inst = inst.clone();
            let input = format!("{name} at {f}");
            let key_input = format!("{canon}\n{f}");
            let job: Job = Box::new(move || {
                let r = form1_check(&inst, &f)?;
                let mut v = to_value(&r);
                v["ok"] = Value::from(r.ok());
                Ok(("ok", v))
            });
            Item { op, input, key_input, precision: None, job }
        })
        .collect())
}

fn instance_items(op: &'static str, inp: &InstanceInput) -> Result<Vec<Item>, String> {
    let mut out = Vec::new();
    for (name, inst) in instances(inp)? {
        out.extend(match inst {
            AnyInstance::Integers(i) => selmer_items(op, name, i, &inp.primes)?,
            AnyInstance::Polynomials(i) => selmer_items(op, name, i, &inp.primes)?,
        });
    }
    Ok(out)
}

fn constant(op: &'static str, input: String, status: &'static str, v: Value) -> Item {
    Item { op, key_input: input.clone(), input, precision: None, job: Box::new(move || Ok((status, v.clone()))) }
}

/// Items to evaluate, or a usage error.
pub fn build(cmd: &Command, s: &Session) -> Result<Vec<Item>, String> {
    let (policy, t) = (s.policy, s.trunc);
    match cmd {
        Command::Character(inp) => character_items("character", inp, s),
        Command::RankoneH0(inp) => character_items("rankone-h0", inp, s),
        Command::RankoneH1(inp) => character_items("rankone-h1", inp, s),
        Command::Devissage { delta, a, cross_check } => {
            let inp = CharacterInput { delta: delta.clone(), input: None };
            let chars = characters(&inp, s)?;
            if *a > chars.len() {
                return Err(format!("--a {a} exceeds the number of characters {}", chars.len()));
            }
            let param = TriangulineParameter::new(chars).map_err(|e| e.to_string())?;
            let input = param.characters().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" | ");
            let (a, cross) = (*a, *cross_check);
            let job: Job = Box::new(move || {
                let dims = devissage_dims(&param, a, &policy, cross.then_some((t, Execution::Sequential)))?;
                let weights: Vec<_> = param.weights(&policy)?.into_iter().map(|w| w.weight).collect();
                Ok((
                    "ok",
                    serde_json::json!({
                        "dims": dims,
                        "weights": weights,
                        "noncritical": is_noncritical(&param, &policy)?,
                        "nonexceptional": is_nonexceptional(&param, &policy)?,
                    }),
                ))
            });
            Ok(vec![Item { op: "devissage", key_input: format!("{input}\na={a}\ncross={cross}"), input, precision: Some(to_value(&s.precision)), job }])
        }
        Command::SelmerSim(inp) => instance_items("selmer-sim", inp),
        Command::Form1Check(inp) => instance_items("form1-check", inp),
        Command::Refine { input } => {
            let ing = ingest_newforms(input).map_err(|e| format!("{}: {e}", input.display()))?;
            let mut recs = ing.records;
            recs.sort_by(|a, b| a.label.cmp(&b.label));
            let mut items: Vec<Item> = recs
                .into_iter()
                .map(|r| {
                    let input = r.label.clone();
                    let key_input = format!("{}|{}|{}|{}|{}", r.label, r.level, r.weight, r.p, r.ap);
                    let precision = Some(to_value(&Precision { p: r.p, ..s.precision }));
                    let job: Job = Box::new(move || Ok(("ok", to_value(&theorem_gates(&r, &policy)?))));
                    Item { op: "refine", input, key_input, precision, job }
                })
                .collect();
            items.extend(ing.rejects.into_iter().map(|rj| {
                constant("refine", rj.label.clone(), "rejected", serde_json::json!({ "line": rj.line, "reason": rj.reason }))
            }));
            Ok(items)
        }
        Command::FamilyCheck { input, c } => {
            let text = read(input)?;
            let sample: FamilySample = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", input.display()))?;
            sample.validate().map_err(|e| format!("{}: {e}", input.display()))?;
            let c = *c;
            let name = input.file_name().map_or_else(|| input.display().to_string(), |n| n.to_string_lossy().into_owned());
            let key_input = format!("{}\nC={c}", serde_json::to_string(&sample).expect("sample serializes"));
            let job: Job = Box::new(move || Ok(("ok", to_value(&family_axiom_check(&sample, c)?))));
            Ok(vec![Item { op: "family-check", input: name, key_input, precision: None, job }])
        }
        Command::IwasawaTable { n } => {
            let ns = if n.is_empty() { vec![-3, -1, 1, 3, 5] } else { n.clone() };
            ns.into_iter()
                .map(|n| {
                    let row = iwasawa_reference(n).map_err(|e| e.to_string())?;
                    Ok(constant("iwasawa-table", n.to_string(), "ok", to_value(&row)))
                })
                .collect()
        }
    }
}

/// Indented key: value lines from a JSON record.
pub fn human(line: &str) -> String {
    let v: Value = serde_json::from_str(line).expect("records are JSON");
    let s = |k: &str| v[k].as_str().unwrap_or_default().to_string();
    let mut out = format!("{} [{}]: {}\n", s("op"), s("input"), s("status"));
    if let Some(m) = v["message"].as_str() {
        out += &format!("  message: {m}\n");
    }
    out += &format!("  precision: {}\n", v["precision"]);
    if let Some(obj) = v["result"].as_object() {
        for (k, x) in obj {
            out += &format!("  {k}: {x}\n");
        }
    }
    out
}
