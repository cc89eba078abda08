//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use phigamma_core::characters::PadicCharacter;
use phigamma_core::cohomology::{
    d1, d2, devissage_dims, h0_rank_one, h1_rank_one, is_nonexceptional, solve_neumann, Dim, Method,
    TriangulineParameter, Truncation,
};
use phigamma_core::padic::{PadicScalar, PrecisionPolicy};
use phigamma_core::par::Execution;
use phigamma_core::refined::{iwasawa_reference, theorem_gates, NewformRecord};
use phigamma_core::robba::{phi_act, psi_act, psi_zero_basis, GaussWeight, RobbaElement, SubringTag};
use phigamma_core::selmer::{form1_check, primes_below, random_instance, semicontinuity_experiment, two_torsion_instance};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

const P: u32 = 5;
const N: i64 = 20;
const G: i64 = 5;
const T: Truncation = Truncation { k: 40, n: N };

type Outcome = Result<(), String>;

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::new(N, G, 100).unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn check<S: Strategy>(cases: u32, s: S, f: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Outcome {
    let cfg = Config { cases, failure_persistence: None, max_global_rejects: 100_000, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(cfg, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&s, f).map_err(|e| e.to_string())
}

fn small_prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![3u32, 5, 7])
}

fn ch(s: &str) -> PadicCharacter {
    PadicCharacter::parse(s, P, N + 10).unwrap()
}

const H0_ZERO: [&str; 10] = [
    "2 ; tors=0 ; princ=1",
    "p^1*2 ; tors=0 ; princ=1",
    "3 ; tors=0 ; princ=1",
    "p^-1*2 ; tors=0 ; princ=1",
    "1 ; tors=1 ; princ=1",
    "p^2*3 ; tors=2 ; princ=1",
    "p^-1*3 ; tors=2 ; princ=11",
    "2 ; tors=3 ; princ=(1+p)^1/2",
    "p^3 ; tors=1 ; princ=1",
    "p^-2*7 ; tors=0 ; princ=6",
];

const H1_ONE: [&str; 10] = [
    "p^-1*(0+1*sqrt(5)) ; tors=0 ; princ=1",
    "p^-1*(0+2*sqrt(5)) ; tors=1 ; princ=1",
    "p^-1*(0+3*sqrt(-5)) ; tors=2 ; princ=1",
    "p^-1*(5+1*sqrt(5)) ; tors=0 ; princ=6",
    "p^-1*(0+1*sqrt(10)) ; tors=0 ; princ=1",
    "p^-1*(0+7*sqrt(-10)) ; tors=3 ; princ=11",
    "p^-1*(0+1*sqrt(15)) ; tors=1 ; princ=1/6",
    "p^-1*(25+4*sqrt(5)) ; tors=0 ; princ=(1+p)^1/2",
    "p^-1*(0+1*sqrt(-15)) ; tors=2 ; princ=(1+p)^3",
    "p^-1*(0+2*sqrt(10)) ; tors=0 ; princ=1",
];

fn rank_one_h0() -> Outcome {
    let one = [PadicCharacter::trivial(P, N + 10), PadicCharacter::power(-1, P, N + 10), PadicCharacter::power(-2, P, N + 10)];
    let zero = H0_ZERO.iter().map(|s| ch(s));
    for (d, want) in one.into_iter().map(|d| (d, 1)).chain(zero.map(|d| (d, 0))) {
        let t0 = Instant::now();
        let r = h0_rank_one(&d, T, &policy(), Execution::default()).map_err(|e| format!("{d}: {e}"))?;
        ensure(r.h0_dim == Some(Dim::Value(want)), format!("{d}: h0 {:?}, want {want}", r.h0_dim))?;
        ensure(r.stabilized, format!("{d}: not stabilized"))?;
        ensure(t0.elapsed() < Duration::from_secs(60), format!("{d}: too slow"))?;
    }
    Ok(())
}

fn rank_one_h1() -> Outcome {
    for s in H1_ONE {
        let d = ch(s);
        let v = d.value_at_p().val().unwrap();
        ensure(v > (-1).into() && v < 0.into(), format!("{s}: slope {v}"))?;
        ensure(!d.is_exceptional(&policy()).unwrap(), format!("{s}: exceptional"))?;
        let r = h1_rank_one(&d, T, &policy(), Execution::default()).map_err(|e| format!("{s}: {e}"))?;
        ensure(r.h1_dim == Some(Dim::Value(1)), format!("{s}: h1 {:?}", r.h1_dim))?;
        ensure(r.method == Method::BothAgree && r.stabilized && !r.exploratory, format!("{s}: {:?}", r.method))?;
    }
    let r = h1_rank_one(&PadicCharacter::trivial(P, N + 10), Truncation { k: 12, n: N }, &policy(), Execution::default())
        .map_err(|e| e.to_string())?;
    ensure(r.exceptional && r.exploratory, "trivial character not flagged exploratory")
}

fn size(x: &PadicScalar) -> i64 {
    x.valuation().unwrap_or(x.abs_precision())
}

fn complex_identities() -> Outcome {
    let character = |p: u32| {
        (-1i64..=2, 1i64..200, 0i64..6, 0i64..40).prop_filter_map("unit", move |(a, u, j, r)| {
            if u % p as i64 == 0 {
                return None;
            }
            PadicCharacter::parse(&format!("p^{a}*{u} ; tors={j} ; princ=(1+p)^{r}"), p, N + 20).ok()
        })
    };
    let series = |p: u32| {
        prop::collection::vec(-500i64..500, 8).prop_map(move |cs| {
            RobbaElement::series(p, cs.into_iter().map(|c| PadicScalar::from_i64(c, p, N + 10)).collect()).unwrap()
        })
    };
    check(1000, small_prime().prop_flat_map(move |p| (character(p), series(p))), |(d, c)| {
        let z = d2(&d1(&c, &d).unwrap(), &d).unwrap();
        prop_assert!(z.coeffs().iter().all(|x| size(x) >= N - G), "{d}");
        Ok(())
    })?;
    let inputs = small_prime().prop_flat_map(|p| (Just(p), -1i64..=1, 1i64..1000, 0usize..2, prop::collection::vec(-50i64..50, 12)));
    check(1000, inputs, |(p, a, u, extra, cs)| {
        prop_assume!(u % p as i64 != 0);
        let work = 4 * N + 40;
        let alpha = PadicScalar::from_parts(p, a, 1u32.into(), work).mul_ref(&PadicScalar::from_i64(u, p, work));
        let k = ((-a).max(-1) + 1) as usize + extra;
        let coeffs = cs.iter().enumerate().map(|(i, &c)| PadicScalar::from_i64(if i < k { 0 } else { c }, p, work)).collect();
        let b = RobbaElement::series(p, coeffs).unwrap();
        let c = solve_neumann(&alpha, k, &b, N).unwrap();
        let r = phi_act(&c).unwrap().restrict(0, c.hi()).unwrap().scale(&alpha).sub(&c).unwrap().sub(&b).unwrap();
        prop_assert!(r.coeffs().iter().all(|x| size(x) >= N - G), "alpha = {alpha}");
        Ok(())
    })
}

fn poly(p: u32, cs: &[i64]) -> RobbaElement {
    RobbaElement::polynomial(p, cs.iter().map(|&c| PadicScalar::from_i64(c, p, N)).collect()).unwrap()
}

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-1000i64..1000, 1..=max_len)
}

fn psi_phi_algebra() -> Outcome {
    check(500, small_prime().prop_flat_map(|p| (Just(p), coeffs(8))), |(p, f)| {
        let f = poly(p, &f);
        prop_assert!(psi_act(&phi_act(&f).unwrap()).unwrap().agrees_with(&f, N));
        Ok(())
    })?;
    check(500, small_prime().prop_flat_map(|p| (Just(p), coeffs(4), coeffs(12))), |(p, f, g)| {
        let (f, g) = (poly(p, &f), poly(p, &g));
        let lhs = psi_act(&phi_act(&f).unwrap().mul(&g).unwrap()).unwrap();
        prop_assert!(lhs.agrees_with(&f.mul(&psi_act(&g).unwrap()).unwrap(), N));
        Ok(())
    })?;
    let inputs = small_prime().prop_flat_map(|p| (Just(p), coeffs(4), prop::collection::vec(-20i64..20, 30)));
    check(500, inputs, |(p, f, ws)| {
        let mut e = poly(p, &[0]);
        for (b, &w) in psi_zero_basis(3 * p as usize, p, N).unwrap().iter().zip(&ws) {
            e = e.add(&b.scale(&PadicScalar::from_i64(w, p, N))).unwrap();
        }
        prop_assert!(psi_act(&e).unwrap().is_negligible(0));
        let fe = e.mul(&phi_act(&poly(p, &f)).unwrap()).unwrap();
        prop_assert!(psi_act(&fe).unwrap().is_negligible(0));
        Ok(())
    })
}

fn gauss_valuation() -> Outcome {
    let laurent = |p: u32, lo: i64, cs: &[i64]| {
        let cs = cs.iter().map(|&c| PadicScalar::from_i64(c, p, 40)).collect();
        RobbaElement::new(p, lo, cs, SubringTag::FullRobba, true, true).unwrap()
    };
    for s in [Rational64::new(1, 2), Rational64::from_integer(1), Rational64::from_integer(2)] {
        let w = GaussWeight::new(s).map_err(|e| e.to_string())?;
        let inputs = small_prime().prop_flat_map(|p| (Just(p), -3i64..3, coeffs(6), -3i64..3, coeffs(6)));
        check(500, inputs, |(p, lo1, f, lo2, g)| {
            prop_assume!(f.iter().any(|&c| c != 0) && g.iter().any(|&c| c != 0));
            let (a, b) = (laurent(p, lo1, &f), laurent(p, lo2, &g));
            let (wa, wb) = (a.gauss_valuation(w).value.unwrap(), b.gauss_valuation(w).value.unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().gauss_valuation(w).value, Some(wa + wb));
            if let Some(ws) = a.add(&b).unwrap().gauss_valuation(w).value {
                prop_assert!(ws >= wa.min(wb));
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn selmer_semicontinuity() -> Outcome {
    let t0 = Instant::now();
    let primes = primes_below(200);
    let mut rows = 0;
    for seed in 0..100 {
        let r = semicontinuity_experiment(&random_instance(seed), &primes).map_err(|e| e.to_string())?;
        ensure(r.lower_bound_holds, format!("seed {seed}: lower bound"))?;
        ensure(r.prediction_matches, format!("seed {seed}: exceptional set {:?}", r.observed_exceptional))?;
        rows += r.rows.iter().filter(|row| row.hypothesis).count();
    }
    ensure(rows > 1000, format!("only {rows} rows satisfy the hypothesis"))?;
    let r = semicontinuity_experiment(&two_torsion_instance(), &primes).map_err(|e| e.to_string())?;
    let jump = r.rows.iter().any(|row| row.prime == "2" && row.hypothesis && row.dim_selmer_f > r.generic_rank);
    ensure(jump, "engineered instance does not jump at 2")?;
    ensure(t0.elapsed() < Duration::from_secs(300), "over 5 minutes")
}

fn form1_bound() -> Outcome {
    let primes = primes_below(200);
    for seed in 0..100 {
        let inst = random_instance(seed);
        for f in &primes {
            let rep = form1_check(&inst, f).map_err(|e| e.to_string())?;
            ensure(rep.ok(), format!("seed {seed}, f = {f}: {rep:?}"))?;
        }
    }
    Ok(())
}

/// a_p of the level 11 curve y^2 + y = x^3 - x^2 - 10x - 20, by counting points.
fn point_count_ap(p: i64) -> i64 {
    let affine = (0..p)
        .flat_map(|x| (0..p).map(move |y| (x, y)))
        .filter(|&(x, y)| (y * y + y) % p == ((x * x % p) * x - x * x - 10 * x - 20).rem_euclid(p))
        .count() as i64;
    p - affine
}

fn newform_pipeline() -> Outcome {
    let pol = PrecisionPolicy::new(30, G, 100).unwrap();
    let rec = |p: u32| {
        let ap = point_count_ap(p as i64);
        NewformRecord::new("11a", 11, 2, p, BigRational::from_integer(BigInt::from(ap))).map(|r| (ap, r))
    };
    let (ap, r19) = rec(19).map_err(|e| e.to_string())?;
    ensure(ap == 0, format!("point count gives a_19 = {ap}"))?;
    let rep = theorem_gates(&r19, &pol).map_err(|e| e.to_string())?;
    ensure(rep.slopes == ["1/2", "1/2"] && rep.supersingular, format!("slopes {:?}", rep.slopes))?;
    ensure(rep.slopes_normalized == ["-1/2", "-1/2"] && rep.weak_admissibility_ok == Some(true), "weak admissibility")?;
    ensure(rep.nonexceptional_ok == Some(true) && rep.noncritical_ok == Some(true), "gates")?;
    ensure(rep.pot_dim == Some(1) && rep.verdict.eligible, format!("{:?}", rep.verdict))?;
    let (ap, r5) = rec(5).map_err(|e| e.to_string())?;
    ensure(ap == 1, format!("point count gives a_5 = {ap}"))?;
    let rep = theorem_gates(&r5, &pol).map_err(|e| e.to_string())?;
    ensure(rep.ordinary && !rep.verdict.eligible && rep.verdict.reasons == ["ordinary"], format!("{:?}", rep.verdict))
}

fn devissage() -> Outcome {
    let pol = policy();
    let character = |p: u32| {
        (-3i64..=3, 1i64..100, 0i64..8, -30i64..30, 1i64..4).prop_filter_map("unit", move |(a, u, j, r, q)| {
            if u % p as i64 == 0 {
                return None;
            }
            PadicCharacter::parse(&format!("p^{a}*{u} ; tors={j} ; princ=(1+p)^{r}/{q}"), p, N + 10).ok()
        })
    };
    let params = prop::sample::select(vec![3u32, 5, 7, 11]).prop_flat_map(move |p| prop::collection::vec(character(p), 1..=5));
    check(200, params, |cs| {
        let param = TriangulineParameter::new(cs).unwrap();
        prop_assume!(is_nonexceptional(&param, &pol).unwrap_or(false));
        for a in 0..=param.dim() {
            let r = devissage_dims(&param, a, &pol, None).unwrap();
            prop_assert_eq!(r.pot_dim, a);
            prop_assert_eq!(r.h1_fil_a + r.h1_quotient, r.h1_total);
        }
        Ok(())
    })
}

fn iwasawa() -> Outcome {
    let want = [(-3, (0, 0, 0)), (-1, (0, 0, 0)), (1, (0, 1, 0)), (3, (1, 1, 1)), (5, (1, 1, 1))];
    for (n, dims) in want {
        let r = iwasawa_reference(n).map_err(|e| e.to_string())?;
        ensure((r.h1f_dim, r.h1g_dim, r.h1e_dim) == dims, format!("n = {n}"))?;
    }
    Ok(())
}

fn suite_output(jobs: &str) -> Result<Vec<u8>, String> {
    let fx = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let f = |name: &str| fx.join(name).to_string_lossy().into_owned();
    let runs: Vec<Vec<String>> = vec![
        vec!["character".into(), "--input".into(), f("characters.txt")],
        vec!["rankone-h0".into(), "--input".into(), f("characters.txt")],
        vec!["rankone-h1".into(), "--delta".into(), H1_ONE[0].into(), "--delta".into(), H1_ONE[2].into(), "--delta".into(), H0_ZERO[0].into()],
        vec!["devissage".into(), "--delta".into(), H1_ONE[0].into(), "--delta".into(), H0_ZERO[0].into(), "--a".into(), "1".into()],
        vec!["selmer-sim".into(), "--instance".into(), f("demo.inst"), "--primes".into(), "2..50".into()],
        vec!["selmer-sim".into(), "--instance".into(), f("poly.inst"), "--primes".into(), "x,x - 1,x^2 + 1,x + 1".into()],
        vec!["selmer-sim".into(), "--seeds".into(), "0..100".into(), "--primes".into(), "2..200".into()],
        vec!["form1-check".into(), "--seeds".into(), "0..10".into(), "--primes".into(), "2..50".into()],
        vec!["refine".into(), "--input".into(), f("newforms.jsonl")],
        vec!["family-check".into(), "--input".into(), f("family.json"), "--c".into(), "1".into()],
        vec!["iwasawa-table".into()],
    ];
    let mut out = Vec::new();
    for args in runs {
        let o = Command::new(env!("CARGO_BIN_EXE_phigamma"))
            .args(&args)
            .args(["--jobs", jobs])
            .env_remove("PHIGAMMA_CACHE_DIR")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(o.status.code() == Some(0), format!("{args:?} exited {:?}", o.status.code()))?;
        out.extend(o.stdout);
    }
    Ok(out)
}

fn determinism() -> Outcome {
    let a = suite_output("1")?;
    let b = suite_output("1")?;
    let c = suite_output("4")?;
    ensure(!a.is_empty(), "empty output")?;
    ensure(a == b, "repeated runs differ")?;
    ensure(a == c, "--jobs 4 differs from --jobs 1")
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("rank-one H0 dimensions", rank_one_h0),
        ("rank-one H1 dimensions", rank_one_h1),
        ("complex identities", complex_identities),
        ("psi/phi algebra", psi_phi_algebra),
        ("Gauss valuation", gauss_valuation),
        ("Selmer semicontinuity", selmer_semicontinuity),
        ("injectivity and cokernel bound", form1_bound),
        ("newform pipeline", newform_pipeline),
        ("devissage counts", devissage),
        ("Iwasawa table", iwasawa),
        ("determinism across runs and --jobs 4", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t0.elapsed().as_secs_f64();
        match res {
            Ok(()) => println!("criterion {:>2} PASS  {name} ({secs:.1}s)", i + 1),
            Err(m) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {m}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
