use std::time::{Duration, Instant};

use phigamma_core::characters::PadicCharacter;
use phigamma_core::cohomology::{h0_rank_one, h1_rank_one, Dim, Method, Truncation};
use phigamma_core::padic::PrecisionPolicy;
use phigamma_core::par::Execution;

const P: u32 = 5;
const N: i64 = 20;
const T: Truncation = Truncation { k: 40, n: N };

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::new(N, 5, 100).unwrap()
}

fn ch(s: &str) -> PadicCharacter {
    PadicCharacter::parse(s, P, N + 10).unwrap()
}

pub const H0_ZERO: [&str; 10] = [
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

pub const H1_ONE: [&str; 10] = [
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

fn h0(d: &PadicCharacter) -> (Dim, bool, Duration) {
    let t0 = Instant::now();
    let r = h0_rank_one(d, T, &policy(), Execution::default()).unwrap();
    (r.h0_dim.unwrap(), r.stabilized, t0.elapsed())
}

#[test]
fn h0_is_one_for_negative_powers_of_x() {
    for d in [PadicCharacter::trivial(P, N + 10), PadicCharacter::power(-1, P, N + 10), PadicCharacter::power(-2, P, N + 10)] {
        let (dim, stable, dt) = h0(&d);
        assert_eq!(dim, Dim::Value(1), "{d}");
        assert!(stable && dt < Duration::from_secs(60));
    }
}

#[test]
fn h0_vanishes_on_nonexceptional_characters() {
    for s in H0_ZERO {
        let d = ch(s);
        assert!(!d.is_exceptional(&policy()).unwrap(), "{s}");
        let (dim, stable, dt) = h0(&d);
        assert_eq!(dim, Dim::Value(0), "{s}");
        assert!(stable && dt < Duration::from_secs(60));
    }
}

#[test]
fn h1_is_one_for_slopes_in_the_open_interval() {
    for s in H1_ONE {
        let d = ch(s);
        let v = d.value_at_p().val().unwrap();
        assert!(v > (-1).into() && v < 0.into(), "{s}");
        assert!(!d.is_exceptional(&policy()).unwrap(), "{s}");
        let r = h1_rank_one(&d, T, &policy(), Execution::default()).unwrap();
        assert_eq!(r.h1_dim, Some(Dim::Value(1)), "{s}: {:?}", r.h1_detail);
        assert_eq!(r.method, Method::BothAgree, "{s}");
        assert!(r.stabilized && !r.exploratory);
    }
}

#[test]
fn exceptional_characters_are_exploratory() {
    for d in [PadicCharacter::trivial(P, N + 10), PadicCharacter::power_times_norm(1, P, N + 10)] {
        let r = h1_rank_one(&d, Truncation { k: 12, n: N }, &policy(), Execution::default()).unwrap();
        assert!(r.exceptional && r.exploratory);
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let d = ch(H1_ONE[3]);
    let t = Truncation { k: 16, n: N };
    let a = h1_rank_one(&d, t, &policy(), Execution::Sequential).unwrap();
    let b = h1_rank_one(&d, t, &policy(), Execution::Parallel).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
