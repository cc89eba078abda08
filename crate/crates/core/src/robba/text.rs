//! Canonical one-line record:
//! `p=5;tag=RPlus;window=[0,2];below=closed;above=open;floor=none;coeffs=0:*@20,1:0:1@20,2:1:3@20`
//! with each coefficient written `index:valuation:unit@precision`, or `index:*@precision` when zero.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use super::{RobbaElement, RobbaError, SubringTag};
use crate::padic::PadicScalar;

impl fmt::Display for RobbaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |c: bool| if c { "closed" } else { "open" };
        write!(
            f,
            "p={};tag={:?};window=[{},{}];below={};above={};floor={};coeffs=",
            self.p,
            self.tag,
            self.lo,
            self.hi(),
            side(self.closed_below),
            side(self.closed_above),
            self.floor.map_or("none".to_string(), |x| x.to_string())
        )?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            let i = self.lo + k as i64;
            match c.valuation() {
                None => write!(f, "{i}:*@{}", c.abs_precision())?,
                Some(v) => write!(f, "{i}:{v}:{}@{}", c.unit_digits(), c.abs_precision())?,
            }
        }
        Ok(())
    }
}

fn bad(msg: impl Into<String>) -> RobbaError {
    RobbaError::Parse(msg.into())
}

fn parse_tag(s: &str) -> Result<SubringTag, RobbaError> {
    Ok(match s {
        "FullRobba" => SubringTag::FullRobba,
        "RPlus" => SubringTag::RPlus,
        "EDagger" => SubringTag::EDagger,
        "EPlus" => SubringTag::EPlus,
        _ => return Err(bad(format!("unknown tag {s}"))),
    })
}

fn parse_side(s: &str) -> Result<bool, RobbaError> {
    match s {
        "closed" => Ok(true),
        "open" => Ok(false),
        _ => Err(bad(format!("expected closed/open, got {s}"))),
    }
}

impl FromStr for RobbaElement {
    type Err = RobbaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut fields = std::collections::HashMap::new();
        for part in s.trim().split(';') {
            let (k, v) = part.split_once('=').ok_or_else(|| bad(format!("field without '=': {part}")))?;
            fields.insert(k.trim(), v.trim());
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| bad(format!("missing field {k}")));
        let p: u32 = get("p")?.parse().map_err(|_| bad("bad prime"))?;
        let tag = parse_tag(get("tag")?)?;
        let win = get("window")?.trim_start_matches('[').trim_end_matches(']');
        let (lo, hi) = win.split_once(',').ok_or_else(|| bad("bad window"))?;
        let lo: i64 = lo.trim().parse().map_err(|_| bad("bad window start"))?;
        let hi: i64 = hi.trim().parse().map_err(|_| bad("bad window end"))?;
        let below = parse_side(get("below")?)?;
        let above = parse_side(get("above")?)?;
        let floor = match get("floor")? {
            "none" => None,
            x => Some(x.parse::<i64>().map_err(|_| bad("bad floor"))?),
        };
        let mut coeffs = Vec::new();
        for (k, item) in get("coeffs")?.split(',').enumerate() {
            let (head, prec) = item.rsplit_once('@').ok_or_else(|| bad(format!("coefficient without precision: {item}")))?;
            let prec: i64 = prec.parse().map_err(|_| bad("bad precision"))?;
            let mut it = head.split(':');
            let idx: i64 = it.next().unwrap_or("").parse().map_err(|_| bad("bad index"))?;
            if idx != lo + k as i64 {
                return Err(bad(format!("index {idx} out of sequence")));
            }
            let c = match (it.next(), it.next()) {
                (Some("*"), None) => PadicScalar::zero(p, prec),
                (Some(v), Some(u)) => {
                    let v: i64 = v.parse().map_err(|_| bad("bad valuation"))?;
                    let u: BigUint = u.parse().map_err(|_| bad("bad unit digits"))?;
                    if &u % BigUint::from(p) == BigUint::from(0u32) {
                        return Err(bad("unit digits divisible by p"));
                    }
                    PadicScalar::from_parts(p, v, u, prec)
                }
                _ => return Err(bad(format!("bad coefficient {item}"))),
            };
            coeffs.push(c);
        }
        if lo + coeffs.len() as i64 - 1 != hi {
            return Err(bad("window does not match coefficient count"));
        }
        let mut out = RobbaElement::new(p, lo, coeffs, tag, below, above)?;
        if let Some(fl) = floor {
            out = out.with_floor(fl)?;
        }
        Ok(out)
    }
}
