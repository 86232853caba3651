//! Sets of times `S ⊆ ℕ` to be generated, written `f(n)` for `{ f(n) | n >= 1 }`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SequenceSpec {
    /// `n^k`
    Power(u32),
    /// `scale * base^n + offset`
    Exponential { base: u64, scale: i64, offset: i64 },
    Fibonacci,
    Primes,
    /// `a * n + b`
    Linear { a: i64, b: i64 },
    Explicit(BTreeSet<u64>),
}

impl SequenceSpec {
    pub fn cube() -> Self {
        SequenceSpec::Power(3)
    }

    pub fn square() -> Self {
        SequenceSpec::Power(2)
    }

    /// All members `<= horizon`, in increasing order.
    pub fn members_upto(&self, horizon: u64) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        match self {
            SequenceSpec::Power(k) => {
                for n in 1u64.. {
                    match n.checked_pow(*k) {
                        Some(v) if v <= horizon => {
                            out.insert(v);
                        }
                        _ => break,
                    }
                    if *k == 0 {
                        break;
                    }
                }
            }
            SequenceSpec::Exponential { base, scale, offset } => {
                let mut pow: i128 = *base as i128;
                for _ in 0..128 {
                    let v = *scale as i128 * pow + *offset as i128;
                    if v > horizon as i128 && *scale >= 0 && *base >= 1 {
                        break;
                    }
                    if (0..=horizon as i128).contains(&v) {
                        out.insert(v as u64);
                    }
                    pow = pow.saturating_mul(*base as i128);
                    if *base <= 1 {
                        break;
                    }
                }
            }
            SequenceSpec::Fibonacci => {
                let (mut a, mut b) = (1u64, 2u64);
                while a <= horizon {
                    out.insert(a);
                    let c = a.saturating_add(b);
                    a = b;
                    b = c;
                }
            }
            SequenceSpec::Primes => {
                if horizon >= 2 {
                    let h = horizon as usize;
                    let mut sieve = vec![true; h + 1];
                    sieve[0] = false;
                    sieve[1] = false;
                    let mut i = 2;
                    while i * i <= h {
                        if sieve[i] {
                            let mut j = i * i;
                            while j <= h {
                                sieve[j] = false;
                                j += i;
                            }
                        }
                        i += 1;
                    }
                    out.extend(sieve.iter().enumerate().filter(|(_, &p)| p).map(|(i, _)| i as u64));
                }
            }
            SequenceSpec::Linear { a, b } => {
                for n in 1i64.. {
                    let v = a.saturating_mul(n).saturating_add(*b);
                    if v > horizon as i64 {
                        break;
                    }
                    if v >= 0 {
                        out.insert(v as u64);
                    }
                    if *a == 0 {
                        break;
                    }
                }
            }
            SequenceSpec::Explicit(set) => {
                out.extend(set.range(..=horizon));
            }
        }
        out
    }

    pub fn contains(&self, t: u64) -> bool {
        self.members_upto(t).contains(&t)
    }

    /// Membership bitmap over `[0, horizon]`.
    pub fn indicator(&self, horizon: u64) -> Vec<bool> {
        let members = self.members_upto(horizon);
        (0..=horizon).map(|t| members.contains(&t)).collect()
    }
}

/// Builds a sequence from a kind name and integer parameters.
///
/// Kinds: `cube`, `square`, `power k`, `pow2` (2^n), `pow2-minus-1`
/// (2^n - 1), `pow2-double-minus-2` (2^(n+1) - 2), `pow3` (3^n),
/// `exponential base scale offset`, `fibonacci`, `primes`, `linear a b`,
/// `list v...`.
pub fn builtin_sequence(kind: &str, params: &[i64]) -> Result<SequenceSpec> {
    let want = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::SequenceParams(format!("`{kind}` takes {n} parameter(s), got {}", params.len())))
        }
    };
    let seq = match kind {
        "cube" => {
            want(0)?;
            SequenceSpec::Power(3)
        }
        "square" => {
            want(0)?;
            SequenceSpec::Power(2)
        }
        "power" => {
            want(1)?;
            if params[0] < 1 {
                return Err(Error::SequenceParams("power exponent must be >= 1".into()));
            }
            SequenceSpec::Power(params[0] as u32)
        }
        "pow2" => {
            want(0)?;
            SequenceSpec::Exponential { base: 2, scale: 1, offset: 0 }
        }
        "pow2-minus-1" => {
            want(0)?;
            SequenceSpec::Exponential { base: 2, scale: 1, offset: -1 }
        }
        "pow2-double-minus-2" => {
            want(0)?;
            SequenceSpec::Exponential { base: 2, scale: 2, offset: -2 }
        }
        "pow3" => {
            want(0)?;
            SequenceSpec::Exponential { base: 3, scale: 1, offset: 0 }
        }
        "exponential" => {
            want(3)?;
            if params[0] < 2 || params[1] < 1 {
                return Err(Error::SequenceParams("exponential needs base >= 2 and scale >= 1".into()));
            }
            SequenceSpec::Exponential { base: params[0] as u64, scale: params[1], offset: params[2] }
        }
        "fibonacci" => {
            want(0)?;
            SequenceSpec::Fibonacci
        }
        "primes" => {
            want(0)?;
            SequenceSpec::Primes
        }
        "linear" => {
            want(2)?;
            if params[0] < 1 {
                return Err(Error::SequenceParams("linear slope must be >= 1".into()));
            }
            SequenceSpec::Linear { a: params[0], b: params[1] }
        }
        "list" => {
            if params.iter().any(|&v| v < 0) {
                return Err(Error::SequenceParams("list members must be non-negative".into()));
            }
            SequenceSpec::Explicit(params.iter().map(|&v| v as u64).collect())
        }
        other => return Err(Error::UnknownSequence(other.to_string())),
    };
    Ok(seq)
}

impl FromStr for SequenceSpec {
    type Err = Error;

    /// `kind` or `kind:p1,p2,...`, e.g. `cube`, `linear:2,-1`, `list:1,3,7`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let params = rest
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<i64>().map_err(|_| Error::SequenceParams(format!("bad number `{p}`"))))
            .collect::<Result<Vec<_>>>()?;
        builtin_sequence(kind.trim(), &params)
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::Power(2) => write!(f, "square"),
            SequenceSpec::Power(3) => write!(f, "cube"),
            SequenceSpec::Power(k) => write!(f, "power:{k}"),
            SequenceSpec::Exponential { base: 2, scale: 1, offset: 0 } => write!(f, "pow2"),
            SequenceSpec::Exponential { base: 2, scale: 1, offset: -1 } => write!(f, "pow2-minus-1"),
            SequenceSpec::Exponential { base: 2, scale: 2, offset: -2 } => write!(f, "pow2-double-minus-2"),
            SequenceSpec::Exponential { base: 3, scale: 1, offset: 0 } => write!(f, "pow3"),
            SequenceSpec::Exponential { base, scale, offset } => write!(f, "exponential:{base},{scale},{offset}"),
            SequenceSpec::Fibonacci => write!(f, "fibonacci"),
            SequenceSpec::Primes => write!(f, "primes"),
            SequenceSpec::Linear { a, b } => write!(f, "linear:{a},{b}"),
            SequenceSpec::Explicit(set) => {
                let v: Vec<String> = set.iter().map(u64::to_string).collect();
                write!(f, "list:{}", v.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn upto(s: &SequenceSpec, h: u64) -> Vec<u64> {
        s.members_upto(h).into_iter().collect()
    }

    #[test]
    fn cube_members() {
        let c = builtin_sequence("cube", &[]).unwrap();
        assert_eq!(upto(&c, 130), vec![1, 8, 27, 64, 125]);
        assert!(!c.contains(0));
        assert!(c.contains(1));
    }

    #[test]
    fn linear_two_n_minus_one() {
        let s = builtin_sequence("linear", &[2, -1]).unwrap();
        assert_eq!(upto(&s, 9), vec![1, 3, 5, 7, 9]);
    }

    #[test]
    fn exponential_families() {
        assert_eq!(upto(&"pow2-minus-1".parse().unwrap(), 64), vec![1, 3, 7, 15, 31, 63]);
        assert_eq!(upto(&"pow2-double-minus-2".parse().unwrap(), 64), vec![2, 6, 14, 30, 62]);
        assert_eq!(upto(&"pow2".parse().unwrap(), 20), vec![2, 4, 8, 16]);
    }

    #[test]
    fn fibonacci_and_primes() {
        assert_eq!(upto(&SequenceSpec::Fibonacci, 40), vec![1, 2, 3, 5, 8, 13, 21, 34]);
        assert_eq!(upto(&SequenceSpec::Primes, 20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["cube", "square", "linear:3,-1", "list:1,3,7", "pow2-minus-1", "primes", "exponential:3,2,1"] {
            let seq: SequenceSpec = s.parse().unwrap();
            assert_eq!(seq.to_string(), s);
        }
        assert!(matches!("wobble".parse::<SequenceSpec>(), Err(Error::UnknownSequence(_))));
        assert!("linear:1".parse::<SequenceSpec>().is_err());
    }

    #[test]
    fn empty_list() {
        let s: SequenceSpec = "list".parse().unwrap();
        assert!(s.members_upto(100).is_empty());
    }
}
