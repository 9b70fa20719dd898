use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Formula, Term};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// A finite string of the standard structure. Bits past the end read 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitString(pub Vec<bool>);

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString(vec![false; len])
    }

    /// The string of length `len` whose bit `i` is bit `i` of `value`.
    pub fn from_value(value: u64, len: usize) -> Self {
        BitString((0..len).map(|i| (value >> i) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: u64) -> bool {
        usize::try_from(i)
            .ok()
            .and_then(|i| self.0.get(i))
            .copied()
            .unwrap_or(false)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Invalid(format!("bad bit {c:?} in string {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{}", *b as u8)?;
        }
        Ok(())
    }
}

pub type NumEnv = BTreeMap<String, u64>;
pub type StrEnv = BTreeMap<String, BitString>;

pub fn eval_term(t: &Term, nums: &NumEnv, strs: &StrEnv) -> Result<u64> {
    Ok(match t {
        Term::Zero => 0,
        Term::Num(k) => *k,
        Term::Var(x) => *nums.get(x).ok_or_else(|| Error::Unbound(x.clone()))?,
        Term::Len(x) => strs.get(x).ok_or_else(|| Error::Unbound(x.clone()))?.len() as u64,
        Term::Succ(a) => eval_term(a, nums, strs)?.checked_add(1).ok_or(Error::Overflow)?,
        Term::Plus(a, b) => eval_term(a, nums, strs)?
            .checked_add(eval_term(b, nums, strs)?)
            .ok_or(Error::Overflow)?,
        Term::Times(a, b) => eval_term(a, nums, strs)?
            .checked_mul(eval_term(b, nums, strs)?)
            .ok_or(Error::Overflow)?,
    })
}

struct Evaluator<'l> {
    limits: &'l Limits,
    steps: u64,
}

impl Evaluator<'_> {
    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.limits.max_expansion {
            return Err(Error::Budget {
                budget: self.limits.max_expansion,
            });
        }
        Ok(())
    }

    fn eval(&mut self, f: &Formula, nums: &mut NumEnv, strs: &mut StrEnv) -> Result<bool> {
        self.tick()?;
        Ok(match f {
            Formula::Eq(a, b) => eval_term(a, nums, strs)? == eval_term(b, nums, strs)?,
            Formula::Leq(a, b) => eval_term(a, nums, strs)? <= eval_term(b, nums, strs)?,
            Formula::Member(x, t) => {
                let i = eval_term(t, nums, strs)?;
                strs.get(x).ok_or_else(|| Error::Unbound(x.clone()))?.get(i)
            }
            Formula::Not(g) => !self.eval(g, nums, strs)?,
            Formula::And(a, b) => self.eval(a, nums, strs)? && self.eval(b, nums, strs)?,
            Formula::Or(a, b) => self.eval(a, nums, strs)? || self.eval(b, nums, strs)?,
            Formula::Imp(a, b) => !self.eval(a, nums, strs)? || self.eval(b, nums, strs)?,
            Formula::ForallNum(x, t, g) | Formula::ExistsNum(x, t, g) => {
                let bound = eval_term(t, nums, strs)?;
                let want = matches!(f, Formula::ExistsNum(..));
                let saved = nums.remove(x);
                let mut result = !want;
                for v in 0..bound {
                    nums.insert(x.clone(), v);
                    match self.eval(g, nums, strs) {
                        Ok(b) if b == want => {
                            result = want;
                            break;
                        }
                        Ok(_) => {}
                        Err(e) => {
                            restore(nums, x, saved);
                            return Err(e);
                        }
                    }
                }
                restore(nums, x, saved);
                result
            }
            Formula::ForallStr(x, t, g) | Formula::ExistsStr(x, t, g) => {
                let bound = eval_term(t, nums, strs)?;
                let max_len = bound.saturating_sub(1);
                if max_len > self.limits.max_string_len {
                    return Err(Error::Scale {
                        what: "string quantifier bound",
                        value: max_len,
                        max: self.limits.max_string_len,
                    });
                }
                let want = matches!(f, Formula::ExistsStr(..));
                let saved = strs.remove(x);
                let mut result = !want;
                'outer: for len in 0..bound as usize {
                    for v in 0..1u64 << len {
                        strs.insert(x.clone(), BitString::from_value(v, len));
                        match self.eval(g, nums, strs) {
                            Ok(b) if b == want => {
                                result = want;
                                break 'outer;
                            }
                            Ok(_) => {}
                            Err(e) => {
                                restore(strs, x, saved);
                                return Err(e);
                            }
                        }
                    }
                }
                restore(strs, x, saved);
                result
            }
        })
    }
}

fn restore<V>(env: &mut BTreeMap<String, V>, x: &str, saved: Option<V>) {
    match saved {
        Some(v) => env.insert(x.to_string(), v),
        None => env.remove(x),
    };
}

/// Truth in the standard structure with the given number and string
/// assignments. String quantifiers range over every string shorter than the
/// bound.
pub fn eval_standard(f: &Formula, nums: &NumEnv, strs: &StrEnv, limits: &Limits) -> Result<bool> {
    let mut ev = Evaluator { limits, steps: 0 };
    ev.eval(f, &mut nums.clone(), &mut strs.clone())
}
