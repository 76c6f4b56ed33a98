//! Boolean predicates `{0,1}^r -> {0,1}` and their bias profile.
//!
//! Inputs are indexed by the integer whose binary expansion, most significant bit
//! first, lists the coordinates in edge order: for `r = 3` the string `110` is index 6.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::instance::MAX_ARITY;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PredicateSpec", into = "PredicateSpec")]
pub struct Predicate {
    arity: usize,
    table: Vec<bool>,
}

/// JSON shape: `{"arity": r, "accepting": ["110", ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PredicateSpec {
    pub arity: usize,
    pub accepting: Vec<String>,
}

impl TryFrom<PredicateSpec> for Predicate {
    type Error = crate::Error;
    fn try_from(spec: PredicateSpec) -> Result<Self> {
        let strs: Vec<&str> = spec.accepting.iter().map(String::as_str).collect();
        Predicate::from_bitstrings(spec.arity, &strs)
    }
}

impl From<Predicate> for PredicateSpec {
    fn from(p: Predicate) -> Self {
        PredicateSpec { arity: p.arity, accepting: p.accepting().into_iter().map(|x| p.bitstring(x)).collect() }
    }
}

/// Render `x` as an `r`-bit string, most significant bit first.
pub fn bitstring(x: usize, r: usize) -> String {
    (0..r).map(|j| if x >> (r - 1 - j) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Parse an `r`-bit string, most significant bit first.
pub fn parse_bitstring(s: &str) -> Result<usize> {
    if s.is_empty() || s.len() > MAX_ARITY {
        return Err(invalid(format!("bit string {s:?} must have 1..={MAX_ARITY} bits")));
    }
    s.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok(acc << 1 | 1),
        _ => Err(invalid(format!("bit string {s:?} contains {c:?}"))),
    })
}

fn check_arity(r: usize) -> Result<()> {
    if r == 0 || r > MAX_ARITY {
        return Err(invalid(format!("predicate arity {r} outside 1..={MAX_ARITY}")));
    }
    Ok(())
}

impl Predicate {
    pub fn from_table(arity: usize, table: Vec<bool>) -> Result<Self> {
        check_arity(arity)?;
        if table.len() != 1 << arity {
            return Err(invalid(format!("truth table has {} entries, expected {}", table.len(), 1usize << arity)));
        }
        Ok(Predicate { arity, table })
    }

    pub fn from_accepting(arity: usize, accepting: &[usize]) -> Result<Self> {
        check_arity(arity)?;
        let mut table = vec![false; 1 << arity];
        for &x in accepting {
            if x >= table.len() {
                return Err(invalid(format!("accepting index {x} out of range for arity {arity}")));
            }
            table[x] = true;
        }
        Ok(Predicate { arity, table })
    }

    pub fn from_bitstrings(arity: usize, accepting: &[&str]) -> Result<Self> {
        let mut xs = Vec::with_capacity(accepting.len());
        for s in accepting {
            if s.len() != arity {
                return Err(invalid(format!("accepting string {s:?} has length {}, arity is {arity}", s.len())));
            }
            xs.push(parse_bitstring(s)?);
        }
        Self::from_accepting(arity, &xs)
    }

    fn from_fn(arity: usize, f: impl Fn(usize) -> bool) -> Self {
        Predicate { arity, table: (0..1usize << arity).map(f).collect() }
    }

    pub fn and(r: usize) -> Self {
        Self::from_fn(r, |x| x == (1 << r) - 1)
    }

    pub fn or(r: usize) -> Self {
        Self::from_fn(r, |x| x != 0)
    }

    pub fn eq(r: usize) -> Self {
        Self::from_fn(r, |x| x == 0 || x == (1 << r) - 1)
    }

    pub fn neq() -> Self {
        Self::from_fn(2, |x| x == 1 || x == 2)
    }

    /// Accepts exactly the strings of Hamming weight `i`.
    pub fn exactly(i: usize, r: usize) -> Self {
        Self::from_fn(r, |x| x.count_ones() as usize == i)
    }

    /// Accepts only `beta`.
    pub fn single(r: usize, beta: usize) -> Self {
        Self::from_fn(r, |x| x == beta)
    }

    pub fn constant_false(r: usize) -> Self {
        Self::from_fn(r, |_| false)
    }

    /// Built-in predicates by name: `AND[:r]`, `OR[:r]`, `EQ[:r]`, `NEQ`, `EXACT:i:r`
    /// and `BETA:<bits>`. Bare names default to arity 2.
    pub fn named(name: &str) -> Result<Self> {
        let parts: Vec<&str> = name.split(':').collect();
        let upper = parts[0].to_ascii_uppercase();
        let arity_arg = |k: usize| -> Result<usize> {
            let r = match parts.get(k) {
                None => 2,
                Some(s) => s.parse().map_err(|_| invalid(format!("bad arity in predicate name {name:?}")))?,
            };
            check_arity(r)?;
            Ok(r)
        };
        match (upper.as_str(), parts.len()) {
            ("AND", 1 | 2) => Ok(Self::and(arity_arg(1)?)),
            ("OR", 1 | 2) => Ok(Self::or(arity_arg(1)?)),
            ("EQ", 1 | 2) => Ok(Self::eq(arity_arg(1)?)),
            ("NEQ", 1) => Ok(Self::neq()),
            ("EXACT", 3) => {
                let i: usize = parts[1].parse().map_err(|_| invalid(format!("bad weight in {name:?}")))?;
                let r = arity_arg(2)?;
                if i > r {
                    return Err(invalid(format!("weight {i} exceeds arity {r}")));
                }
                Ok(Self::exactly(i, r))
            }
            ("BETA", 2) => Ok(Self::single(parts[1].len(), parse_bitstring(parts[1])?)),
            _ => Err(invalid(format!("unknown predicate name {name:?}"))),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn accepts(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn accepting(&self) -> Vec<usize> {
        (0..self.table.len()).filter(|&x| self.table[x]).collect()
    }

    pub fn bitstring(&self, x: usize) -> String {
        bitstring(x, self.arity)
    }

    /// Accepting strings with no accepting proper sub-string (pointwise ≤), ascending.
    pub fn minimal_elements(&self) -> Vec<usize> {
        self.accepting()
            .into_iter()
            .filter(|&b| {
                // Walk the proper non-empty submasks of b; the empty submask is checked last.
                let mut s = b.wrapping_sub(1) & b;
                while s != 0 {
                    if self.table[s] {
                        return false;
                    }
                    s = (s - 1) & b;
                }
                b == 0 || !self.table[0]
            })
            .collect()
    }

    pub fn classify(&self) -> PredicateProfile {
        let minimal = self.minimal_elements();
        let exponent = minimal.iter().map(|x| x.count_ones()).min();
        PredicateProfile {
            bias_independent: minimal.iter().all(|x| x.count_ones() <= 1),
            exponent,
            minimal_elements: minimal.iter().map(|&x| self.bitstring(x)).collect(),
            symmetric_weights: self.symmetric_decomposition(),
        }
    }

    /// `x ↦ ψ(x ⊕ flip)`; bit `r-1-j` of `flip` negates coordinate `j`.
    pub fn conjugate_by_flip(&self, flip: usize) -> Predicate {
        Self::from_fn(self.arity, |x| self.table[x ^ flip])
    }

    /// `x ↦ ψ(π∘x)` for a ±1 pattern.
    pub fn negation_conjugate(&self, pattern: &[i8]) -> Result<Predicate> {
        Ok(self.conjugate_by_flip(flip_mask(pattern, self.arity)?))
    }

    /// `x ↦ ψ(¬x)`, every coordinate negated.
    pub fn negated_inputs(&self) -> Predicate {
        self.conjugate_by_flip((1 << self.arity) - 1)
    }

    pub fn is_symmetric(&self) -> bool {
        let r = self.arity;
        let mut by_weight: Vec<Option<bool>> = vec![None; r + 1];
        (0..self.table.len()).all(|x| {
            let slot = &mut by_weight[x.count_ones() as usize];
            *slot.get_or_insert(self.table[x]) == self.table[x]
        })
    }

    /// For a symmetric predicate, the Hamming weights it accepts.
    pub fn symmetric_decomposition(&self) -> Option<Vec<usize>> {
        if !self.is_symmetric() {
            return None;
        }
        let r = self.arity;
        Some((0..=r).filter(|&i| self.table[(1usize << i) - 1]).collect())
    }
}

/// Convert a ±1 pattern to a flip mask.
pub fn flip_mask(pattern: &[i8], r: usize) -> Result<usize> {
    if pattern.len() != r {
        return Err(invalid(format!("negation pattern has length {}, arity is {r}", pattern.len())));
    }
    pattern.iter().enumerate().try_fold(0usize, |acc, (j, &s)| match s {
        1 => Ok(acc),
        -1 => Ok(acc | 1 << (r - 1 - j)),
        _ => Err(invalid(format!("negation entry {s} is not ±1"))),
    })
}

/// Bias profile of a predicate. `exponent` is `None` when nothing is accepted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateProfile {
    pub bias_independent: bool,
    pub exponent: Option<u32>,
    pub minimal_elements: Vec<String>,
    pub symmetric_weights: Option<Vec<usize>>,
}
