//! Consistency oracles.
//!
//! An oracle decides whether the instances indexed by a finite subset are
//! simultaneously satisfiable. Three backends are provided: divisibility
//! parameters decided by gcd, Boolean parameters decided by bitwise meet, and
//! a brute-force first-order evaluator over an explicit finite structure.
//! The empty subset is consistent by convention.

mod formula;
mod structure;

pub use formula::{parse_formula, Formula, Term};
pub use structure::{divisor_lattice, eval_formula, fo_consistent, FiniteStructure, FoOracle, StructureWitness};

use std::fmt;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::index::IndexSpace;

pub trait ConsistencyOracle: Sync {
    fn index(&self) -> &IndexSpace;

    /// `subset` holds label positions in increasing order.
    fn consistent(&self, subset: &[usize]) -> bool;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Skolem,
    Boolean,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Skolem => "skolem",
            Backend::Boolean => "boolean",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "skolem" => Ok(Backend::Skolem),
            "boolean" => Ok(Backend::Boolean),
            other => Err(Error::Parse {
                text: other.to_string(),
                reason: "backend must be skolem or boolean".into(),
            }),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single parameter: a positive integer or a fixed-width bitset (an element
/// of a finite powerset algebra whose atoms are the bits).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Param {
    Nat(BigUint),
    Bits(FixedBitSet),
}

impl Param {
    pub fn as_nat(&self) -> Option<&BigUint> {
        match self {
            Param::Nat(n) => Some(n),
            Param::Bits(_) => None,
        }
    }

    pub fn as_bits(&self) -> Option<&FixedBitSet> {
        match self {
            Param::Bits(b) => Some(b),
            Param::Nat(_) => None,
        }
    }

    /// Decimal for integers, `0x…` hex (bit 0 least significant, padded to
    /// the width) for bitsets.
    pub fn to_text(&self) -> String {
        match self {
            Param::Nat(n) => n.to_str_radix(10),
            Param::Bits(b) => bits_to_hex(b),
        }
    }

    pub fn parse(text: &str, backend: Backend, width: usize) -> Result<Param> {
        match backend {
            Backend::Skolem => {
                let n = BigUint::parse_bytes(text.as_bytes(), 10).ok_or_else(|| Error::Parse {
                    text: text.to_string(),
                    reason: "expected a decimal natural number".into(),
                })?;
                Ok(Param::Nat(n))
            }
            Backend::Boolean => Ok(Param::Bits(hex_to_bits(text, width)?)),
        }
    }
}

pub fn bits_to_hex(bits: &FixedBitSet) -> String {
    let digits = bits.len().div_ceil(4).max(1);
    let hex: String = (0..digits)
        .rev()
        .map(|d| {
            let nibble = (0..4).fold(0u32, |acc, b| {
                let i = d * 4 + b;
                acc | (u32::from(i < bits.len() && bits.contains(i)) << b)
            });
            char::from_digit(nibble, 16).unwrap()
        })
        .collect();
    format!("0x{hex}")
}

pub fn hex_to_bits(text: &str, width: usize) -> Result<FixedBitSet> {
    let bad = |reason: String| Error::Parse {
        text: text.to_string(),
        reason,
    };
    let body = text
        .strip_prefix("0x")
        .ok_or_else(|| bad("boolean parameters start with 0x".into()))?;
    let mut bits = FixedBitSet::with_capacity(width);
    for (d, c) in body.chars().rev().enumerate() {
        let nibble = c.to_digit(16).ok_or_else(|| bad("non-hex digit".into()))?;
        for b in 0..4 {
            if nibble >> b & 1 == 1 {
                let i = d * 4 + b;
                if i >= width {
                    return Err(bad(format!("bit {i} outside declared width {width}")));
                }
                bits.insert(i);
            }
        }
    }
    Ok(bits)
}

/// True iff the gcd of the values exceeds 1, i.e. some `x ≠ 1` divides them all.
pub fn gcd_consistent<'a>(values: impl IntoIterator<Item = &'a BigUint>) -> bool {
    let mut acc: Option<BigUint> = None;
    for v in values {
        let g = match acc {
            None => v.clone(),
            Some(a) => a.gcd(v),
        };
        if g.is_one() {
            return false;
        }
        acc = Some(g);
    }
    true
}

/// True iff the bitwise meet is nonzero, i.e. some atom lies below them all.
pub fn bitset_consistent<'a>(values: impl IntoIterator<Item = &'a FixedBitSet>) -> bool {
    let mut acc: Option<FixedBitSet> = None;
    for v in values {
        match acc.as_mut() {
            None => acc = Some(v.clone()),
            Some(a) => a.intersect_with(v),
        }
        if acc.as_ref().is_some_and(|a| a.count_ones(..) == 0) {
            return false;
        }
    }
    true
}

/// A parameter for every label of an index space, decided by the backend's
/// oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    space: IndexSpace,
    backend: Backend,
    width: usize,
    params: Vec<Param>,
}

impl Witness {
    pub fn skolem(space: IndexSpace, params: Vec<BigUint>) -> Result<Self> {
        Self::new(space, Backend::Skolem, 0, params.into_iter().map(Param::Nat).collect())
    }

    pub fn boolean(space: IndexSpace, width: usize, params: Vec<FixedBitSet>) -> Result<Self> {
        Self::new(space, Backend::Boolean, width, params.into_iter().map(Param::Bits).collect())
    }

    pub fn new(space: IndexSpace, backend: Backend, width: usize, params: Vec<Param>) -> Result<Self> {
        if params.len() != space.len() {
            return Err(Error::IndexMismatch(format!(
                "{} parameters for {} labels",
                params.len(),
                space.len()
            )));
        }
        let labels = space.labels();
        for (label, p) in labels.iter().zip(&params) {
            check_param(p, backend, width).map_err(|reason| Error::InvalidParameter {
                label: space.label_text(label),
                reason,
            })?;
        }
        Ok(Witness {
            space,
            backend,
            width,
            params,
        })
    }

    pub fn space(&self) -> &IndexSpace {
        &self.space
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Bitset width for boolean witnesses, 0 for skolem ones.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn param(&self, position: usize) -> &Param {
        &self.params[position]
    }

    pub fn with_param(&self, position: usize, param: Param) -> Result<Self> {
        let mut params = self.params.clone();
        params[position] = param;
        Self::new(self.space, self.backend, self.width, params)
    }
}

pub(crate) fn check_param(p: &Param, backend: Backend, width: usize) -> Result<(), String> {
    match (backend, p) {
        (Backend::Skolem, Param::Nat(n)) if n.is_zero() => Err("skolem parameters must be at least 1".into()),
        (Backend::Skolem, Param::Nat(_)) => Ok(()),
        (Backend::Boolean, Param::Bits(b)) if b.len() != width => {
            Err(format!("bitset width {} differs from declared width {width}", b.len()))
        }
        (Backend::Boolean, Param::Bits(_)) => Ok(()),
        _ => Err(format!("parameter kind does not match the {backend} backend")),
    }
}

/// Oracle verdict over a flat list of parameters of one backend.
pub(crate) fn params_consistent<'a>(backend: Backend, params: impl Iterator<Item = &'a Param>) -> bool {
    match backend {
        Backend::Skolem => gcd_consistent(params.filter_map(Param::as_nat)),
        Backend::Boolean => bitset_consistent(params.filter_map(Param::as_bits)),
    }
}

impl ConsistencyOracle for Witness {
    fn index(&self) -> &IndexSpace {
        &self.space
    }

    fn consistent(&self, subset: &[usize]) -> bool {
        params_consistent(self.backend, subset.iter().map(|&i| &self.params[i]))
    }
}
