//! Quantifier-free types of node tuples.
//!
//! [`QfType0`] records `⊴` and `<_lex` between every two positions of the
//! closure tuple, which is closed under meets, so it captures the
//! quantifier-free type in the language `{⊴, <_lex, ∧}`. [`DeltaType`]
//! records the four-place relation `Δ(a, b, c, d) ⟺ a∧b ⊴ c∧d` together with
//! `<_lex` on the tuple itself.
//!
//! Canonical byte layout (both encodings): arity as `u32` little-endian, then
//! the row-major below-matrix bits (absent for `DeltaType`), the row-major
//! lex bits, then the delta-tensor bits (absent for `QfType0`). Bits are
//! packed least significant first and the final byte is zero padded.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::{closure, Node};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QfType0 {
    arity: usize,
    below: Vec<bool>,
    lex: Vec<bool>,
}

impl QfType0 {
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Side length of the matrices, `arity²`.
    pub fn width(&self) -> usize {
        self.arity * self.arity
    }

    pub fn below(&self, i: usize, j: usize) -> bool {
        self.below[i * self.width() + j]
    }

    pub fn lex(&self, i: usize, j: usize) -> bool {
        self.lex[i * self.width() + j]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        encode(self.arity, [self.below.as_slice(), self.lex.as_slice()])
    }
}

pub fn qftype0(tuple: &[Node]) -> QfType0 {
    let cl = closure(tuple);
    let w = cl.len();
    let mut below = Vec::with_capacity(w * w);
    let mut lex = Vec::with_capacity(w * w);
    for a in &cl {
        for b in &cl {
            below.push(a.is_prefix_of(b));
            lex.push(a.lex_less(b));
        }
    }
    QfType0 {
        arity: tuple.len(),
        below,
        lex,
    }
}

/// Strong isomorphism; tuples of different arity are never equivalent.
pub fn sim0(a: &[Node], b: &[Node]) -> bool {
    a.len() == b.len() && qftype0(a) == qftype0(b)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeltaType {
    arity: usize,
    delta: Vec<bool>,
    lex: Vec<bool>,
}

impl DeltaType {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn delta(&self, i: usize, j: usize, k: usize, l: usize) -> bool {
        let n = self.arity;
        self.delta[((i * n + j) * n + k) * n + l]
    }

    pub fn lex(&self, i: usize, j: usize) -> bool {
        self.lex[i * self.arity + j]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        encode(self.arity, [self.lex.as_slice(), self.delta.as_slice()])
    }
}

pub fn delta_type(tuple: &[Node]) -> DeltaType {
    let n = tuple.len();
    let meets = closure(tuple);
    let mut delta = Vec::with_capacity(n.pow(4));
    for ij in &meets {
        for kl in &meets {
            delta.push(ij.is_prefix_of(kl));
        }
    }
    let lex = tuple
        .iter()
        .flat_map(|a| tuple.iter().map(move |b| a.lex_less(b)))
        .collect();
    DeltaType {
        arity: n,
        delta,
        lex,
    }
}

pub fn sim_delta(a: &[Node], b: &[Node]) -> bool {
    a.len() == b.len() && delta_type(a) == delta_type(b)
}

fn encode<const N: usize>(arity: usize, sections: [&[bool]; N]) -> Vec<u8> {
    let mut out = (arity as u32).to_le_bytes().to_vec();
    let bits = sections.iter().flat_map(|s| s.iter().copied());
    let mut byte = 0u8;
    let mut filled = 0;
    for bit in bits {
        byte |= u8::from(bit) << filled;
        filled += 1;
        if filled == 8 {
            out.push(byte);
            byte = 0;
            filled = 0;
        }
    }
    if filled > 0 {
        out.push(byte);
    }
    out
}

/// Result of the exhaustive `∼_δ` versus `∼₀`-of-closure check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SsLlReport {
    pub pass: bool,
    pub branching: u32,
    pub leaf_depth: usize,
    pub tuple_len: usize,
    pub tuples: usize,
    pub pairs_checked: u64,
    /// Two tuples on which the equivalences disagree, as node strings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<(Vec<String>, Vec<String>)>,
}

pub const DEFAULT_PAIR_CAP: u64 = 1 << 28;

/// Checks `η̄ ∼_δ ν̄ ⟺ cl(η̄) ∼₀ cl(ν̄)` over every ordered pair of tuples of
/// `len` distinct leaves of `b^{n}`.
pub fn verify_ss_ll(branching: u32, leaf_depth: usize, len: usize, pair_cap: u64) -> Result<SsLlReport> {
    if branching < 2 || leaf_depth < 1 || len < 1 {
        return Err(Error::Precondition(
            "need branching >= 2, leaf depth >= 1 and tuple length >= 1".into(),
        ));
    }
    let leaves = leaves(branching, leaf_depth)?;
    if len > leaves.len() {
        return Err(Error::Precondition(format!(
            "tuple length {len} exceeds the {} available leaves",
            leaves.len()
        )));
    }
    let tuple_count: u128 = (leaves.len() + 1 - len..=leaves.len()).map(|x| x as u128).product();
    let pairs = tuple_count * tuple_count;
    if pairs > u128::from(pair_cap) {
        return Err(Error::cap("tuple pairs", pairs, pair_cap));
    }

    let tuples = distinct_tuples(&leaves, len);
    let mut delta_ids: HashMap<DeltaType, usize> = HashMap::new();
    let mut qf_ids: HashMap<QfType0, usize> = HashMap::new();
    let keys: Vec<(usize, usize)> = tuples
        .iter()
        .map(|t| {
            let next = delta_ids.len();
            let d = *delta_ids.entry(delta_type(t)).or_insert(next);
            let next = qf_ids.len();
            let q = *qf_ids.entry(qftype0(&closure(t))).or_insert(next);
            (d, q)
        })
        .collect();

    let mut counterexample = None;
    let mut checked = 0u64;
    'outer: for (i, a) in keys.iter().enumerate() {
        for (j, b) in keys.iter().enumerate() {
            checked += 1;
            if (a.0 == b.0) != (a.1 == b.1) {
                let text = |t: &Vec<Node>| t.iter().map(|n| n.to_text(branching)).collect();
                counterexample = Some((text(&tuples[i]), text(&tuples[j])));
                break 'outer;
            }
        }
    }
    Ok(SsLlReport {
        pass: counterexample.is_none(),
        branching,
        leaf_depth,
        tuple_len: len,
        tuples: tuples.len(),
        pairs_checked: checked,
        counterexample,
    })
}

fn leaves(branching: u32, depth: usize) -> Result<Vec<Node>> {
    let count = u64::from(branching).checked_pow(depth as u32);
    match count {
        Some(c) if c <= 1 << 20 => {}
        _ => return Err(Error::cap("leaves", format!("{branching}^{depth}"), 1u64 << 20)),
    }
    let mut level = vec![Node::root()];
    for _ in 0..depth {
        level = level
            .iter()
            .flat_map(|n| (0..branching).map(move |d| n.child(d)))
            .collect();
    }
    Ok(level)
}

/// All ordered tuples of `len` pairwise distinct elements, lexicographic in
/// position indices.
fn distinct_tuples(items: &[Node], len: usize) -> Vec<Vec<Node>> {
    fn go(items: &[Node], len: usize, used: &mut Vec<bool>, cur: &mut Vec<Node>, out: &mut Vec<Vec<Node>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in 0..items.len() {
            if !used[i] {
                used[i] = true;
                cur.push(items[i].clone());
                go(items, len, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(items, len, &mut vec![false; items.len()], &mut Vec::new(), &mut out);
    out
}
