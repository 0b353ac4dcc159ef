//! Tree properties as finite patterns: what must be consistent, what must
//! not be, and the largest subset-closed family compatible with both.

use std::fmt;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::antichains::{antichains_by_product, maximal_chain_bounded, DEFAULT_ITEM_CAP};
use crate::error::{Error, Result};
use crate::index::{IndexSpace, Label};
use crate::oracles::ConsistencyOracle;
use crate::tree::{Node, TreeDomain};

/// Default cap on generated or swept subsets.
pub const DEFAULT_VERIFY_CAP: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PatternKind {
    Atp,
    KAtp { k: usize },
    Sop1,
    Sop2,
    Tp { k: usize },
    Tp2,
}

impl PatternKind {
    pub fn name(self) -> &'static str {
        match self {
            PatternKind::Atp => "atp",
            PatternKind::KAtp { .. } => "katp",
            PatternKind::Sop1 => "sop1",
            PatternKind::Sop2 => "sop2",
            PatternKind::Tp { .. } => "tp",
            PatternKind::Tp2 => "tp2",
        }
    }

    pub fn k(self) -> Option<usize> {
        match self {
            PatternKind::KAtp { k } | PatternKind::Tp { k } => Some(k),
            _ => None,
        }
    }

    /// Accepts `atp`, `katp:K`, `sop1`, `sop2`, `tp:K`, `tp2`.
    pub fn parse(text: &str) -> Result<Self> {
        let (name, k) = match text.split_once(':') {
            Some((name, k)) => {
                let k = k.parse::<usize>().map_err(|_| Error::Parse {
                    text: text.to_string(),
                    reason: "k must be a natural number".into(),
                })?;
                (name, Some(k))
            }
            None => (text, None),
        };
        Self::from_parts(name, k).map_err(|reason| Error::Parse {
            text: text.to_string(),
            reason,
        })
    }

    pub fn from_parts(name: &str, k: Option<usize>) -> Result<Self, String> {
        match (name, k) {
            ("atp", None) => Ok(PatternKind::Atp),
            ("sop1", None) => Ok(PatternKind::Sop1),
            ("sop2", None) => Ok(PatternKind::Sop2),
            ("tp2", None) => Ok(PatternKind::Tp2),
            ("katp", Some(k)) => Ok(PatternKind::KAtp { k }),
            ("tp", Some(k)) => Ok(PatternKind::Tp { k }),
            ("katp" | "tp", None) => Err(format!("{name} needs a k, as in {name}:2")),
            ("atp" | "sop1" | "sop2" | "tp2", Some(_)) => Err(format!("{name} takes no k")),
            _ => Err(format!("unknown pattern kind {name}")),
        }
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k() {
            Some(k) => write!(f, "{}:{k}", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PatternSpec {
    pub kind: PatternKind,
    pub space: IndexSpace,
}

/// Tree patterns take a tree domain; TP₂ takes an array shape.
pub fn make_pattern(kind: PatternKind, space: IndexSpace) -> Result<PatternSpec> {
    match (kind, &space) {
        (PatternKind::Tp2, IndexSpace::Array { rows, cols }) => {
            if *rows == 0 || *cols == 0 {
                return Err(Error::Precondition("TP2 arrays need at least one row and column".into()));
            }
        }
        (PatternKind::Tp2, _) => return Err(Error::Precondition("TP2 is indexed by an array".into())),
        (_, IndexSpace::Tree(d)) => match kind {
            PatternKind::KAtp { k } | PatternKind::Tp { k } if k < 2 => {
                return Err(Error::Precondition(format!("{} needs k ≥ 2, got {k}", kind.name())));
            }
            PatternKind::Sop1 if d.branching != 2 => {
                return Err(Error::Precondition("SOP1 is defined on the binary tree".into()));
            }
            _ => {}
        },
        _ => return Err(Error::Precondition(format!("{} is indexed by a tree", kind.name()))),
    }
    Ok(PatternSpec { kind, space })
}

/// Interprets `depth`/`branching` or `rows`/`cols` the way the command line does.
pub fn pattern_for(kind: PatternKind, branching: u32, depth: usize) -> Result<PatternSpec> {
    let space = match kind {
        PatternKind::Tp2 => IndexSpace::Array {
            rows: depth,
            cols: branching as usize,
        },
        _ => IndexSpace::Tree(TreeDomain::new(branching, depth)?),
    };
    make_pattern(kind, space)
}

/// Position sets in canonical order: sorted positions, compared lexicographically.
pub type PositionSet = Vec<usize>;

struct TreeView {
    domain: TreeDomain,
    nodes: Vec<Node>,
}

impl TreeView {
    fn new(domain: TreeDomain) -> Self {
        TreeView {
            domain,
            nodes: domain.enumerate_nodes(),
        }
    }

    fn pos(&self, n: &Node) -> usize {
        IndexSpace::Tree(self.domain).node_position(n).expect("node in domain")
    }

    /// Positions of the proper ancestors of `n`, root first.
    fn ancestors(&self, n: &Node) -> Vec<usize> {
        (0..n.len()).map(|l| self.pos(&Node::from(&n.digits()[..l]))).collect()
    }
}

fn check_cap(count: usize, cap: u64, what: &'static str) -> Result<()> {
    if count as u64 > cap {
        return Err(Error::cap(what, count, cap));
    }
    Ok(())
}

/// All chains of exactly `size` elements (any size ≥ 1 when `size` is None),
/// grouped by their top element.
fn chains(view: &TreeView, size: Option<usize>, cap: u64) -> Result<Vec<PositionSet>> {
    let mut out = Vec::new();
    for top in &view.nodes {
        let anc = view.ancestors(top);
        let me = view.pos(top);
        let n = anc.len();
        let pick = |mask: u64| {
            let mut s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| anc[i]).collect();
            s.push(me);
            s
        };
        for mask in 0..1u64 << n {
            if size.is_none_or(|k| mask.count_ones() as usize + 1 == k) {
                out.push(pick(mask));
                check_cap(out.len(), cap, "generated chains")?;
            }
        }
    }
    out.sort();
    Ok(out)
}

fn antichain_sets(view: &TreeView, cap: u64) -> Result<Vec<PositionSet>> {
    let item_cap = usize::try_from(cap).unwrap_or(usize::MAX).saturating_add(1);
    let sets = antichains_by_product(view.domain.branching, view.domain.max_len() + 1, item_cap)?;
    Ok(sets
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| s.iter().map(|n| view.pos(n)).collect())
        .collect())
}

fn pairs_where(view: &TreeView, pred: impl Fn(&Node, &Node) -> bool) -> Vec<PositionSet> {
    let mut out = Vec::new();
    for (i, a) in view.nodes.iter().enumerate() {
        for (j, b) in view.nodes.iter().enumerate().skip(i + 1) {
            if pred(a, b) {
                out.push(vec![i, j]);
            }
        }
    }
    out
}

/// `{η⌢1, η⌢0⌢ν}`.
fn sop1_forbidden(a: &Node, b: &Node) -> bool {
    let split = |x: &Node, y: &Node| {
        x.parent().is_some_and(|eta| {
            x.digits().last() == Some(&1) && eta.child(0).is_prefix_of(y)
        })
    };
    split(a, b) || split(b, a)
}

fn k_subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in k_subsets(&items[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn sibling_sets(view: &TreeView, k: usize) -> Vec<PositionSet> {
    let mut out = Vec::new();
    for n in view.nodes.iter().filter(|n| n.len() < view.domain.max_len()) {
        let kids: Vec<usize> = (0..view.domain.branching).map(|d| view.pos(&n.child(d))).collect();
        out.extend(k_subsets(&kids, k));
    }
    out.sort();
    out
}

impl PatternSpec {
    pub fn labels(&self) -> Vec<Label> {
        self.space.labels()
    }

    fn view(&self) -> Option<TreeView> {
        self.space.tree().map(|d| TreeView::new(*d))
    }

    /// Sets the pattern requires to be consistent, in canonical order.
    pub fn required_consistent(&self, cap: u64) -> Result<Vec<PositionSet>> {
        match (self.kind, self.view()) {
            (PatternKind::Atp | PatternKind::KAtp { .. }, Some(v)) => antichain_sets(&v, cap),
            (PatternKind::Sop1 | PatternKind::Sop2 | PatternKind::Tp { .. }, Some(v)) => chains(&v, None, cap),
            (PatternKind::Tp2, None) => {
                let IndexSpace::Array { rows, cols } = self.space else { unreachable!() };
                let total = (cols as u128 + 1).checked_pow(rows as u32).unwrap_or(u128::MAX) - 1;
                if total > u128::from(cap) {
                    return Err(Error::cap("generated row selections", total, cap));
                }
                // choice[r] = 0 skips the row, c+1 picks column c
                let mut out = Vec::new();
                let mut choice = vec![0usize; rows];
                loop {
                    let mut r = rows;
                    loop {
                        if r == 0 {
                            out.sort();
                            return Ok(out);
                        }
                        r -= 1;
                        choice[r] += 1;
                        if choice[r] <= cols {
                            break;
                        }
                        choice[r] = 0;
                    }
                    out.push(
                        choice
                            .iter()
                            .enumerate()
                            .filter(|(_, &c)| c > 0)
                            .map(|(row, &c)| row * cols + c - 1)
                            .collect(),
                    );
                }
            }
            _ => unreachable!("validated by make_pattern"),
        }
    }

    /// Sets the pattern requires to be inconsistent, in canonical order.
    pub fn required_inconsistent(&self, cap: u64) -> Result<Vec<PositionSet>> {
        let out = match (self.kind, self.view()) {
            (PatternKind::Atp, Some(v)) => pairs_where(&v, Node::is_comparable),
            (PatternKind::KAtp { k }, Some(v)) => chains(&v, Some(k), cap)?,
            (PatternKind::Sop2, Some(v)) => pairs_where(&v, |a, b| !a.is_comparable(b)),
            (PatternKind::Sop1, Some(v)) => pairs_where(&v, sop1_forbidden),
            (PatternKind::Tp { k }, Some(v)) => sibling_sets(&v, k),
            (PatternKind::Tp2, None) => {
                let IndexSpace::Array { rows, cols } = self.space else { unreachable!() };
                let mut out = Vec::new();
                for r in 0..rows {
                    for a in 0..cols {
                        for b in a + 1..cols {
                            out.push(vec![r * cols + a, r * cols + b]);
                        }
                    }
                }
                out
            }
            _ => unreachable!("validated by make_pattern"),
        };
        check_cap(out.len(), cap, "generated inconsistent sets")?;
        Ok(out)
    }

    /// Whether `subset` (sorted positions) avoids the forbidden configuration,
    /// i.e. lies in the exact family. Decided directly from the definition.
    pub fn avoids(&self, subset: &[usize]) -> bool {
        if let IndexSpace::Array { cols, .. } = self.space {
            return subset.windows(2).all(|w| w[0] / cols != w[1] / cols);
        }
        let labels = self.labels();
        let nodes: Vec<&Node> = subset
            .iter()
            .map(|&i| match &labels[i] {
                Label::Node(n) => n,
                _ => unreachable!(),
            })
            .collect();
        let all_pairs = |p: &dyn Fn(&Node, &Node) -> bool| {
            nodes
                .iter()
                .enumerate()
                .all(|(i, a)| nodes[i + 1..].iter().all(|b| p(a, b)))
        };
        match self.kind {
            PatternKind::Atp => all_pairs(&|a, b| !a.is_comparable(b)),
            PatternKind::Sop2 => all_pairs(&|a, b| a.is_comparable(b)),
            PatternKind::Sop1 => all_pairs(&|a, b| !sop1_forbidden(a, b)),
            PatternKind::KAtp { k } => nodes
                .iter()
                .all(|top| nodes.iter().filter(|a| a.is_prefix_of(top)).count() < k),
            PatternKind::Tp { k } => nodes.iter().all(|n| {
                n.is_root() || nodes.iter().filter(|m| m.parent() == n.parent()).count() < k
            }),
            PatternKind::Tp2 => unreachable!(),
        }
    }

    pub fn descriptor(&self) -> Value {
        let mut v = json!({ "kind": self.kind.name() });
        if let Some(k) = self.kind.k() {
            v["k"] = json!(k);
        }
        match self.space {
            IndexSpace::Tree(d) => {
                v["branching"] = json!(d.branching);
                v["depth"] = json!(d.depth);
                if d.leaf_level {
                    v["leaf_level"] = json!(true);
                }
            }
            IndexSpace::Array { rows, cols } => {
                v["rows"] = json!(rows);
                v["cols"] = json!(cols);
            }
            IndexSpace::Set { size } => v["size"] = json!(size),
        }
        v
    }

    pub fn from_descriptor(v: &Value) -> Result<Self> {
        let bad = |reason: &str| Error::WitnessFile(format!("pattern descriptor: {reason}"));
        let uint = |key: &str| -> Result<Option<usize>> {
            match v.get(key) {
                None | Some(Value::Null) => Ok(None),
                Some(x) => x
                    .as_u64()
                    .map(|n| Some(n as usize))
                    .ok_or_else(|| bad(&format!("{key} must be a natural number"))),
            }
        };
        let name = v.get("kind").and_then(Value::as_str).ok_or_else(|| bad("missing kind"))?;
        let kind = PatternKind::from_parts(name, uint("k")?).map_err(|e| bad(&e))?;
        let space = if kind == PatternKind::Tp2 {
            IndexSpace::Array {
                rows: uint("rows")?.ok_or_else(|| bad("missing rows"))?,
                cols: uint("cols")?.ok_or_else(|| bad("missing cols"))?,
            }
        } else {
            let b = uint("branching")?.unwrap_or(2);
            let depth = uint("depth")?.ok_or_else(|| bad("missing depth"))?;
            let mut d = TreeDomain::new(u32::try_from(b).map_err(|_| bad("branching too large"))?, depth)?;
            if v.get("leaf_level").and_then(Value::as_bool) == Some(true) {
                d = d.with_leaf_level();
            }
            IndexSpace::Tree(d)
        };
        make_pattern(kind, space)
    }
}

/// `S` = all nonempty subsets of some maximal member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyFamily {
    space: IndexSpace,
    members: Vec<PositionSet>,
    bits: Vec<FixedBitSet>,
}

impl ConsistencyFamily {
    /// Keeps only the ⊆-maximal sets, in canonical order.
    pub fn new(space: IndexSpace, sets: Vec<PositionSet>) -> Result<Self> {
        let n = space.len();
        let mut sets: Vec<PositionSet> = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .filter(|s| !s.is_empty())
            .collect();
        if sets.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if let Some(bad) = sets.iter().flatten().find(|&&i| i >= n) {
            return Err(Error::IndexMismatch(format!("position {bad} outside {n} labels")));
        }
        sets.sort();
        sets.dedup();
        let bits: Vec<FixedBitSet> = sets.iter().map(|s| to_bits(n, s)).collect();
        let keep: Vec<bool> = if n <= 64 {
            let masks: Vec<u64> = sets.iter().map(|s| s.iter().fold(0u64, |acc, &i| acc | 1 << i)).collect();
            (0..sets.len())
                .into_par_iter()
                .map(|i| !masks.iter().enumerate().any(|(j, &m)| j != i && masks[i] & !m == 0))
                .collect()
        } else {
            (0..sets.len())
                .into_par_iter()
                .map(|i| !(0..sets.len()).any(|j| j != i && bits[i].is_subset(&bits[j])))
                .collect()
        };
        let (members, bits): (Vec<_>, Vec<_>) = sets
            .into_iter()
            .zip(bits)
            .zip(keep)
            .filter_map(|(pair, k)| k.then_some(pair))
            .unzip();
        Ok(ConsistencyFamily { space, members, bits })
    }

    pub fn space(&self) -> &IndexSpace {
        &self.space
    }

    pub fn members(&self) -> &[PositionSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `J ∈ S`; the empty set is accepted.
    pub fn contains(&self, subset: &[usize]) -> bool {
        self.bits.iter().any(|m| subset.iter().all(|&i| i < m.len() && m.contains(i)))
    }

    pub fn member_texts(&self) -> Vec<Vec<String>> {
        let labels = self.space.labels();
        self.members.iter().map(|m| self.space.subset_texts(&labels, m)).collect()
    }

    fn masks(&self) -> Option<Vec<u64>> {
        (self.space.len() <= 64).then(|| {
            self.members
                .iter()
                .map(|m| m.iter().fold(0u64, |acc, &i| acc | 1 << i))
                .collect()
        })
    }
}

fn to_bits(n: usize, s: &[usize]) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    s.iter().for_each(|&i| b.insert(i));
    b
}

/// Maximal independent sets of a conflict graph on at most 64 vertices
/// (Bron–Kerbosch with pivoting on the complement).
fn maximal_independent_sets(n: usize, conflicts: &[u64], cap: usize) -> Result<Vec<u64>> {
    fn go(r: u64, mut p: u64, mut x: u64, nonadj: &[u64], out: &mut Vec<u64>, cap: usize) -> Result<()> {
        if p == 0 && x == 0 {
            out.push(r);
            if out.len() > cap {
                return Err(Error::cap("maximal members", out.len(), cap));
            }
            return Ok(());
        }
        let u = (p | x).trailing_zeros() as usize;
        let mut cand = p & !nonadj[u];
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            let bit = 1u64 << v;
            go(r | bit, p & nonadj[v], x & nonadj[v], nonadj, out, cap)?;
            p &= !bit;
            x |= bit;
            cand &= !bit;
        }
        Ok(())
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let nonadj: Vec<u64> = (0..n).map(|i| all & !conflicts[i] & !(1u64 << i)).collect();
    let mut out = Vec::new();
    go(0, all, 0, &nonadj, &mut out, cap)?;
    Ok(out)
}

/// The exact family: every nonempty set avoiding the pattern's forbidden
/// configuration. Required-consistent sets lie in it and required-inconsistent
/// sets do not.
pub fn exact_family(p: &PatternSpec) -> Result<ConsistencyFamily> {
    exact_family_capped(p, DEFAULT_ITEM_CAP)
}

pub fn exact_family_capped(p: &PatternSpec, cap: usize) -> Result<ConsistencyFamily> {
    let members: Vec<PositionSet> = match (p.kind, p.view()) {
        (PatternKind::Atp, Some(v)) => chain_bounded(&v, 2, cap)?,
        (PatternKind::KAtp { k }, Some(v)) => chain_bounded(&v, k, cap)?,
        (PatternKind::Sop2, Some(v)) => v
            .nodes
            .iter()
            .filter(|n| n.len() == v.domain.max_len())
            .map(|leaf| {
                let mut s = v.ancestors(leaf);
                s.push(v.pos(leaf));
                s
            })
            .collect(),
        (PatternKind::Sop1, Some(v)) => {
            let n = v.nodes.len();
            if n > 64 {
                return Err(Error::cap("SOP1 family vertices", n, 64));
            }
            let mut conflicts = vec![0u64; n];
            for pair in pairs_where(&v, sop1_forbidden) {
                conflicts[pair[0]] |= 1 << pair[1];
                conflicts[pair[1]] |= 1 << pair[0];
            }
            maximal_independent_sets(n, &conflicts, cap)?
                .into_iter()
                .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
                .collect()
        }
        (PatternKind::Tp { k }, Some(v)) => {
            // the root, plus k-1 children (or all of them) of every internal node
            let internal: Vec<&Node> = v.nodes.iter().filter(|n| n.len() < v.domain.max_len()).collect();
            let b = v.domain.branching as usize;
            let choices = k_subsets(&(0..b).collect::<Vec<_>>(), (k - 1).min(b));
            let total = (choices.len() as u128).checked_pow(internal.len() as u32).unwrap_or(u128::MAX);
            if total > cap as u128 {
                return Err(Error::cap("maximal members", total, cap));
            }
            let mut out: Vec<PositionSet> = vec![vec![0]];
            for node in internal {
                out = out
                    .into_iter()
                    .flat_map(|s| {
                        let v = &v;
                        choices.iter().map(move |c| {
                            let mut s = s.clone();
                            s.extend(c.iter().map(|&d| v.pos(&node.child(d as u32))));
                            s
                        })
                    })
                    .collect();
            }
            out
        }
        (PatternKind::Tp2, None) => {
            let IndexSpace::Array { rows, cols } = p.space else { unreachable!() };
            let total = (cols as u128).checked_pow(rows as u32).unwrap_or(u128::MAX);
            if total > cap as u128 {
                return Err(Error::cap("maximal members", total, cap));
            }
            let mut out: Vec<PositionSet> = vec![Vec::new()];
            for r in 0..rows {
                out = out
                    .into_iter()
                    .flat_map(|s| {
                        (0..cols).map(move |c| {
                            let mut s = s.clone();
                            s.push(r * cols + c);
                            s
                        })
                    })
                    .collect();
            }
            out
        }
        _ => unreachable!("validated by make_pattern"),
    };
    ConsistencyFamily::new(p.space, members)
}

fn chain_bounded(v: &TreeView, k: usize, cap: usize) -> Result<Vec<PositionSet>> {
    let sets = maximal_chain_bounded(v.domain.branching, v.domain.max_len() + 1, k, cap)?;
    Ok(sets.iter().map(|s| s.iter().map(|n| v.pos(n)).collect()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Pattern,
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub set: Vec<String>,
    pub expected: bool,
    pub actual: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub checked_consistent: u64,
    pub checked_inconsistent: u64,
    pub exhaustive: bool,
    pub counterexample: Option<Counterexample>,
}

/// First failing entry of an expectation list, by list order.
fn first_failure(
    oracle: &dyn ConsistencyOracle,
    sets: &[PositionSet],
    expected: bool,
) -> Option<usize> {
    sets.par_iter().position_first(|s| oracle.consistent(s) != expected)
}

/// Lexicographic order on the sorted position sequences of two bitmasks.
fn mask_lex_cmp(a: u64, b: u64) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    if a == b {
        return Equal;
    }
    // both agree below i; the set holding i continues with i, the other
    // continues with something larger or ends
    let i = (a ^ b).trailing_zeros();
    let above = u64::MAX.checked_shl(i + 1).unwrap_or(0);
    let (other, holder_is_a) = if a >> i & 1 == 1 { (b, true) } else { (a, false) };
    let holder_less = other & above != 0;
    if holder_less == holder_is_a {
        Less
    } else {
        Greater
    }
}

pub fn verify(
    oracle: &dyn ConsistencyOracle,
    p: &PatternSpec,
    mode: VerifyMode,
    cap: u64,
) -> Result<VerificationReport> {
    if oracle.index() != &p.space {
        return Err(Error::IndexMismatch(format!(
            "witness index {:?} differs from pattern index {:?}",
            oracle.index(),
            p.space
        )));
    }
    let labels = p.labels();
    let texts = |s: &[usize]| p.space.subset_texts(&labels, s);
    let fail = |s: &[usize], expected: bool, consistent: u64, inconsistent: u64| VerificationReport {
        pass: false,
        checked_consistent: consistent,
        checked_inconsistent: inconsistent,
        exhaustive: mode == VerifyMode::Exhaustive,
        counterexample: Some(Counterexample {
            set: texts(s),
            expected,
            actual: !expected,
        }),
    };

    let n = p.space.len();
    if mode == VerifyMode::Exhaustive && (n >= 64 || (1u64 << n) - 1 > cap) {
        return Err(Error::cap("exhaustive verification", format!("2^{n} - 1 subsets"), cap));
    }

    let good = p.required_consistent(cap)?;
    let bad = p.required_inconsistent(cap)?;
    let (cg, cb) = (good.len() as u64, bad.len() as u64);
    if let Some(i) = first_failure(oracle, &good, true) {
        return Ok(fail(&good[i], true, cg, cb));
    }
    if let Some(i) = first_failure(oracle, &bad, false) {
        return Ok(fail(&bad[i], false, cg, cb));
    }
    if mode == VerifyMode::Pattern {
        return Ok(VerificationReport {
            pass: true,
            checked_consistent: cg,
            checked_inconsistent: cb,
            exhaustive: false,
            counterexample: None,
        });
    }

    let family = exact_family(p)?;
    let masks = family.masks().expect("n < 64");
    let members: u64 = (1..1u64 << n)
        .into_par_iter()
        .filter(|&m| masks.iter().any(|&f| m & !f == 0))
        .count() as u64;
    let total = (1u64 << n) - 1;
    let failure = (1..1u64 << n)
        .into_par_iter()
        .filter(|&m| {
            let subset: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
            let expected = masks.iter().any(|&f| m & !f == 0);
            oracle.consistent(&subset) != expected
        })
        .min_by(|&a, &b| mask_lex_cmp(a, b));
    if let Some(m) = failure {
        let subset: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
        let expected = masks.iter().any(|&f| m & !f == 0);
        return Ok(fail(&subset, expected, members, total - members));
    }
    Ok(VerificationReport {
        pass: true,
        checked_consistent: members,
        checked_inconsistent: total - members,
        exhaustive: true,
        counterexample: None,
    })
}

/// Soundness of a family against the pattern's generators: the first
/// required-consistent set outside it, or required-inconsistent set inside.
pub fn family_violation(family: &ConsistencyFamily, p: &PatternSpec, cap: u64) -> Result<Option<(PositionSet, bool)>> {
    let good = p.required_consistent(cap)?;
    if let Some(s) = good.iter().find(|s| !family.contains(s)) {
        return Ok(Some((s.clone(), true)));
    }
    let bad = p.required_inconsistent(cap)?;
    Ok(bad.iter().find(|s| family.contains(s)).map(|s| (s.clone(), false)))
}
