//! Antichain enumeration and construction.
//!
//! Two independent routes are provided: a brute-force subset scan over a
//! small domain ([`enumerate_antichains`], [`max_chain_bounded_sets`]) and
//! recursive product constructions ([`maximal_antichains`],
//! [`maximal_chain_bounded`], [`antichains_by_product`]) that scale past the
//! subset cap. Catalogs are always in the canonical [`NodeSet`] order.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qftype::qftype0;
use crate::tree::{Node, NodeSet, TreeDomain};

/// Default cap on the number of subsets a brute-force scan may visit.
pub const DEFAULT_SUBSET_CAP: u64 = 1 << 20;
/// Default cap on the number of sets a recursive construction may produce.
pub const DEFAULT_ITEM_CAP: usize = 1 << 20;
/// Default depth cap for [`maximal_antichains`].
pub const DEFAULT_MAXIMAL_DEPTH_CAP: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntichainCatalog {
    pub domain: TreeDomain,
    pub items: Vec<NodeSet>,
    pub maximal_only: bool,
}

impl AntichainCatalog {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Sorted lists of sorted node strings.
    pub fn to_texts(&self) -> Vec<Vec<String>> {
        self.items
            .iter()
            .map(|s| s.to_texts(self.domain.branching))
            .collect()
    }
}

impl Serialize for AntichainCatalog {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_texts().serialize(serializer)
    }
}

/// `α₀ = 0`, `α_{n+1} = α_n² + 1`: the number of maximal antichains of `2^{<n}`.
pub fn alpha(n: usize) -> BigUint {
    maximal_antichain_count(2, n)
}

/// The same recurrence for branching `b`: `β_{n+1} = β_n^b + 1`, `β₀ = 0`.
pub fn maximal_antichain_count(branching: u32, depth: usize) -> BigUint {
    let mut value = BigUint::zero();
    for _ in 0..depth {
        value = value.pow(branching) + BigUint::one();
    }
    value
}

/// Number of antichains of `b^{<depth}`, the empty one included.
/// `A₀ = 1`, `A_{n+1} = A_n^b + 1`.
pub fn antichain_count(branching: u32, depth: usize) -> BigUint {
    let mut value = BigUint::one();
    for _ in 0..depth {
        value = value.pow(branching) + BigUint::one();
    }
    value
}

/// Bitmask view of a small domain for subset scans.
struct SubsetScanner {
    nodes: Vec<Node>,
    /// For each node, the mask of its ancestors including itself.
    ancestors: Vec<u64>,
}

impl SubsetScanner {
    fn new(domain: &TreeDomain, cap: u64) -> Result<Self> {
        let count = domain.node_count();
        if count >= 64 || (1u128 << count) > u128::from(cap) {
            return Err(Error::cap(
                "subset enumeration",
                format!("2^{count} subsets"),
                cap,
            ));
        }
        let nodes = domain.enumerate_nodes();
        let ancestors = nodes
            .iter()
            .map(|v| {
                nodes
                    .iter()
                    .enumerate()
                    .filter(|(_, u)| u.is_prefix_of(v))
                    .fold(0u64, |m, (i, _)| m | 1 << i)
            })
            .collect();
        Ok(SubsetScanner { nodes, ancestors })
    }

    fn longest_chain(&self, mask: u64) -> u32 {
        (0..self.nodes.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| (mask & self.ancestors[i]).count_ones())
            .max()
            .unwrap_or(0)
    }

    fn is_maximal_chain_free(&self, mask: u64, k: u32) -> bool {
        (0..self.nodes.len())
            .filter(|i| mask >> i & 1 == 0)
            .all(|i| self.longest_chain(mask | 1 << i) >= k)
    }

    fn scan(&self, keep: impl Fn(u64) -> bool + Sync) -> Vec<NodeSet> {
        let total = 1u64 << self.nodes.len();
        let masks: Vec<u64> = (0..total).into_par_iter().filter(|&m| keep(m)).collect();
        let mut sets: Vec<NodeSet> = masks.into_iter().map(|m| self.to_set(m)).collect();
        sets.sort();
        sets
    }

    fn to_set(&self, mask: u64) -> NodeSet {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, n)| n.clone())
            .collect()
    }
}

/// All antichains of the domain by brute-force subset scan.
pub fn enumerate_antichains(domain: &TreeDomain, nonempty: bool, cap: u64) -> Result<AntichainCatalog> {
    let scanner = SubsetScanner::new(domain, cap)?;
    let items = scanner.scan(|m| (!nonempty || m != 0) && scanner.longest_chain(m) < 2);
    Ok(AntichainCatalog {
        domain: *domain,
        items,
        maximal_only: false,
    })
}

/// All maximal subsets with no `k` pairwise comparable elements, by subset scan.
pub fn max_chain_bounded_sets(domain: &TreeDomain, k: usize, cap: u64) -> Result<Vec<NodeSet>> {
    if k < 2 {
        return Err(Error::Precondition(format!("chain bound must be at least 2, got {k}")));
    }
    let scanner = SubsetScanner::new(domain, cap)?;
    let k = k as u32;
    Ok(scanner.scan(|m| scanner.longest_chain(m) < k && scanner.is_maximal_chain_free(m, k)))
}

/// Maximal antichains of `2^{<n}` built by the product recursion:
/// the depth-`(n+1)` catalog is `{⟨⟩}` together with every
/// `⟨0⟩⌢X_i ∪ ⟨1⟩⌢X_j`, in row-major `(i, j)` order.
pub fn maximal_antichains(n: usize, depth_cap: usize) -> Result<AntichainCatalog> {
    let domain = TreeDomain::binary(n)?;
    if n > depth_cap {
        return Err(Error::cap("maximal antichain depth", n, depth_cap));
    }
    let (zero, one) = (Node::from([0]), Node::from([1]));
    let mut items = vec![NodeSet::singleton(Node::root())];
    for _ in 1..n {
        let mut next = Vec::with_capacity(items.len() * items.len() + 1);
        next.push(NodeSet::singleton(Node::root()));
        for left in &items {
            let left = left.prefixed(&zero);
            for right in &items {
                next.push(left.union(&right.prefixed(&one)));
            }
        }
        items = next;
    }
    // {⟨⟩} sorts first and the products are already in canonical order
    debug_assert!(items.windows(2).all(|w| w[0] < w[1]));
    Ok(AntichainCatalog {
        domain,
        items,
        maximal_only: true,
    })
}

/// Maximal subsets of `b^{<depth}` with no `k`-element chain, by recursion on
/// the root: either the root is in (each child subtree then carries a maximal
/// set with no `(k-1)`-chain) or it is out (each child subtree carries a
/// maximal set with no `k`-chain and some child already holds a `(k-1)`-chain).
pub fn maximal_chain_bounded(branching: u32, depth: usize, k: usize, item_cap: usize) -> Result<Vec<NodeSet>> {
    if k < 2 {
        return Err(Error::Precondition(format!("chain bound must be at least 2, got {k}")));
    }
    TreeDomain::new(branching, depth)?;
    // table[j][d]: maximal sets of b^{<d} with no (j+1)-chain, paired with their longest chain
    let mut table: Vec<Vec<Vec<(NodeSet, usize)>>> = vec![vec![vec![(NodeSet::new(), 0)]; depth + 1]; k];
    for d in 1..=depth {
        for j in 1..k {
            let bound = j + 1;
            let mut out = Vec::new();
            for combo in product(&table[j - 1][d - 1], branching as usize, item_cap)? {
                let mut set = NodeSet::singleton(Node::root());
                let mut chain = 0;
                for (c, (s, len)) in combo.iter().enumerate() {
                    set = set.union(&s.prefixed(&Node::from([c as u32])));
                    chain = chain.max(*len);
                }
                out.push((set, chain + 1));
            }
            for combo in product(&table[j][d - 1], branching as usize, item_cap)? {
                let chain = combo.iter().map(|(_, len)| *len).max().unwrap_or(0);
                if chain + 1 < bound {
                    continue;
                }
                let set = combo
                    .iter()
                    .enumerate()
                    .fold(NodeSet::new(), |acc, (c, (s, _))| acc.union(&s.prefixed(&Node::from([c as u32]))));
                out.push((set, chain));
            }
            if out.len() > item_cap {
                return Err(Error::cap("chain-bounded sets", out.len(), item_cap));
            }
            table[j][d] = out;
        }
    }
    let mut sets: Vec<NodeSet> = table[k - 1][depth].drain(..).map(|(s, _)| s).collect();
    sets.sort();
    Ok(sets)
}

/// Every antichain of `b^{<depth}` (the empty one included) by recursion:
/// `{⟨⟩}` plus the products of antichains of the child subtrees.
pub fn antichains_by_product(branching: u32, depth: usize, item_cap: usize) -> Result<Vec<NodeSet>> {
    let needed = antichain_count(branching, depth);
    if needed > BigUint::from(item_cap) {
        return Err(Error::cap("antichains", needed, item_cap));
    }
    let mut items = vec![NodeSet::new()];
    for _ in 0..depth {
        let mut next = vec![NodeSet::singleton(Node::root())];
        for combo in product(&items, branching as usize, item_cap)? {
            let set = combo
                .iter()
                .enumerate()
                .fold(NodeSet::new(), |acc, (c, s)| acc.union(&s.prefixed(&Node::from([c as u32]))));
            next.push(set);
        }
        items = next;
    }
    items.sort();
    Ok(items)
}

fn product<T>(items: &[T], arity: usize, cap: usize) -> Result<Vec<Vec<&T>>> {
    let total = (items.len() as u128).pow(arity as u32);
    if total > cap as u128 {
        return Err(Error::cap("product construction", total, cap));
    }
    let mut out: Vec<Vec<&T>> = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |it| {
                    let mut v = prefix.clone();
                    v.push(it);
                    v
                })
            })
            .collect();
    }
    Ok(out)
}

/// The canonical enumeration `X₀, X₁, …` of nonempty finite binary antichains:
/// by the least depth containing them, then catalog order.
pub fn canonical_antichains(count: usize) -> Result<Vec<NodeSet>> {
    let mut out = Vec::with_capacity(count);
    let mut depth = 1;
    while out.len() < count {
        let fresh = antichains_by_product(2, depth, DEFAULT_ITEM_CAP)?
            .into_iter()
            .filter(|s| s.iter().any(|n| n.len() + 1 == depth));
        out.extend(fresh.take(count - out.len()));
        depth += 1;
    }
    Ok(out)
}

/// `⋃_{i<m} 1^i ⌢ 0 ⌢ X_i` over the canonical enumeration.
pub fn universal_prefix(m: usize) -> Result<NodeSet> {
    let catalog = canonical_antichains(m)?;
    Ok(catalog
        .iter()
        .enumerate()
        .flat_map(|(i, x)| x.prefixed(&Node::repeat(1, i).child(0)).to_vec())
        .collect())
}

/// The lexicographically first `<_lex`-monotone injection of `y` into `x`
/// whose image is strongly isomorphic to `y`, as `(source, image)` pairs.
pub fn find_iso_copy(y: &NodeSet, x: &NodeSet) -> Option<Vec<(Node, Node)>> {
    let source = y.to_vec();
    let target = x.to_vec();
    if source.len() > target.len() {
        return None;
    }
    let mut chosen = Vec::with_capacity(source.len());
    if search(&source, &target, 0, &mut chosen) {
        Some(source.into_iter().zip(chosen).collect())
    } else {
        None
    }
}

fn search(source: &[Node], target: &[Node], from: usize, chosen: &mut Vec<Node>) -> bool {
    let depth = chosen.len();
    if depth == source.len() {
        return true;
    }
    let remaining = source.len() - depth;
    for i in from..=target.len() - remaining {
        chosen.push(target[i].clone());
        // the type of a prefix tuple is a sub-pattern of the full type, so a
        // mismatch here rules out every extension
        if qftype0(&source[..=depth]) == qftype0(chosen) && search(source, target, i + 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n<const N: usize>(d: [u32; N]) -> Node {
        Node::from(d)
    }

    fn set(nodes: &[Node]) -> NodeSet {
        nodes.iter().cloned().collect()
    }

    /// Independent brute force straight from the definitions, no bitmasks.
    fn oracle_antichains(domain: &TreeDomain) -> Vec<NodeSet> {
        let nodes = domain.enumerate_nodes();
        let mut out = Vec::new();
        for mask in 0u32..1 << nodes.len() {
            let s: NodeSet = nodes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, v)| v.clone())
                .collect();
            if s.is_antichain() {
                out.push(s);
            }
        }
        out
    }

    fn oracle_maximal(domain: &TreeDomain) -> Vec<NodeSet> {
        let all = oracle_antichains(domain);
        let mut out: Vec<NodeSet> = all
            .iter()
            .filter(|a| !all.iter().any(|b| b != *a && a.is_subset(b)))
            .cloned()
            .collect();
        out.sort();
        out
    }

    #[test]
    fn enumerate_examples() {
        let d = TreeDomain::binary(2).unwrap();
        let cat = enumerate_antichains(&d, true, DEFAULT_SUBSET_CAP).unwrap();
        let mut expected = vec![
            set(&[Node::root()]),
            set(&[n([0])]),
            set(&[n([1])]),
            set(&[n([0]), n([1])]),
        ];
        expected.sort();
        assert_eq!(cat.items, expected);

        let d3 = TreeDomain::binary(3).unwrap();
        assert_eq!(enumerate_antichains(&d3, true, DEFAULT_SUBSET_CAP).unwrap().len(), 25);

        let d1 = TreeDomain::binary(1).unwrap();
        let cat = enumerate_antichains(&d1, false, DEFAULT_SUBSET_CAP).unwrap();
        assert_eq!(cat.items, vec![NodeSet::new(), set(&[Node::root()])]);
    }

    #[test]
    fn enumerate_respects_cap() {
        let d = TreeDomain::binary(5).unwrap();
        let err = enumerate_antichains(&d, true, DEFAULT_SUBSET_CAP).unwrap_err();
        assert!(err.is_resource_cap());
    }

    #[test]
    fn scan_matches_definition_oracle() {
        for (b, depth) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3)] {
            let d = TreeDomain::new(b, depth).unwrap();
            let mut expected = oracle_antichains(&d);
            expected.sort();
            assert_eq!(enumerate_antichains(&d, false, DEFAULT_SUBSET_CAP).unwrap().items, expected);
            assert_eq!(antichains_by_product(b, depth, DEFAULT_ITEM_CAP).unwrap(), expected);
            assert_eq!(BigUint::from(expected.len()), antichain_count(b, depth));
        }
    }

    #[test]
    fn maximal_examples() {
        let m2 = maximal_antichains(2, DEFAULT_MAXIMAL_DEPTH_CAP).unwrap();
        assert_eq!(m2.items, vec![set(&[Node::root()]), set(&[n([0]), n([1])])]);
        let m3 = maximal_antichains(3, DEFAULT_MAXIMAL_DEPTH_CAP).unwrap();
        assert_eq!(m3.len(), 5);
        assert!(m3.items.contains(&set(&[n([0]), n([1, 0]), n([1, 1])])));
        let m1 = maximal_antichains(1, DEFAULT_MAXIMAL_DEPTH_CAP).unwrap();
        assert_eq!(m1.items, vec![set(&[Node::root()])]);
        assert!(maximal_antichains(7, DEFAULT_MAXIMAL_DEPTH_CAP).unwrap_err().is_resource_cap());
        assert!(maximal_antichains(0, DEFAULT_MAXIMAL_DEPTH_CAP).is_err());
    }

    #[test]
    fn recursion_agrees_with_brute_force() {
        for depth in 1..=4 {
            let d = TreeDomain::binary(depth).unwrap();
            let rec = maximal_antichains(depth, DEFAULT_MAXIMAL_DEPTH_CAP).unwrap();
            assert_eq!(rec.items, oracle_maximal(&d));
            assert_eq!(rec.items, max_chain_bounded_sets(&d, 2, DEFAULT_SUBSET_CAP).unwrap());
            assert!(rec.items.iter().all(NodeSet::is_antichain));
        }
        for depth in 1..=5 {
            let rec = maximal_antichains(depth, DEFAULT_MAXIMAL_DEPTH_CAP).unwrap();
            assert_eq!(BigUint::from(rec.len()), alpha(depth));
        }
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(0), BigUint::zero());
        assert_eq!(alpha(3), BigUint::from(5u32));
        assert_eq!(alpha(5), BigUint::from(677u32));
        let unrolled: Vec<u64> = (0..=5).map(|i| alpha(i).try_into().unwrap()).collect();
        assert_eq!(unrolled, vec![0, 1, 2, 5, 26, 677]);
        // arbitrary precision: α₁₀ has far more than 64 bits
        assert!(alpha(10).bits() > 64);
    }

    #[test]
    fn count_identity() {
        for depth in 0..=4 {
            assert_eq!(antichain_count(2, depth), alpha(depth + 1));
        }
    }

    #[test]
    fn chain_bounded_examples() {
        let d2 = TreeDomain::binary(2).unwrap();
        assert_eq!(
            max_chain_bounded_sets(&d2, 2, DEFAULT_SUBSET_CAP).unwrap(),
            vec![set(&[Node::root()]), set(&[n([0]), n([1])])]
        );
        assert_eq!(
            max_chain_bounded_sets(&d2, 3, DEFAULT_SUBSET_CAP).unwrap(),
            vec![set(&[Node::root(), n([0]), n([1])])]
        );
        let d3 = TreeDomain::binary(3).unwrap();
        let three = max_chain_bounded_sets(&d3, 3, DEFAULT_SUBSET_CAP).unwrap();
        for s in &three {
            for i in 0..2 {
                for j in 0..2 {
                    let chain = [Node::root(), n([i]), n([i, j])];
                    assert!(chain.iter().any(|v| !s.contains(v)), "{s} holds a 3-chain");
                }
            }
        }
        assert_eq!(three.len(), 5);
    }

    #[test]
    fn chain_bounded_recursion_matches_scan() {
        for (b, depth) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3)] {
            let d = TreeDomain::new(b, depth).unwrap();
            for k in 2..=4 {
                let scan = max_chain_bounded_sets(&d, k, DEFAULT_SUBSET_CAP).unwrap();
                let rec = maximal_chain_bounded(b, depth, k, DEFAULT_ITEM_CAP).unwrap();
                assert_eq!(scan, rec, "b={b} depth={depth} k={k}");
            }
        }
    }

    #[test]
    fn chain_bounded_members_hold_long_chains() {
        let d = TreeDomain::binary(4).unwrap();
        for k in 2..=4 {
            for s in max_chain_bounded_sets(&d, k, DEFAULT_SUBSET_CAP).unwrap() {
                let longest = s
                    .iter()
                    .map(|v| s.iter().filter(|u| u.is_prefix_of(v)).count())
                    .max()
                    .unwrap();
                assert_eq!(longest, k - 1);
            }
        }
    }

    #[test]
    fn canonical_enumeration_starts_as_documented() {
        let xs = canonical_antichains(4).unwrap();
        assert_eq!(xs[0], set(&[Node::root()]));
        assert_eq!(xs[1], set(&[n([0])]));
        assert_eq!(xs[2], set(&[n([0]), n([1])]));
        assert_eq!(xs[3], set(&[n([1])]));
        assert_eq!(canonical_antichains(676).unwrap().len(), 676);
    }

    #[test]
    fn universal_prefix_examples() {
        assert_eq!(universal_prefix(1).unwrap(), set(&[n([0])]));
        assert_eq!(universal_prefix(2).unwrap(), set(&[n([0]), n([1, 0, 0])]));
        for m in 0..30 {
            assert!(universal_prefix(m).unwrap().is_antichain());
        }
    }

    #[test]
    fn universal_prefix_contains_copies() {
        let m = 25;
        let x = universal_prefix(m).unwrap();
        for y in canonical_antichains(m).unwrap() {
            let copy = find_iso_copy(&y, &x).unwrap_or_else(|| panic!("no copy of {y}"));
            let (src, img): (Vec<Node>, Vec<Node>) = copy.into_iter().unzip();
            assert!(crate::qftype::sim0(&src, &img));
            assert!(img.iter().all(|v| x.contains(v)));
        }
    }

    #[test]
    fn find_iso_copy_examples() {
        let pair = set(&[n([0]), n([1])]);
        let x = universal_prefix(3).unwrap();
        let found = find_iso_copy(&pair, &x).unwrap();
        // every incomparable pair is a copy; the lex-first one wins
        assert_eq!(found, vec![(n([0]), n([0])), (n([1]), n([1, 0, 0]))]);

        let x = set(&[n([1, 1]), n([0, 1])]);
        assert_eq!(
            find_iso_copy(&set(&[Node::root()]), &x).unwrap(),
            vec![(Node::root(), n([0, 1]))]
        );
        assert_eq!(find_iso_copy(&pair, &set(&[n([0])])), None);

        // a triple whose first two elements split above the third
        let y = set(&[n([0, 0]), n([0, 1]), n([1])]);
        let x = set(&[n([0]), n([1, 0]), n([1, 1])]);
        assert_eq!(find_iso_copy(&y, &x), None);
    }
}
