//! The tree index domain: finite digit strings under the prefix order.
//!
//! A [`Node`] is a plain digit string. The derived `Ord` on nodes is the
//! strict lexicographic order of trees (a proper prefix sorts first, otherwise
//! the first differing digit decides), so any sorted collection of nodes is in
//! canonical order. Bounds on branching and depth live in [`TreeDomain`].

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A node of a tree, given by its digits. The root is the empty string.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node(Vec<u32>);

/// Outcome of comparing two nodes under the prefix order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Equal,
    /// The left node is a proper prefix of the right one.
    StrictlyBelow,
    StrictlyAbove,
    Incomparable,
}

impl Node {
    pub fn root() -> Self {
        Node(Vec::new())
    }

    pub fn new(digits: Vec<u32>) -> Self {
        Node(digits)
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parent(&self) -> Option<Node> {
        if self.is_root() {
            None
        } else {
            Some(Node(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn child(&self, digit: u32) -> Node {
        let mut digits = self.0.clone();
        digits.push(digit);
        Node(digits)
    }

    /// `digit` repeated `count` times.
    pub fn repeat(digit: u32, count: usize) -> Node {
        Node(vec![digit; count])
    }

    /// Prefix order, reflexive.
    pub fn is_prefix_of(&self, other: &Node) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn compare(&self, other: &Node) -> Relation {
        match (self.is_prefix_of(other), other.is_prefix_of(self)) {
            (true, true) => Relation::Equal,
            (true, false) => Relation::StrictlyBelow,
            (false, true) => Relation::StrictlyAbove,
            (false, false) => Relation::Incomparable,
        }
    }

    pub fn is_comparable(&self, other: &Node) -> bool {
        self.compare(other) != Relation::Incomparable
    }

    /// Longest common prefix.
    pub fn meet(&self, other: &Node) -> Node {
        let shared = self
            .0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count();
        Node(self.0[..shared].to_vec())
    }

    /// Strict lexicographic order: a proper prefix comes first, otherwise
    /// the digit just past the meet decides.
    pub fn lex_less(&self, other: &Node) -> bool {
        let at = self.meet(other).len();
        match (self.0.get(at), other.0.get(at)) {
            (None, Some(_)) => true,
            (Some(a), Some(b)) => a < b,
            _ => false,
        }
    }

    pub fn concat(&self, other: &Node) -> Node {
        let mut digits = Vec::with_capacity(self.len() + other.len());
        digits.extend_from_slice(&self.0);
        digits.extend_from_slice(&other.0);
        Node(digits)
    }

    pub fn max_digit(&self) -> Option<u32> {
        self.0.iter().copied().max()
    }

    /// Text form: compact digits when `branching <= 10`, dot-separated otherwise.
    pub fn to_text(&self, branching: u32) -> String {
        if branching <= 10 {
            self.0.iter().map(|d| char::from(b'0' + *d as u8)).collect()
        } else {
            self.0
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// The compact text form when every digit is below ten, dotted otherwise.
    pub fn to_auto_text(&self) -> String {
        let branching = self.max_digit().map_or(2, |d| d + 1);
        self.to_text(branching.max(2))
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "⟩")
    }
}

impl From<&[u32]> for Node {
    fn from(digits: &[u32]) -> Self {
        Node(digits.to_vec())
    }
}

impl<const N: usize> From<[u32; N]> for Node {
    fn from(digits: [u32; N]) -> Self {
        Node(digits.to_vec())
    }
}

/// Parses a node under branching `b`: "" is the root, plain digits when
/// `b <= 10`, dot-separated numbers otherwise.
pub fn parse_node(text: &str, branching: u32) -> Result<Node> {
    if text.is_empty() {
        return Ok(Node::root());
    }
    let parse_err = |reason: &str| Error::Parse {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let digits: Vec<u64> = if branching <= 10 {
        text.chars()
            .map(|c| c.to_digit(10).map(u64::from).ok_or_else(|| parse_err("non-digit character")))
            .collect::<Result<_>>()?
    } else {
        text.split('.')
            .map(|part| {
                if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(parse_err("expected dot-separated decimal digits"));
                }
                part.parse::<u64>().map_err(|_| parse_err("digit overflow"))
            })
            .collect::<Result<_>>()?
    };
    if let Some(&digit) = digits.iter().find(|&&d| d >= u64::from(branching)) {
        return Err(Error::MalformedNode {
            text: text.to_string(),
            digit,
            branching,
        });
    }
    Ok(Node(digits.into_iter().map(|d| d as u32).collect()))
}

/// The tuple of all pairwise meets, row-major, duplicates kept.
pub fn closure(tuple: &[Node]) -> Vec<Node> {
    let mut out = Vec::with_capacity(tuple.len() * tuple.len());
    for a in tuple {
        for b in tuple {
            out.push(a.meet(b));
        }
    }
    out
}

pub fn is_antichain<'a>(nodes: impl IntoIterator<Item = &'a Node>) -> bool {
    all_pairs(nodes, |a, b| !a.is_comparable(b))
}

pub fn is_chain<'a>(nodes: impl IntoIterator<Item = &'a Node>) -> bool {
    all_pairs(nodes, |a, b| a.is_comparable(b))
}

fn all_pairs<'a>(
    nodes: impl IntoIterator<Item = &'a Node>,
    pred: impl Fn(&Node, &Node) -> bool,
) -> bool {
    let nodes: Vec<&Node> = nodes.into_iter().collect();
    nodes
        .iter()
        .enumerate()
        .all(|(i, a)| nodes[i + 1..].iter().all(|b| pred(a, b)))
}

/// `b^{<depth}`, optionally with the leaf level `b^{depth}` included.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeDomain {
    pub branching: u32,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub leaf_level: bool,
}

impl TreeDomain {
    pub fn new(branching: u32, depth: usize) -> Result<Self> {
        if branching < 2 {
            return Err(Error::Precondition(format!(
                "branching must be at least 2, got {branching}"
            )));
        }
        if depth < 1 {
            return Err(Error::Precondition("depth must be at least 1".into()));
        }
        Ok(TreeDomain {
            branching,
            depth,
            leaf_level: false,
        })
    }

    pub fn binary(depth: usize) -> Result<Self> {
        Self::new(2, depth)
    }

    pub fn with_leaf_level(mut self) -> Self {
        self.leaf_level = true;
        self
    }

    /// Longest node length admitted.
    pub fn max_len(&self) -> usize {
        if self.leaf_level {
            self.depth
        } else {
            self.depth - 1
        }
    }

    pub fn node_count(&self) -> u128 {
        let b = u128::from(self.branching);
        (0..=self.max_len() as u32).map(|l| b.pow(l)).sum()
    }

    pub fn contains(&self, node: &Node) -> bool {
        node.len() <= self.max_len() && node.digits().iter().all(|&d| d < self.branching)
    }

    /// Concatenation, flagged when the result leaves the domain.
    pub fn concat(&self, a: &Node, b: &Node) -> Result<Node> {
        let joined = a.concat(b);
        if self.contains(&joined) {
            Ok(joined)
        } else {
            Err(Error::DepthExceeded {
                node: joined.to_text(self.branching),
                depth: self.depth,
            })
        }
    }

    /// Every node in lexicographic order (depth-first, children ascending).
    pub fn enumerate_nodes(&self) -> Vec<Node> {
        let mut out = Vec::new();
        let mut stack = vec![Node::root()];
        while let Some(node) = stack.pop() {
            if node.len() < self.max_len() {
                for d in (0..self.branching).rev() {
                    stack.push(node.child(d));
                }
            }
            out.push(node);
        }
        out
    }

    pub fn parse(&self, text: &str) -> Result<Node> {
        let node = parse_node(text, self.branching)?;
        if node.len() > self.max_len() {
            return Err(Error::DepthExceeded {
                node: text.to_string(),
                depth: self.depth,
            });
        }
        Ok(node)
    }
}

/// A finite set of nodes, always enumerated in lexicographic order.
///
/// Being an antichain is a predicate ([`NodeSet::is_antichain`]), not an
/// invariant. The derived order compares the sorted element sequences
/// lexicographically, which is the canonical catalog order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(BTreeSet<Node>);

impl NodeSet {
    pub fn new() -> Self {
        NodeSet(BTreeSet::new())
    }

    pub fn singleton(node: Node) -> Self {
        NodeSet(BTreeSet::from([node]))
    }

    pub fn insert(&mut self, node: Node) -> bool {
        self.0.insert(node)
    }

    pub fn contains(&self, node: &Node) -> bool {
        self.0.contains(node)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &Node> + ExactSizeIterator {
        self.0.iter()
    }

    pub fn first(&self) -> Option<&Node> {
        self.0.first()
    }

    pub fn to_vec(&self) -> Vec<Node> {
        self.0.iter().cloned().collect()
    }

    pub fn is_antichain(&self) -> bool {
        is_antichain(self.iter())
    }

    pub fn is_chain(&self) -> bool {
        is_chain(self.iter())
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.union(&other.0).cloned().collect())
    }

    /// `prefix ⌢ X`.
    pub fn prefixed(&self, prefix: &Node) -> NodeSet {
        self.iter().map(|n| prefix.concat(n)).collect()
    }

    /// `X ⌢ suffix`.
    pub fn suffixed(&self, suffix: &Node) -> NodeSet {
        self.iter().map(|n| n.concat(suffix)).collect()
    }

    pub fn to_texts(&self, branching: u32) -> Vec<String> {
        self.iter().map(|n| n.to_text(branching)).collect()
    }
}

impl FromIterator<Node> for NodeSet {
    fn from_iter<I: IntoIterator<Item = Node>>(iter: I) -> Self {
        NodeSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = &'a Node;
    type IntoIter = std::collections::btree_set::Iter<'a, Node>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, n) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n<const N: usize>(d: [u32; N]) -> Node {
        Node::from(d)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_node("010", 2).unwrap(), n([0, 1, 0]));
        assert_eq!(parse_node("", 2).unwrap(), Node::root());
        assert!(matches!(
            parse_node("2", 2),
            Err(Error::MalformedNode { digit: 2, .. })
        ));
        assert!(matches!(parse_node("0a", 2), Err(Error::Parse { .. })));
        assert_eq!(parse_node("11.3.0", 12).unwrap(), n([11, 3, 0]));
        assert!(parse_node("11..0", 12).is_err());
        assert!(parse_node("12", 12).is_err());
    }

    #[test]
    fn text_round_trips() {
        assert_eq!(n([0, 1, 1]).to_text(2), "011");
        assert_eq!(n([10, 0]).to_text(11), "10.0");
        assert_eq!(Node::root().to_text(3), "");
    }

    #[test]
    fn meet_examples() {
        assert_eq!(n([0, 1, 0]).meet(&n([0, 1, 1])), n([0, 1]));
        assert_eq!(Node::root().meet(&n([1, 0])), Node::root());
        assert_eq!(n([0, 1]).meet(&n([0, 1])), n([0, 1]));
    }

    #[test]
    fn compare_examples() {
        assert_eq!(n([0]).compare(&n([0, 1])), Relation::StrictlyBelow);
        assert_eq!(n([0, 1]).compare(&n([1])), Relation::Incomparable);
        assert_eq!(Node::root().compare(&Node::root()), Relation::Equal);
        assert_eq!(n([0, 1]).compare(&n([0])), Relation::StrictlyAbove);
    }

    #[test]
    fn lex_examples() {
        assert!(n([0]).lex_less(&n([0, 0])));
        assert!(n([0, 0, 1]).lex_less(&n([0, 1])));
        assert!(!n([1]).lex_less(&n([0, 1])));
        assert!(!n([0]).lex_less(&n([0])));
    }

    #[test]
    fn concat_examples() {
        assert_eq!(n([1]).concat(&n([0, 1])), n([1, 0, 1]));
        assert_eq!(Node::root().concat(&n([1])), n([1]));
        let set: NodeSet = [Node::root(), n([1])].into_iter().collect();
        let expected: NodeSet = [n([0]), n([0, 1])].into_iter().collect();
        assert_eq!(set.prefixed(&n([0])), expected);
        let d = TreeDomain::binary(2).unwrap();
        assert!(d.concat(&n([1]), &n([0])).is_err());
        assert_eq!(d.concat(&Node::root(), &n([0])).unwrap(), n([0]));
    }

    #[test]
    fn closure_examples() {
        assert_eq!(
            closure(&[n([0, 0]), n([0, 1])]),
            vec![n([0, 0]), n([0]), n([0]), n([0, 1])]
        );
        assert_eq!(closure(&[Node::root()]), vec![Node::root()]);
        let r = Node::root();
        assert_eq!(
            closure(&[n([0]), n([1]), n([1, 0])]),
            vec![
                n([0]),
                r.clone(),
                r.clone(),
                r.clone(),
                n([1]),
                n([1]),
                r,
                n([1]),
                n([1, 0])
            ]
        );
    }

    #[test]
    fn antichain_and_chain_examples() {
        let a: NodeSet = [n([0]), n([1, 0]), n([1, 1])].into_iter().collect();
        assert!(a.is_antichain());
        let c: NodeSet = [n([0]), n([0, 1])].into_iter().collect();
        assert!(!c.is_antichain());
        assert!(c.is_chain());
        assert!(NodeSet::new().is_antichain());
        assert!(NodeSet::new().is_chain());
    }

    #[test]
    fn enumerate_examples() {
        let d = TreeDomain::binary(2).unwrap();
        assert_eq!(d.enumerate_nodes(), vec![Node::root(), n([0]), n([1])]);
        let d = TreeDomain::binary(3).unwrap();
        assert_eq!(d.enumerate_nodes().len(), 1 + 2 + 4);
        assert_eq!(d.node_count(), 7);
        let d = TreeDomain::new(3, 2).unwrap();
        assert_eq!(
            d.enumerate_nodes(),
            vec![Node::root(), n([0]), n([1]), n([2])]
        );
        let d = TreeDomain::binary(2).unwrap().with_leaf_level();
        assert_eq!(d.enumerate_nodes().len(), 7);
        assert!(TreeDomain::new(1, 3).is_err());
        assert!(TreeDomain::new(2, 0).is_err());
    }

    #[test]
    fn lex_is_strict_total_order_on_small_domains() {
        for (b, depth) in [(2, 5), (3, 4)] {
            let nodes = TreeDomain::new(b, depth).unwrap().enumerate_nodes();
            for (i, x) in nodes.iter().enumerate() {
                for (j, y) in nodes.iter().enumerate() {
                    assert_eq!(x.lex_less(y), i < j, "{x} vs {y}");
                    assert_eq!(x.lex_less(y), x < y);
                }
            }
        }
    }

    #[test]
    fn closure_is_meet_closed() {
        let nodes = TreeDomain::binary(4).unwrap().enumerate_nodes();
        for a in &nodes {
            for b in nodes.iter().step_by(3) {
                for c in nodes.iter().step_by(5) {
                    let cl = closure(&[a.clone(), b.clone(), c.clone()]);
                    for x in &cl {
                        for y in &cl {
                            assert!(cl.contains(&x.meet(y)));
                        }
                    }
                    let underlying: BTreeSet<_> = cl.iter().cloned().collect();
                    let again: BTreeSet<_> = closure(&cl).into_iter().collect();
                    assert_eq!(underlying, again);
                }
            }
        }
    }

    fn node_strategy() -> impl Strategy<Value = Node> {
        prop::collection::vec(0u32..3, 0..6).prop_map(Node::new)
    }

    proptest! {
        #[test]
        fn meet_is_a_semilattice(a in node_strategy(), b in node_strategy(), c in node_strategy()) {
            prop_assert_eq!(a.meet(&a), a.clone());
            prop_assert_eq!(a.meet(&b), b.meet(&a));
            prop_assert_eq!(a.meet(&b).meet(&c), a.meet(&b.meet(&c)));
            let m = a.meet(&b);
            prop_assert!(m.is_prefix_of(&a) && m.is_prefix_of(&b));
            // any common prefix lies below the meet
            let k = a.len().min(b.len());
            for l in 0..=k {
                let xi = Node::from(&a.digits()[..l]);
                if xi.is_prefix_of(&b) {
                    prop_assert!(xi.is_prefix_of(&m));
                }
            }
        }

        #[test]
        fn compare_agrees_with_meet(a in node_strategy(), b in node_strategy()) {
            let below = a.compare(&b) == Relation::StrictlyBelow;
            prop_assert_eq!(below, a.meet(&b) == a && a != b);
        }

        #[test]
        fn parse_inverts_to_text(a in node_strategy()) {
            prop_assert_eq!(parse_node(&a.to_text(3), 3).unwrap(), a.clone());
            prop_assert_eq!(parse_node(&a.to_text(12), 12).unwrap(), a);
        }
    }
}
