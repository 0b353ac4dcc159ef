//! Reference implementations for integration tests, written against plain
//! digit vectors and independent of the library's tree code.

#![allow(dead_code)]

use treelab_core::{IndexSpace, Label, Node};

pub type Digits = Vec<u8>;

/// `b^{<depth}` in lexicographic order (the derived order on digit vectors).
pub fn nodes(b: u8, depth: usize) -> Vec<Digits> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 1..depth {
        let mut next = Vec::new();
        for n in &frontier {
            for d in 0..b {
                let mut c: Digits = n.clone();
                c.push(d);
                next.push(c);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort();
    out
}

pub fn leaves(b: u8, len: usize) -> Vec<Digits> {
    nodes(b, len + 1).into_iter().filter(|n| n.len() == len).collect()
}

pub fn prefix(a: &[u8], b: &[u8]) -> bool {
    b.starts_with(a)
}

pub fn comparable(a: &[u8], b: &[u8]) -> bool {
    prefix(a, b) || prefix(b, a)
}

pub fn meet(a: &[u8], b: &[u8]) -> Digits {
    a.iter().zip(b).take_while(|(x, y)| x == y).map(|(x, _)| *x).collect()
}

pub fn lex_less(a: &[u8], b: &[u8]) -> bool {
    a < b
}

pub fn is_antichain(set: &[&Digits]) -> bool {
    set.iter().enumerate().all(|(i, a)| set[i + 1..].iter().all(|b| !comparable(a, b)))
}

pub fn is_chain(set: &[&Digits]) -> bool {
    set.iter().enumerate().all(|(i, a)| set[i + 1..].iter().all(|b| comparable(a, b)))
}

pub fn longest_chain(set: &[&Digits]) -> usize {
    set.iter().map(|top| set.iter().filter(|a| prefix(a, top)).count()).max().unwrap_or(0)
}

pub fn subset<T>(items: &[T], mask: u64) -> Vec<&T> {
    items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x).collect()
}

pub fn positions(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// Maximal antichains by brute force over all subsets.
pub fn maximal_antichains(b: u8, depth: usize) -> Vec<Vec<Digits>> {
    let all = nodes(b, depth);
    let n = all.len();
    assert!(n < 32);
    let anti: Vec<bool> = (0..1u64 << n).map(|m| is_antichain(&subset(&all, m))).collect();
    let mut out = Vec::new();
    for m in 1..1u64 << n {
        if anti[m as usize] && (0..n).all(|i| m >> i & 1 == 1 || !anti[(m | 1 << i) as usize]) {
            out.push(subset(&all, m).into_iter().cloned().collect::<Vec<_>>());
        }
    }
    out.sort();
    out
}

/// `⊴` and lex between all positions of the pairwise-meet tuple.
pub fn qf_signature(tuple: &[Digits]) -> Vec<bool> {
    let cl: Vec<Digits> = tuple.iter().flat_map(|a| tuple.iter().map(move |b| meet(a, b))).collect();
    let mut sig = Vec::new();
    for a in &cl {
        for b in &cl {
            sig.push(prefix(a, b));
            sig.push(lex_less(a, b));
        }
    }
    sig
}

/// `a∧b ⊴ c∧d` for all index quadruples, plus lex on the tuple.
pub fn delta_signature(tuple: &[Digits]) -> Vec<bool> {
    let n = tuple.len();
    let mut sig = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    sig.push(prefix(&meet(&tuple[i], &tuple[j]), &meet(&tuple[k], &tuple[l])));
                }
            }
            sig.push(lex_less(&tuple[i], &tuple[j]));
        }
    }
    sig
}

pub fn to_node(d: &[u8]) -> Node {
    Node::new(d.iter().map(|&x| u32::from(x)).collect())
}

pub fn from_node(n: &Node) -> Digits {
    n.digits().iter().map(|&x| x as u8).collect()
}

/// Tree labels of an index space as digit vectors.
pub fn label_digits(space: &IndexSpace) -> Vec<Digits> {
    space
        .labels()
        .iter()
        .map(|l| match l {
            Label::Node(n) => from_node(n),
            other => panic!("not a tree label: {other}"),
        })
        .collect()
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
