//! Transformations of parameter trees: fattening, elongation, the k-ATP to
//! ATP reduction built from them, and the antichain-collapse skeleton behind
//! the one-variable embedding.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::antichains::maximal_antichains;
use crate::error::{Error, Result};
use crate::index::{IndexSpace, Label};
use crate::oracles::{params_consistent, ConsistencyOracle, Param, Witness};
use crate::qftype::sim0;
use crate::tree::{Node, NodeSet, TreeDomain};

/// A witness whose parameter at each label is a tuple of parameters of a
/// base witness; `ψ(x; ȳ) = ⋀ φ(x, y_i)`, so a set of labels is consistent iff
/// the union of their components is consistent in the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleWitness {
    base: Witness,
    space: IndexSpace,
    components: Vec<Vec<usize>>,
}

impl TupleWitness {
    pub fn identity(base: Witness) -> Self {
        let space = *base.space();
        let components = (0..space.len()).map(|i| vec![i]).collect();
        TupleWitness {
            base,
            space,
            components,
        }
    }

    /// `components[i]` lists base positions, in component order, for label `i`.
    pub fn new(base: Witness, space: IndexSpace, components: Vec<Vec<usize>>) -> Result<Self> {
        if components.len() != space.len() {
            return Err(Error::IndexMismatch(format!(
                "{} component tuples for {} labels",
                components.len(),
                space.len()
            )));
        }
        let n = base.space().len();
        if let Some(&bad) = components.iter().flatten().find(|&&i| i >= n) {
            return Err(Error::IndexMismatch(format!("source position {bad} outside {n} base labels")));
        }
        Ok(TupleWitness {
            base,
            space,
            components,
        })
    }

    pub fn base(&self) -> &Witness {
        &self.base
    }

    pub fn space(&self) -> &IndexSpace {
        &self.space
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// The common tuple length, if uniform.
    pub fn arity(&self) -> Option<usize> {
        let first = self.components.first()?.len();
        self.components.iter().all(|c| c.len() == first).then_some(first)
    }

    pub fn is_identity(&self) -> bool {
        self.space == *self.base.space() && self.components.iter().enumerate().all(|(i, c)| c == &[i])
    }

    pub fn component_params(&self, position: usize) -> Vec<&Param> {
        self.components[position].iter().map(|&i| self.base.param(i)).collect()
    }

    /// Base labels behind each component, per label.
    pub fn provenance(&self) -> Vec<Vec<Label>> {
        let labels = self.base.space().labels();
        self.components
            .iter()
            .map(|c| c.iter().map(|&i| labels[i].clone()).collect())
            .collect()
    }

    /// Union of the base positions behind `subset`, sorted.
    pub fn sources(&self, subset: &[usize]) -> Vec<usize> {
        let set: BTreeSet<usize> = subset.iter().flat_map(|&j| self.components[j].iter().copied()).collect();
        set.into_iter().collect()
    }

    fn tree(&self) -> Result<TreeDomain> {
        match self.space {
            IndexSpace::Tree(d) if d.branching == 2 => Ok(d),
            _ => Err(Error::Precondition("tree transforms need a binary tree index".into())),
        }
    }

    fn rebuild(&self, domain: TreeDomain, sources: impl Fn(&Node) -> Vec<Node>) -> Result<TupleWitness> {
        let from = self.space;
        let space = IndexSpace::Tree(domain);
        let components = domain
            .enumerate_nodes()
            .iter()
            .map(|eta| {
                sources(eta)
                    .iter()
                    .flat_map(|src| {
                        let at = from.node_position(src).expect("source node within budget");
                        self.components[at].iter().copied()
                    })
                    .collect()
            })
            .collect();
        TupleWitness::new(self.base.clone(), space, components)
    }
}

impl ConsistencyOracle for TupleWitness {
    fn index(&self) -> &IndexSpace {
        &self.space
    }

    fn consistent(&self, subset: &[usize]) -> bool {
        let sources = self.sources(subset);
        params_consistent(self.base.backend(), sources.iter().map(|&i| self.base.param(i)))
    }
}

/// Source nodes of `a^{(m)}_η`: `ρ⌢η` for `ρ ∈ 2^m`, where component `c`
/// takes `ρ(j)` = bit `j` of `c`. This is the order produced by
/// `a^{(m+1)}_η = (a^{(m)}_{0⌢η}, a^{(m)}_{1⌢η})`.
pub fn fattening_sources(eta: &Node, m: usize) -> Vec<Node> {
    (0..1usize << m)
        .map(|c| {
            let rho: Vec<u32> = (0..m).map(|j| (c >> j & 1) as u32).collect();
            Node::new(rho).concat(eta)
        })
        .collect()
}

/// Source nodes of `b_η`: `η′, η′⌢0, …, η′⌢0^{k−1}` where `η′` has length
/// `k(l−1)+1`, carries `η(i)` at position `ik` and 0 elsewhere; the root
/// takes `⟨⟩, ⟨0⟩, …, 0^{k−1}`.
pub fn elongation_sources(eta: &Node, k: usize) -> Vec<Node> {
    let stem = if eta.is_root() {
        Node::root()
    } else {
        let len = k * (eta.len() - 1) + 1;
        Node::new((0..len).map(|i| if i % k == 0 { eta.digits()[i / k] } else { 0 }).collect())
    };
    (0..k).map(|i| stem.concat(&Node::repeat(0, i))).collect()
}

/// `m`-fold fattening onto `2^{<n}`; `n` defaults to the largest depth the
/// source supports.
pub fn fatten(w: &TupleWitness, m: usize, target_depth: Option<usize>) -> Result<TupleWitness> {
    let src = w.tree()?;
    let available = src.max_len() + 1;
    let n = target_depth.unwrap_or(available.saturating_sub(m));
    if n == 0 || n + m > available {
        return Err(Error::DepthShortfall {
            needed: n.max(1) + m,
            available,
        });
    }
    w.rebuild(TreeDomain::binary(n)?, |eta| fattening_sources(eta, m))
}

/// `k`-fold elongation onto `2^{<n′}`; `n′` defaults to the largest depth
/// with every source node present, i.e. `k(n′−1) < N`.
pub fn elongate(w: &TupleWitness, k: usize, target_depth: Option<usize>) -> Result<TupleWitness> {
    if k < 2 {
        return Err(Error::Precondition(format!("elongation needs k ≥ 2, got {k}")));
    }
    let src = w.tree()?;
    let max_len = src.max_len();
    let available = max_len + 1;
    let n = target_depth.unwrap_or(max_len / k + 1);
    // the deepest source is η′⌢0^{k−1} of length k(n′−1); the root needs 0^{k−1}
    let deepest = (k * (n.max(1) - 1)).max(k - 1);
    if n == 0 || deepest > max_len {
        return Err(Error::DepthShortfall {
            needed: deepest + 1,
            available,
        });
    }
    w.rebuild(TreeDomain::binary(n)?, |eta| elongation_sources(eta, k))
}

/// `K_m = {ν⌢0^i : ν ∈ 2^m, i < k}`.
pub fn probe_set(m: usize, k: usize) -> NodeSet {
    let mut out = NodeSet::new();
    for nu in TreeDomain::binary(m + 1).unwrap().enumerate_nodes().into_iter().filter(|n| n.len() == m) {
        for i in 0..k {
            out.insert(nu.concat(&Node::repeat(0, i)));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "lowercase")]
pub enum ReductionCase {
    Fatten { m: usize },
    Elongate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Probe {
    pub m: usize,
    pub size: usize,
    pub consistent: bool,
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub witness: TupleWitness,
    pub case: ReductionCase,
    pub probes: Vec<Probe>,
}

/// The k-ATP to ATP step: probe `K_0, …, K_M`; the least inconsistent
/// `K_m` selects `m`-fold fattening, otherwise `k`-fold elongation.
/// `M` defaults to `N − k`, the largest bound with `K_M` in the source.
pub fn reduce_katp(w: &TupleWitness, k: usize, probe_bound: Option<usize>) -> Result<Reduction> {
    if k < 2 {
        return Err(Error::Precondition(format!("reduction needs k ≥ 2, got {k}")));
    }
    let src = w.tree()?;
    let available = src.max_len() + 1;
    if available < k {
        return Err(Error::DepthShortfall { needed: k, available });
    }
    let bound = probe_bound.unwrap_or(available - k);
    if bound + k > available {
        return Err(Error::DepthShortfall {
            needed: bound + k,
            available,
        });
    }
    let mut probes = Vec::new();
    for m in 0..=bound {
        let set = probe_set(m, k);
        let positions: Vec<usize> = set.iter().map(|n| w.space.node_position(n).expect("within budget")).collect();
        let consistent = w.consistent(&positions);
        probes.push(Probe {
            m,
            size: set.len(),
            consistent,
        });
        if !consistent {
            return Ok(Reduction {
                witness: fatten(w, m, None)?,
                case: ReductionCase::Fatten { m },
                probes,
            });
        }
    }
    Ok(Reduction {
        witness: elongate(w, k, None)?,
        case: ReductionCase::Elongate,
        probes,
    })
}

/// Nonempty antichains of one cardinality, pairwise `∼₀` as lex-ordered
/// tuples.
pub fn check_collapsible(families: &[NodeSet]) -> Result<()> {
    let first = families.first().ok_or(Error::EmptyFamily)?;
    let head = first.to_vec();
    for (i, x) in families.iter().enumerate() {
        if x.is_empty() {
            return Err(Error::Precondition(format!("family {i} is empty")));
        }
        if !x.is_antichain() {
            return Err(Error::Precondition(format!("family {i} is not an antichain")));
        }
        if x.len() != first.len() {
            return Err(Error::Precondition(format!(
                "families 0 and {i} differ in size ({} vs {})",
                first.len(),
                x.len()
            )));
        }
        if !sim0(&head, &x.to_vec()) {
            return Err(Error::Precondition(format!("families 0 and {i} are not strongly isomorphic")));
        }
    }
    Ok(())
}

/// `ν⌢X_i ∪ ξ⌢X_j` for all `i, j`, row-major.
pub fn collapse_product(families: &[NodeSet], nu: &Node, xi: &Node) -> Result<Vec<NodeSet>> {
    check_collapsible(families)?;
    if nu.is_comparable(xi) {
        return Err(Error::Precondition(format!("{nu} and {xi} are comparable")));
    }
    if !nu.lex_less(xi) {
        return Err(Error::Precondition(format!("{nu} is not lexicographically below {xi}")));
    }
    let left: Vec<NodeSet> = families.iter().map(|x| x.prefixed(nu)).collect();
    let right: Vec<NodeSet> = families.iter().map(|x| x.prefixed(xi)).collect();
    Ok(left.iter().flat_map(|l| right.iter().map(move |r| l.union(r))).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub families: Vec<NodeSet>,
    pub nu: Node,
    pub chi: Node,
    pub chi_prime: Node,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtendRule {
    /// `χ′ = ν⌢⟨0⟩` with `ν` the shortest all-zero extension of `χ` that lies
    /// below no family element.
    Spaced,
    /// `χ′ = χ`: the new families sit directly above `χ`.
    Tight,
}

/// `X_i = χ′⌢X′_i` for `i ≤ n` and `X_{n+1} = X′_0`, where `χ = ν′` is the
/// lex-least element of `X′_0`.
pub fn collapse_extend(families: &[NodeSet]) -> Result<Extension> {
    collapse_extend_with(families, ExtendRule::Spaced)
}

pub fn collapse_extend_with(families: &[NodeSet], rule: ExtendRule) -> Result<Extension> {
    check_collapsible(families)?;
    let chi = families[0].first().expect("nonempty").clone();
    let mut nu = chi.child(0);
    while families.iter().flat_map(NodeSet::iter).any(|x| nu.is_prefix_of(x)) {
        nu = nu.child(0);
    }
    let chi_prime = match rule {
        ExtendRule::Spaced => nu.child(0),
        ExtendRule::Tight => chi.clone(),
    };
    let mut out: Vec<NodeSet> = families.iter().map(|x| x.prefixed(&chi_prime)).collect();
    out.push(families[0].clone());
    Ok(Extension {
        families: out,
        nu,
        chi,
        chi_prime,
    })
}

pub const DEFAULT_SCAFFOLD_CAP: usize = 4;

/// Level `m` of the one-variable construction: `α_m` families in the host
/// tree and an embedding `f_m` of `2^{<m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scaffold {
    pub level: usize,
    pub families: Vec<NodeSet>,
    /// `(η, f_m(η))` in the lexicographic order of `2^{<m}`.
    pub embedding: Vec<(Node, Node)>,
    /// From the last extension step; absent at level 1.
    pub chi: Option<Node>,
    pub chi_prime: Option<Node>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScaffoldCheck {
    pub families_collapsible: bool,
    pub chi_placed: bool,
    /// Each maximal antichain lands in exactly one family.
    pub unique_family: bool,
    /// Distinct maximal antichains land in distinct families.
    pub injective: bool,
    /// `η̄ ∼₀ f(η̄)` for all 4-tuples, which covers every arity.
    pub strong_embedding: bool,
    pub tuples_checked: u64,
    pub failures: Vec<String>,
}

impl ScaffoldCheck {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

impl Scaffold {
    pub fn image(&self, eta: &Node) -> Option<&Node> {
        self.embedding.iter().find(|(d, _)| d == eta).map(|(_, f)| f)
    }

    pub fn check(&self) -> Result<ScaffoldCheck> {
        let mut failures = Vec::new();
        let families_collapsible = match check_collapsible(&self.families) {
            Ok(()) => true,
            Err(e) => {
                failures.push(e.to_string());
                false
            }
        };
        let chi_placed = match (&self.chi, &self.chi_prime) {
            (Some(chi), Some(cp)) => {
                let ok = self.families.last().is_some_and(|x| x.contains(chi)) && chi.is_prefix_of(cp);
                if !ok {
                    failures.push("χ is not in the last family below χ′".into());
                }
                ok
            }
            _ => true,
        };

        let f = |eta: &Node| self.image(eta).expect("embedding covers the domain").clone();
        let catalog = maximal_antichains(self.level, self.level.max(1))?;
        let mut hits = Vec::new();
        let mut unique_family = true;
        for y in &catalog.items {
            let image: NodeSet = y.iter().map(f).collect();
            let homes: Vec<usize> = (0..self.families.len()).filter(|&i| image.is_subset(&self.families[i])).collect();
            if homes.len() != 1 {
                unique_family = false;
                failures.push(format!("f[{y}] lies in {} families", homes.len()));
            }
            hits.push(homes.first().copied());
        }
        let distinct: BTreeSet<_> = hits.iter().flatten().collect();
        let injective = distinct.len() == hits.iter().flatten().count();
        if !injective {
            failures.push("distinct maximal antichains share a family".into());
        }

        let domain: Vec<Node> = self.embedding.iter().map(|(d, _)| d.clone()).collect();
        let images: Vec<Node> = self.embedding.iter().map(|(_, i)| i.clone()).collect();
        let n = domain.len();
        let mut strong_embedding = true;
        let mut tuples_checked = 0u64;
        'outer: for t in 0..n.pow(4) {
            let idx = [t % n, t / n % n, t / n / n % n, t / n / n / n];
            let src: Vec<Node> = idx.iter().map(|&i| domain[i].clone()).collect();
            let img: Vec<Node> = idx.iter().map(|&i| images[i].clone()).collect();
            tuples_checked += 1;
            if !sim0(&src, &img) {
                strong_embedding = false;
                let show = |v: &[Node]| v.iter().map(Node::to_string).collect::<Vec<_>>().join(", ");
                failures.push(format!("({}) is not strongly isomorphic to its image ({})", show(&src), show(&img)));
                break 'outer;
            }
        }
        Ok(ScaffoldCheck {
            families_collapsible,
            chi_placed,
            unique_family,
            injective,
            strong_embedding,
            tuples_checked,
            failures,
        })
    }
}

/// The scaffold with the tight extension rule, which keeps `f_m` a strong
/// embedding.
pub fn build_onevar_scaffold(m: usize, seed: &NodeSet) -> Result<Scaffold> {
    build_onevar_scaffold_with(m, seed, ExtendRule::Tight, DEFAULT_SCAFFOLD_CAP)
}

pub fn build_onevar_scaffold_with(m: usize, seed: &NodeSet, rule: ExtendRule, cap: usize) -> Result<Scaffold> {
    if m == 0 {
        return Err(Error::Precondition("scaffold level must be at least 1".into()));
    }
    if m > cap {
        return Err(Error::cap("scaffold level", m, cap));
    }
    if seed.is_empty() || !seed.is_antichain() {
        return Err(Error::Precondition("seed must be a nonempty antichain".into()));
    }
    let mut s = Scaffold {
        level: 1,
        families: vec![seed.clone()],
        embedding: vec![(Node::root(), seed.first().unwrap().clone())],
        chi: None,
        chi_prime: None,
    };
    let (zero, one) = (Node::from([0]), Node::from([1]));
    while s.level < m {
        let product = collapse_product(&s.families, &zero, &one)?;
        let ext = collapse_extend_with(&product, rule)?;
        let level = s.level + 1;
        let mut embedding = Vec::with_capacity((1 << level) - 1);
        for eta in TreeDomain::binary(level)?.enumerate_nodes() {
            let image = match eta.digits().split_first() {
                None => ext.chi.clone(),
                Some((&d, rest)) => {
                    let inner = s.image(&Node::from(rest)).expect("previous level covers the suffix");
                    ext.chi_prime.child(d).concat(inner)
                }
            };
            embedding.push((eta, image));
        }
        s = Scaffold {
            level,
            families: ext.families,
            embedding,
            chi: Some(ext.chi),
            chi_prime: Some(ext.chi_prime),
        };
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antichains::alpha;
    use crate::patterns::{exact_family, make_pattern, verify, PatternKind, VerifyMode, DEFAULT_VERIFY_CAP};
    use crate::synth::{synth_boolean, synth_skolem};
    use crate::tree::is_chain;
    use num_bigint::BigUint;

    fn n(text: &str) -> Node {
        crate::tree::parse_node(text, 2).unwrap()
    }

    fn set(texts: &[&str]) -> NodeSet {
        texts.iter().map(|t| n(t)).collect()
    }

    fn tree_space(depth: usize) -> IndexSpace {
        IndexSpace::Tree(TreeDomain::binary(depth).unwrap())
    }

    /// Parameter `i` is the position itself, so components can be read back.
    fn labelled(depth: usize) -> TupleWitness {
        let space = tree_space(depth);
        let params = (1..=space.len() as u64).map(BigUint::from).collect();
        TupleWitness::identity(Witness::skolem(space, params).unwrap())
    }

    fn component_nodes(w: &TupleWitness, eta: &str) -> Vec<String> {
        let at = w.space().node_position(&n(eta)).unwrap();
        w.provenance()[at].iter().map(|l| w.base().space().label_text(l)).collect()
    }

    fn exact(kind: PatternKind, depth: usize) -> TupleWitness {
        let p = make_pattern(kind, tree_space(depth)).unwrap();
        TupleWitness::identity(synth_skolem(&exact_family(&p).unwrap()).unwrap())
    }

    #[test]
    fn fattening_examples() {
        let w = labelled(4);
        let f1 = fatten(&w, 1, None).unwrap();
        assert_eq!(f1.space(), &tree_space(3));
        assert_eq!(component_nodes(&f1, ""), ["0", "1"]);
        assert_eq!(component_nodes(&f1, "0"), ["00", "10"]);
        let f2 = fatten(&w, 2, None).unwrap();
        assert_eq!(component_nodes(&f2, "1"), ["001", "101", "011", "111"]);
        let f0 = fatten(&w, 0, None).unwrap();
        assert!(f0.is_identity());
        assert_eq!(fatten(&w, 4, None).unwrap_err(), Error::DepthShortfall { needed: 5, available: 4 });
        assert!(fatten(&w, 1, Some(4)).is_err());
    }

    #[test]
    fn fattening_composes() {
        // (a^{(1)})^{(1)} = a^{(2)} as multisets of sources
        let w = labelled(5);
        let twice = fatten(&fatten(&w, 1, None).unwrap(), 1, None).unwrap();
        let once = fatten(&w, 2, None).unwrap();
        assert_eq!(twice, once);
    }

    #[test]
    fn fattening_shape() {
        for m in 0..=3 {
            let w = fatten(&labelled(5), m, None).unwrap();
            assert_eq!(w.arity(), Some(1 << m));
            for eta in TreeDomain::binary(5 - m).unwrap().enumerate_nodes() {
                let got: BTreeSet<String> = component_nodes(&w, &eta.to_text(2)).into_iter().collect();
                let want: BTreeSet<String> = TreeDomain::binary(m + 1)
                    .unwrap()
                    .enumerate_nodes()
                    .into_iter()
                    .filter(|r| r.len() == m)
                    .map(|r| r.concat(&eta).to_text(2))
                    .collect();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn elongation_examples() {
        let w = labelled(5);
        let e = elongate(&w, 2, None).unwrap();
        assert_eq!(e.space(), &tree_space(3));
        assert_eq!(component_nodes(&e, "1"), ["1", "10"]);
        assert_eq!(component_nodes(&e, "10"), ["100", "1000"]);
        assert_eq!(component_nodes(&e, ""), ["", "0"]);
        assert_eq!(elongation_sources(&n("11"), 3), [n("1001"), n("10010"), n("100100")]);
        assert_eq!(elongate(&w, 2, Some(4)).unwrap_err(), Error::DepthShortfall { needed: 7, available: 5 });
        assert!(elongate(&labelled(1), 2, None).is_err());
        assert!(elongate(&w, 1, None).is_err());
    }

    #[test]
    fn elongation_chain_shape() {
        for k in 2..=3 {
            let depth = 3;
            let nodes = TreeDomain::binary(depth).unwrap().enumerate_nodes();
            for eta in &nodes {
                let src = elongation_sources(eta, k);
                assert_eq!(src.len(), k);
                assert!(is_chain(&src));
                for tau in &nodes {
                    let other = elongation_sources(tau, k);
                    if !eta.is_comparable(tau) {
                        assert!(src.iter().all(|a| other.iter().all(|b| !a.is_comparable(b))));
                    }
                    if eta.is_prefix_of(tau) && eta != tau {
                        let union: NodeSet = src.iter().chain(&other).cloned().collect();
                        let longest = union.iter().map(|top| union.iter().filter(|a| a.is_prefix_of(top)).count()).max();
                        assert!(longest.unwrap() > k, "{eta} {tau}");
                    }
                }
            }
        }
    }

    #[test]
    fn probe_sets() {
        assert_eq!(probe_set(0, 2), set(&["", "0"]));
        assert_eq!(probe_set(1, 2), set(&["0", "00", "1", "10"]));
        assert_eq!(probe_set(2, 3).len(), 12);
    }

    #[test]
    fn reduction_takes_elongation_for_three_atp() {
        let w = exact(PatternKind::KAtp { k: 3 }, 5);
        let r = reduce_katp(&w, 2, None).unwrap();
        assert_eq!(r.case, ReductionCase::Elongate);
        assert_eq!(r.probes.len(), 4);
        assert!(r.probes.iter().all(|p| p.consistent));
        let atp = make_pattern(PatternKind::Atp, tree_space(3)).unwrap();
        let report = verify(&r.witness, &atp, VerifyMode::Exhaustive, DEFAULT_VERIFY_CAP).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!((report.checked_consistent, report.checked_inconsistent), (25, 102));
    }

    #[test]
    fn reduction_of_an_atp_witness_is_the_identity() {
        let w = exact(PatternKind::Atp, 4);
        let r = reduce_katp(&w, 2, None).unwrap();
        assert_eq!(r.case, ReductionCase::Fatten { m: 0 });
        assert_eq!(r.probes.len(), 1);
        assert!(r.witness.is_identity());
    }

    #[test]
    fn reduction_bookkeeping() {
        let w = exact(PatternKind::KAtp { k: 3 }, 5);
        let r = reduce_katp(&w, 2, Some(0)).unwrap();
        assert_eq!(r.case, ReductionCase::Elongate);
        assert_eq!(r.probes.len(), 1);
        assert_eq!(reduce_katp(&w, 2, Some(4)).unwrap_err(), Error::DepthShortfall { needed: 6, available: 5 });
    }

    #[test]
    fn reduction_with_larger_k() {
        // k = 3 elongation of an exact 4-ATP witness meets the ATP pattern
        let w = exact(PatternKind::KAtp { k: 4 }, 5);
        let r = reduce_katp(&w, 3, None).unwrap();
        assert_eq!(r.case, ReductionCase::Elongate);
        let target = make_pattern(PatternKind::KAtp { k: 2 }, tree_space(2)).unwrap();
        assert!(verify(&r.witness, &target, VerifyMode::Exhaustive, DEFAULT_VERIFY_CAP).unwrap().pass);
    }

    #[test]
    fn fattening_case_is_detected_past_the_root() {
        // a witness where K_0 is consistent but K_1 is not
        let p = make_pattern(PatternKind::KAtp { k: 3 }, tree_space(4)).unwrap();
        let base = synth_boolean(&exact_family(&p).unwrap()).unwrap();
        let w = TupleWitness::identity(base.clone());
        let k1: Vec<usize> = probe_set(1, 2).iter().map(|x| p.space.node_position(x).unwrap()).collect();
        let zero = crate::oracles::Param::Bits(fixedbitset::FixedBitSet::with_capacity(base.width()));
        let w = TupleWitness::identity(w.base().with_param(k1[3], zero).unwrap());
        let r = reduce_katp(&w, 2, None).unwrap();
        assert_eq!(r.case, ReductionCase::Fatten { m: 1 });
        assert_eq!(r.witness.arity(), Some(2));
        assert_eq!(r.witness.space(), &tree_space(3));
    }

    #[test]
    fn product_examples() {
        let out = collapse_product(&[set(&["0", "1"])], &n("0"), &n("1")).unwrap();
        assert_eq!(out, [set(&["00", "01", "10", "11"])]);
        let two = [set(&["0", "1"]), set(&["00", "01"])];
        let out = collapse_product(&two, &n("0"), &n("1")).unwrap();
        assert_eq!(out.len(), 4);
        for x in &out {
            assert!(x.is_antichain() && x.len() == 4);
        }
        check_collapsible(&out).unwrap();
        assert!(collapse_product(&two, &n("0"), &n("01")).is_err());
        assert!(collapse_product(&two, &n("1"), &n("0")).is_err());
        assert!(collapse_product(&[set(&["0", "00"])], &n("0"), &n("1")).is_err());
        assert!(collapse_product(&[set(&["0", "1"]), set(&["0"])], &n("0"), &n("1")).is_err());
        assert!(collapse_product(&[set(&["00", "01", "1"]), set(&["0", "10", "11"])], &n("0"), &n("1")).is_err());
    }

    #[test]
    fn extend_examples() {
        let e = collapse_extend(&[set(&["0", "1"])]).unwrap();
        assert_eq!((e.chi.clone(), e.nu.clone(), e.chi_prime.clone()), (n("0"), n("00"), n("000")));
        assert_eq!(e.families, [set(&["0000", "0001"]), set(&["0", "1"])]);
        let e = collapse_extend(&[NodeSet::singleton(Node::root())]).unwrap();
        assert_eq!((e.chi.clone(), e.nu.clone()), (Node::root(), n("0")));
        assert_eq!(e.families, [set(&["00"]), NodeSet::singleton(Node::root())]);
        // ν must clear every family, not just X′₀
        let e = collapse_extend(&[set(&["0", "1"]), set(&["000", "001"])]).unwrap();
        assert_eq!(e.nu, n("0000"));
    }

    #[test]
    fn collapse_outputs_are_collapsible() {
        let mut families = vec![set(&["0", "1"])];
        for _ in 0..2 {
            let product = collapse_product(&families, &n("0"), &n("1")).unwrap();
            check_collapsible(&product).unwrap();
            for rule in [ExtendRule::Spaced, ExtendRule::Tight] {
                let e = collapse_extend_with(&product, rule).unwrap();
                check_collapsible(&e.families).unwrap();
                assert!(e.families.last().unwrap().contains(&e.chi));
                assert!(e.chi.is_prefix_of(&e.chi_prime));
                assert_eq!(e.families.len(), product.len() + 1);
            }
            families = collapse_extend(&product).unwrap().families;
        }
    }

    #[test]
    fn scaffold_base_and_counts() {
        let s = build_onevar_scaffold(1, &set(&["0"])).unwrap();
        assert_eq!(s.families, [set(&["0"])]);
        assert_eq!(s.image(&Node::root()), Some(&n("0")));
        for m in 1..=4 {
            let s = build_onevar_scaffold(m, &set(&["0"])).unwrap();
            assert_eq!(BigUint::from(s.families.len()), alpha(m));
            let c = s.check().unwrap();
            assert!(c.pass(), "m={m}: {:?}", c.failures);
        }
        assert!(build_onevar_scaffold(5, &set(&["0"])).unwrap_err().is_resource_cap());
        assert!(build_onevar_scaffold(2, &set(&["0", "00"])).is_err());
    }

    #[test]
    fn scaffold_level_two() {
        let s = build_onevar_scaffold(2, &set(&["0"])).unwrap();
        let chi = s.chi.clone().unwrap();
        let cp = s.chi_prime.clone().unwrap();
        assert_eq!(s.image(&Node::root()), Some(&chi));
        for d in 0..2 {
            assert_eq!(s.image(&Node::from([d])).unwrap(), &cp.child(d).concat(&n("0")));
        }
    }

    #[test]
    fn scaffold_with_wider_seeds() {
        for seed in [set(&["0", "1"]), set(&["00", "01", "1"]), [Node::from([2]), Node::from([5])].into_iter().collect()] {
            for m in 1..=3 {
                let c = build_onevar_scaffold(m, &seed).unwrap().check().unwrap();
                assert!(c.pass(), "{seed} m={m}: {:?}", c.failures);
            }
        }
    }

    #[test]
    fn spaced_rule_breaks_the_embedding() {
        // f(⟨0⟩) ∧ f(⟨1⟩) = χ′ while f(⟨⟩) = χ ≠ χ′
        let s = build_onevar_scaffold_with(2, &set(&["0"]), ExtendRule::Spaced, 4).unwrap();
        let c = s.check().unwrap();
        assert!(c.unique_family && c.injective && c.families_collapsible && c.chi_placed);
        assert!(!c.strong_embedding);
        let f = |t: &str| s.image(&n(t)).unwrap().clone();
        assert_eq!(f("0").meet(&f("1")), s.chi_prime.clone().unwrap());
        assert_ne!(f(""), f("0").meet(&f("1")));
    }
}
