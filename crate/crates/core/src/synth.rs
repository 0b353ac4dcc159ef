//! Exact witnesses from a consistency family `S` with maximal members
//! `J₀, …, J_{m−1}`: the prime-product (skolem) and atom (boolean)
//! constructions. In both, `J` is consistent iff `J ⊆ J_n` for some `n`.

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::index::IndexSpace;
use crate::oracles::Witness;
use crate::patterns::{ConsistencyFamily, PositionSet};

/// The primes `2, 3, 5, …` by a sieve that doubles its bound on demand.
#[derive(Clone, Debug, Default)]
pub struct PrimeSupply {
    primes: Vec<u64>,
    bound: u64,
}

impl PrimeSupply {
    pub fn new() -> Self {
        Self::default()
    }

    /// `p_n`, 0-indexed.
    pub fn nth(&mut self, n: usize) -> u64 {
        while self.primes.len() <= n {
            self.grow(n);
        }
        self.primes[n]
    }

    pub fn first(&mut self, count: usize) -> &[u64] {
        if count > 0 {
            self.nth(count - 1);
        }
        &self.primes[..count]
    }

    fn grow(&mut self, n: usize) {
        // p_n < n (ln n + ln ln n) for n ≥ 6
        let x = (n + 1).max(6) as f64;
        let estimate = (x * (x.ln() + x.ln().ln())).ceil() as u64;
        let bound = estimate.max(self.bound * 2).max(16);
        let mut composite = vec![false; bound as usize + 1];
        let mut primes = Vec::new();
        for i in 2..=bound as usize {
            if !composite[i] {
                primes.push(i as u64);
                let mut j = i * i;
                while j <= bound as usize {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        self.primes = primes;
        self.bound = bound;
    }
}

pub fn nth_prime(n: usize) -> u64 {
    PrimeSupply::new().nth(n)
}

/// `a_i = ∏ {p_n : i ∈ J_n}` over the family's maximal members.
pub fn synth_skolem(fam: &ConsistencyFamily) -> Result<Witness> {
    synth_skolem_from_sets(*fam.space(), fam.members())
}

/// `a_i` has bit `n` set iff `i ∈ J_n`.
pub fn synth_boolean(fam: &ConsistencyFamily) -> Result<Witness> {
    synth_boolean_from_sets(*fam.space(), fam.members())
}

/// The skolem construction over an arbitrary enumeration of sets, which need
/// not consist of maximal members only.
pub fn synth_skolem_from_sets(space: IndexSpace, sets: &[PositionSet]) -> Result<Witness> {
    if sets.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut primes = PrimeSupply::new();
    let primes = primes.first(sets.len());
    let mut params = vec![BigUint::one(); space.len()];
    for (set, &p) in sets.iter().zip(primes) {
        for &i in set {
            let slot = params
                .get_mut(i)
                .ok_or_else(|| Error::IndexMismatch(format!("position {i} outside {} labels", space.len())))?;
            *slot *= p;
        }
    }
    Witness::skolem(space, params)
}

pub fn synth_boolean_from_sets(space: IndexSpace, sets: &[PositionSet]) -> Result<Witness> {
    if sets.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let width = sets.len();
    let mut params = vec![FixedBitSet::with_capacity(width); space.len()];
    for (n, set) in sets.iter().enumerate() {
        for &i in set {
            params
                .get_mut(i)
                .ok_or_else(|| Error::IndexMismatch(format!("position {i} outside {} labels", space.len())))?
                .insert(n);
        }
    }
    Witness::boolean(space, width, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{ConsistencyOracle, Param};
    use crate::patterns::{exact_family, make_pattern, PatternKind};
    use crate::tree::TreeDomain;

    fn atp(depth: usize) -> ConsistencyFamily {
        let p = make_pattern(PatternKind::Atp, IndexSpace::Tree(TreeDomain::binary(depth).unwrap())).unwrap();
        exact_family(&p).unwrap()
    }

    fn naive_is_prime(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn primes() {
        assert_eq!(nth_prime(0), 2);
        assert_eq!(nth_prime(4), 11);
        assert_eq!(nth_prime(24), 97);
        let mut supply = PrimeSupply::new();
        let naive: Vec<u64> = (2..20_000).filter(|&n| naive_is_prime(n)).collect();
        assert_eq!(supply.first(naive.len()), &naive[..]);
        assert_eq!(supply.nth(676), 5059);
    }

    fn texts(w: &Witness) -> Vec<String> {
        w.params().iter().map(Param::to_text).collect()
    }

    #[test]
    fn skolem_examples() {
        assert_eq!(texts(&synth_skolem(&atp(2)).unwrap()), ["2", "3", "3"]);
        // positions: ⟨⟩, 0, 00, 01, 1, 10, 11
        assert_eq!(texts(&synth_skolem(&atp(3)).unwrap()), ["2", "15", "77", "77", "21", "55", "55"]);
        let space = IndexSpace::Set { size: 3 };
        let fam = ConsistencyFamily::new(space, vec![vec![0, 1]]).unwrap();
        assert_eq!(texts(&synth_skolem(&fam).unwrap()), ["2", "2", "1"]);
    }

    #[test]
    fn boolean_examples() {
        assert_eq!(texts(&synth_boolean(&atp(2)).unwrap()), ["0x1", "0x2", "0x2"]);
        let w = synth_boolean(&atp(3)).unwrap();
        assert_eq!(w.width(), 5);
        let bits = |i: usize| w.param(i).as_bits().unwrap().ones().collect::<Vec<_>>();
        assert_eq!(bits(1), [1, 2]);
        assert_eq!(bits(2), [3, 4]);
        let space = IndexSpace::Set { size: 3 };
        let fam = ConsistencyFamily::new(space, vec![vec![1]]).unwrap();
        assert_eq!(texts(&synth_boolean(&fam).unwrap()), ["0x0", "0x1", "0x0"]);
    }

    #[test]
    fn empty_family_is_rejected() {
        let space = IndexSpace::Set { size: 2 };
        assert_eq!(synth_skolem_from_sets(space, &[]), Err(Error::EmptyFamily));
        assert_eq!(synth_boolean_from_sets(space, &[]), Err(Error::EmptyFamily));
    }

    #[test]
    fn maximal_members_suffice() {
        // enumerate all of S and compare verdicts with the maximal-only witness
        for depth in 1..=3 {
            let fam = atp(depth);
            let n = fam.space().len();
            let subsets: Vec<Vec<usize>> = (1..1u64 << n).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect();
            let all_of_s: Vec<Vec<usize>> = subsets.iter().filter(|s| fam.contains(s)).cloned().collect();
            let full = [
                synth_skolem_from_sets(*fam.space(), &all_of_s).unwrap(),
                synth_boolean_from_sets(*fam.space(), &all_of_s).unwrap(),
            ];
            let lean = [synth_skolem(&fam).unwrap(), synth_boolean(&fam).unwrap()];
            for s in &subsets {
                let expected = fam.contains(s);
                for w in full.iter().chain(&lean) {
                    assert_eq!(w.consistent(s), expected, "depth {depth} {s:?}");
                }
            }
        }
    }
}
