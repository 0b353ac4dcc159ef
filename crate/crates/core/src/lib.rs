//! Finite-scale combinatorics for tree properties of formulas.
//!
//! Trees are finite digit strings under the prefix order. On top of that sit
//! quantifier-free types of node tuples, antichain catalogs, pattern
//! definitions (TP, TP₂, SOP₁, SOP₂, ATP, k-ATP) with their exact consistency
//! families, consistency oracles, exact witness synthesis, and the
//! fattening/elongation transforms.
//!
//! ```
//! use treelab_core::{exact_family, pattern_for, synth_skolem, verify, PatternKind, VerifyMode};
//!
//! let p = pattern_for(PatternKind::Atp, 2, 3).unwrap();
//! let w = synth_skolem(&exact_family(&p).unwrap()).unwrap();
//! let report = verify(&w, &p, VerifyMode::Exhaustive, 1 << 20).unwrap();
//! assert!(report.pass);
//! assert_eq!((report.checked_consistent, report.checked_inconsistent), (25, 102));
//! ```

pub mod antichains;
pub mod dot;
pub mod error;
pub mod index;
pub mod oracles;
pub mod patterns;
pub mod qftype;
pub mod synth;
pub mod transforms;
pub mod tree;
pub mod witness_file;

pub use antichains::{
    alpha, antichain_count, antichains_by_product, canonical_antichains, enumerate_antichains, find_iso_copy,
    max_chain_bounded_sets, maximal_antichain_count, maximal_antichains, maximal_chain_bounded, universal_prefix,
    AntichainCatalog,
};
pub use dot::export_dot;
pub use error::{Error, Result};
pub use index::{IndexSpace, Label};
pub use oracles::{
    bitset_consistent, divisor_lattice, eval_formula, fo_consistent, gcd_consistent, parse_formula, Backend,
    ConsistencyOracle, FiniteStructure, FoOracle, Formula, Param, StructureWitness, Term, Witness,
};
pub use patterns::{
    exact_family, make_pattern, pattern_for, verify, ConsistencyFamily, Counterexample, PatternKind, PatternSpec,
    VerificationReport, VerifyMode,
};
pub use qftype::{delta_type, qftype0, sim0, sim_delta, verify_ss_ll, DeltaType, QfType0, SsLlReport};
pub use synth::{nth_prime, synth_boolean, synth_skolem, PrimeSupply};
pub use transforms::{
    build_onevar_scaffold, collapse_extend, collapse_product, elongate, fatten, reduce_katp, ReductionCase, Scaffold,
    TupleWitness,
};
pub use tree::{closure, is_antichain, is_chain, parse_node, Node, NodeSet, Relation, TreeDomain};
pub use witness_file::WitnessFile;
