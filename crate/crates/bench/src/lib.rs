//! Shared fixtures for the criterion benches.

use treelab_core::{exact_family, pattern_for, synth_boolean, synth_skolem, Backend, PatternKind, PatternSpec, Witness};

/// Pattern and exact witness for `kind` on `2^{<depth}`.
pub fn exact_witness(kind: PatternKind, depth: usize, backend: Backend) -> (PatternSpec, Witness) {
    let spec = pattern_for(kind, 2, depth).expect("valid pattern");
    let family = exact_family(&spec).expect("family within caps");
    let w = match backend {
        Backend::Skolem => synth_skolem(&family),
        Backend::Boolean => synth_boolean(&family),
    }
    .expect("nonempty family");
    (spec, w)
}
