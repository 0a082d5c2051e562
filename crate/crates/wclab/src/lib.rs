//! Symbolic-dynamics experiments at finite scale: groups and their finite
//! actions, local pattern statistics, weak containment at one (window,
//! palette) scale, shifts of finite type with homomorphism search, and
//! LOCAL-model coloring algorithms.

pub mod action;
pub mod csp;
pub mod error;
pub mod experiment;
pub mod fileio;
pub mod graph;
pub mod group;
pub mod localalg;
pub mod pattern;
pub mod rng;
pub mod sft;

pub use action::{
    action_from_4regular, chi, chi_brute_force, coinduce, make_cycle, make_torus,
    random_large_girth_4regular, ChiValue, FiniteAction, Inclusion,
};
pub use csp::{Constraint, Csp, SolveOutcome, VarOrder};
pub use error::{Result, WcError};
pub use graph::LocalGraph;
pub use group::{ball, cayley_graph, GroupElem, GroupSpec, Window};
pub use localalg::{cole_vishkin_color, greedy_extend_coloring, log_star, simulate_local};
pub use pattern::{
    apply_local_rule, enumerate_pattern_sets, patterns_of, realize_pattern_set,
    weakly_contains_at, ContainmentVerdict, Labelling, LocalRule, PatternSet,
};
pub use sft::{
    hom_exists, is_mixing_z, nonempty_z, nonempty_z2_bounded, period_sft, proper_coloring_sft,
    tiling_sft_free2, tiling_sft_z2, verify_hom, HomVerdict, SftSpec, Z2Verdict,
};
