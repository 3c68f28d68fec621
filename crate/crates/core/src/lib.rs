//! Basis path testing for control-flow graphs.
//!
//! A graph is checked for design flaws, normalized to one entry and one exit,
//! decomposed into loops and cut-vertex blocks, and reduced to a set of
//! independent begin-end paths whose size equals the cyclomatic complexity.
//! The set is certified by GF(2) elimination over path vectors.
//!
//! ```
//! use basispath::{ingest, plan};
//!
//! let src = "if (c) { s1; } else { s2; }";
//! let analysis = plan::test_pipeline(src, ingest::Format::Mini, "demo").unwrap();
//! assert_eq!(analysis.plan.complexity, 2);
//! assert!(analysis.plan.verification.is_basis);
//! ```

pub mod basis;
pub mod batch;
pub mod cfg;
pub mod decompose;
pub mod error;
pub mod ingest;
mod net;
pub mod plan;
pub mod purify;
pub mod verify;

pub use basis::{backbone, combine_paths, compute_paths, count_trivial, LoopSpan, Path, PathSet};
pub use cfg::{
    close_graph, cyclomatic_complexity, is_strongly_connected, reach_sets, Cfg, ClosedCfg, EdgeId,
    NodeId, NodeKind,
};
pub use decompose::{decompose, Decomposition};
pub use error::{Error, PipelineError, Result};
pub use plan::{run_pipeline, test_pipeline, Analysis, TestPlan};
pub use purify::{detect_flaws, normalize_entries_exits, purify, Flaw, FlawKind, FlawReport};
pub use verify::{brute_force_basis, path_to_vector, rank_gf2, substitute_path, verify_basis};
