//! Classification and constructive solving of locally checkable labeling
//! problems on Δ-regular trees.
//!
//! A problem is classified by searching for an ℓ-full subset of its vertex
//! configurations ([`path`]). Problems that have one are solved on finite
//! trees from a rake-and-compress decomposition ([`rake_compress`],
//! [`solver`]) or from a toast ([`toast`]). The [`equivalence`] module
//! computes extendability tables of poled trees, and [`oracle`] holds the
//! brute-force checkers the rest of the crate is tested against.

pub mod bits;
pub mod equivalence;
pub mod fixtures;
pub mod lcl;
pub mod oracle;
pub mod path;
pub mod rake_compress;
pub mod report;
pub mod solver;
pub mod toast;
pub mod tree;

pub use lcl::{
    is_valid_labeling, parse_labeling, parse_problem, serialize_labeling, serialize_problem,
    EdgeConfig, HalfEdgeLabeling, Label, LclProblem, ProblemError, ValidityReport, VertexConfig,
};
pub use tree::{gen_tree, parse_tree, serialize_tree, Port, PortTree, TreeGenSpec, TreeModel};
