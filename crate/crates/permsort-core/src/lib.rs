//! Sorting with hereditary permutation classes.
//!
//! A hereditary class `C` sorts a permutation `π` in `k` steps if `π⁻¹` is a
//! product of `k` members of `C`; equivalently, right-composing `π` by `k`
//! suitable members of `C` yields the identity. This crate computes exact
//! sorting times by breadth-first search over `S_n`, produces certified
//! step sequences for the classic sorter families, measures the structural
//! quantities that separate the complexity regimes (reduced inversion
//! number, total cyclic distance, intervalicity), builds and analyzes
//! sorting diagrams, and classifies class specifications into the five
//! asymptotic bands (unsortable, quadratic, linear, polylog, one-step).
//!
//! The crate is organized bottom-up:
//!
//! * [`perm`]: permutations, symmetries, sums, pattern containment, the
//!   cyclic-distance and alternation metrics, point sets.
//! * [`classes`]: the class-specification language (named classes, `Av`,
//!   grid classes, unions, symmetries, closures, fringes), membership,
//!   enumeration, canonical forms.
//! * [`engine`]: rank codecs, the sorting-time BFS, distance tables and
//!   their on-disk format, reduced inversion number, counting bounds.
//! * [`sorters`]: constructive sorters producing verifiable certificates.
//! * [`diagrams`]: adjacency graphs, sorting diagrams, crossing counts,
//!   exact and heuristic treewidth.
//! * [`taxonomy`]: the classification ladder assigning a complexity band
//!   with an explicit confidence level and evidence trail.

pub mod classes;
pub mod diagrams;
pub mod engine;
pub mod perm;
pub mod sorters;
pub mod taxonomy;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
