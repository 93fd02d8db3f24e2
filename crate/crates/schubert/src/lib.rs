//! Combinatorics of Schubert varieties in the complete flag variety:
//! rank matrices, pillar entries, partial transpositions, tangent-cone
//! classes and their defining equations.

pub mod equations;
pub mod error;
pub mod perm;
pub mod pillar;
pub mod poly;
pub mod rank;
pub mod tables;
pub mod transpose;

pub use error::{Error, Result};
pub use perm::{coxeter_elements, Permutation};
pub use pillar::{single_pillar_permutation, truncate, PillarSet, RotheDiagram, RotheFlavor};
pub use rank::{PillarEntry, RankMatrix};
pub use transpose::{
    classify_all, classify_all_with_cap, cone_class, elementary_partial_transpose, known_gaps,
    linking_graph, partial_transpose, raw_partial_transpose, Classification, LinkingGraph,
    TranspositionOutcome,
};
