//! Representative elements of relational data.
//!
//! Objects are known only through a pairwise cost relation. Each object
//! ranks all others by cost and casts Borda votes; the object with the best
//! mean vote is the *standard*, and local maxima of the vote within
//! neighborhoods are the *exemplars*. Growing the neighborhood size merges
//! exemplars until only the standard remains.
//!
//! ```
//! use exemplar_core::builders::euclidean_line;
//! use exemplar_core::scoring::{aggregated_scores, rank_table, standard, TiePolicy};
//! use exemplar_core::network::{build_network, NeighborhoodSpec};
//!
//! let relation = euclidean_line(&[0.0, 1.0, 2.0, 10.0, 11.0, 12.0]);
//! let ranks = rank_table(&relation, TiePolicy::IndexOrder);
//! let scores = aggregated_scores(&ranks);
//! assert_eq!(standard(&scores), 3);
//!
//! let net = build_network(&scores, &ranks, &NeighborhoodSpec::Knn(3)).unwrap();
//! assert_eq!(net.exemplars(), [2, 3]);
//! ```

pub mod builders;
pub mod error;
pub mod export;
pub mod network;
pub mod relation;
pub mod robustness;
pub mod scoring;

pub use error::{Error, Result};
pub use network::{
    build_network, neighborhood, optimal_k, scale_sweep, Adjacency, ExemplarNetwork, NeighborhoodSpec, SweepTable,
};
pub use relation::{load_relation, validate_relation, RelationMatrix, ValidationReport};
pub use scoring::{aggregated_scores, rank_table, standard, RankTable, ScoreVector, TiePolicy};
