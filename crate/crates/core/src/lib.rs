//! Interpretable sequence clustering trees.
//!
//! Categorical sequences are clustered by projecting them onto random
//! subsequence patterns (normalized LCS similarity), reducing the feature
//! matrix with PCA and running k-means. The resulting pseudo-labels are then
//! explained by a binary tree with at most `k` leaves in which every internal
//! node tests for the presence of one sequential pattern.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, tree export and
//! the command-line driver live in the `isct` crate.

#![no_std]

extern crate alloc;

mod error;
pub mod eval;
pub mod linalg;
pub mod mining;
pub mod projection;
pub mod seq;
pub mod tree;

pub use error::{Error, Result};
pub use eval::{nmi, pairwise_f1, purity, ContingencyTable};
pub use mining::{
    mine_top_frequent, score_pattern, top1_discriminative, FrequentPattern, MiningConfig,
    ScoredPattern,
};
pub use projection::{
    auto_max_pattern_len, generate_random_patterns, kmeans, kmeans_fit, lcs_transform, pca_fit,
    pca_reduce, random_projection_clustering, Clustering, FeatureMatrix, KMeansFit, Pca,
    ProjectionConfig,
};
pub use seq::{
    contains, lcs_length, occurrences, support, Alphabet, ItemId, Pattern, Sequence,
    SequenceDatabase,
};
pub use tree::{
    assign, build_isct, build_isct_from_clustering, fit_predict, IsctNode, IsctTree, TreeConfig,
};
