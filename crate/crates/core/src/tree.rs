//! Construction of the interpretable sequence clustering tree and routing of
//! sequences through it.
//!
//! The tree is chain shaped: every split sends the sequences containing the
//! selected pattern to a leaf on the right, and construction continues on the
//! left remainder with one cluster fewer. `k - 1` patterns therefore yield at
//! most `k` leaves, numbered in construction order with the final remainder
//! last.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mining::{mine_sequences, MiningConfig, Scorer};
use crate::projection::{random_projection_clustering, Clustering, ProjectionConfig};
use crate::seq::{contains, Alphabet, ItemId, Pattern, Sequence, SequenceDatabase};

#[derive(Debug, Clone, PartialEq)]
pub struct TreeConfig {
    pub k: usize,
    /// Re-cluster every node's sequences before mining its split pattern.
    pub boost: bool,
    /// Nodes with at most `min(k_node, min_split)` sequences become leaves.
    pub min_split: usize,
    pub mining: MiningConfig,
    pub projection: ProjectionConfig,
    pub seed: u64,
}

impl TreeConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            boost: true,
            min_split: 5,
            mining: MiningConfig::default(),
            projection: ProjectionConfig::default(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be >= 1"));
        }
        if self.min_split == 0 {
            return Err(Error::InvalidConfig("min_split must be >= 1"));
        }
        self.mining.validate()?;
        self.projection.validate()
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsctNode {
    Internal {
        pattern: Pattern,
        /// Sequences that do not contain `pattern`.
        left: Box<IsctNode>,
        /// Sequences that contain `pattern`.
        right: Box<IsctNode>,
        members: Vec<usize>,
    },
    Leaf {
        cluster_id: usize,
        members: Vec<usize>,
    },
}

impl IsctNode {
    /// Database indices that reached this node during fitting.
    pub fn members(&self) -> &[usize] {
        match self {
            IsctNode::Internal { members, .. } | IsctNode::Leaf { members, .. } => members,
        }
    }

    pub fn size(&self) -> usize {
        self.members().len()
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, IsctNode::Leaf { .. })
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&IsctNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            match node {
                IsctNode::Leaf { .. } => out.push(node),
                IsctNode::Internal { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            IsctNode::Leaf { .. } => 0,
            IsctNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsctTree {
    pub root: IsctNode,
    pub k_requested: usize,
    pub leaf_count: usize,
    /// One pattern per internal node, in construction order.
    pub patterns_used: Vec<Pattern>,
    pub alphabet: Arc<Alphabet>,
}

impl IsctTree {
    /// Cluster id of every fitted sequence, read from leaf memberships.
    pub fn fitted_labels(&self, n: usize) -> Vec<usize> {
        let mut labels = vec![0; n];
        for leaf in self.root.leaves() {
            if let IsctNode::Leaf {
                cluster_id,
                members,
            } = leaf
            {
                for &i in members {
                    labels[i] = *cluster_id;
                }
            }
        }
        labels
    }
}

/// Routes `s` from the root: right when the node's pattern is contained,
/// left otherwise. Unknown items simply never match.
pub fn assign(tree: &IsctTree, s: &[ItemId]) -> usize {
    let mut node = &tree.root;
    loop {
        match node {
            IsctNode::Leaf { cluster_id, .. } => return *cluster_id,
            IsctNode::Internal {
                pattern,
                left,
                right,
                ..
            } => {
                node = if contains(s, pattern.items()) {
                    right
                } else {
                    left
                };
            }
        }
    }
}

/// Fills unset pattern-length defaults from the full database so every node
/// uses the same bounds.
fn resolve(config: &TreeConfig, db: &SequenceDatabase) -> (ProjectionConfig, usize) {
    let mut projection = config.projection.clone();
    let max_len = projection.max_len_for(db);
    projection.max_random_len = Some(max_len);
    let mining_max = config.mining.max_pattern_len.unwrap_or(max_len);
    (projection, mining_max)
}

fn check_feasible(db: &SequenceDatabase, config: &TreeConfig) -> Result<()> {
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    if config.k == 0 || config.k > db.len() {
        return Err(Error::InfeasibleK {
            k: config.k,
            n: db.len(),
        });
    }
    config.validate()
}

/// Builds the tree, starting from a random projection clustering of `db`.
pub fn build_isct<R: Rng + ?Sized>(
    db: &SequenceDatabase,
    config: &TreeConfig,
    rng: &mut R,
) -> Result<IsctTree> {
    check_feasible(db, config)?;
    let initial = if config.k < 2 {
        Clustering::new(vec![0; db.len()], 1)?
    } else {
        let (projection, _) = resolve(config, db);
        random_projection_clustering(db, config.k, &projection, rng)?
    };
    build_isct_from_clustering(db, config, &initial, rng)
}

/// Builds the tree from a given initial clustering.
///
/// Without boosting, every node uses `initial` restricted to its sequences,
/// minus the clusters already isolated by earlier splits. With boosting,
/// every node is re-clustered into its remaining cluster count and `initial`
/// is ignored.
pub fn build_isct_from_clustering<R: Rng + ?Sized>(
    db: &SequenceDatabase,
    config: &TreeConfig,
    initial: &Clustering,
    rng: &mut R,
) -> Result<IsctTree> {
    check_feasible(db, config)?;
    if initial.len() != db.len() {
        return Err(Error::LengthMismatch {
            left: db.len(),
            right: initial.len(),
        });
    }
    let (projection, mining_max) = resolve(config, db);
    let alphabet_len = db.alphabet().len();

    let mut active: Vec<Option<usize>> = initial.labels().iter().copied().map(Some).collect();
    let mut members: Vec<usize> = (0..db.len()).collect();
    let mut remaining = config.k;
    // (pattern, members at the split node, members sent right)
    let mut splits: Vec<(Pattern, Vec<usize>, Vec<usize>)> = Vec::new();

    while remaining >= 2 && members.len() > remaining.min(config.min_split) {
        let seqs: Vec<Sequence> = members.iter().map(|&i| db.sequences()[i].clone()).collect();
        let (labels, k_node): (Vec<Option<usize>>, usize) = if config.boost {
            let k_node = remaining.min(members.len());
            let sub = db.subset(&members)?;
            let c = random_projection_clustering(&sub, k_node, &projection, rng)?;
            (c.labels().iter().copied().map(Some).collect(), k_node)
        } else {
            (members.iter().map(|&i| active[i]).collect(), initial.k())
        };

        let mut per_cluster: Vec<Vec<Sequence>> = vec![Vec::new(); k_node];
        for (s, l) in seqs.iter().zip(&labels) {
            if let Some(c) = *l {
                per_cluster[c].push(s.clone());
            }
        }
        let mut candidates: BTreeSet<Pattern> = BTreeSet::new();
        for cluster in per_cluster.iter().filter(|c| !c.is_empty()) {
            candidates.extend(
                mine_sequences(cluster, alphabet_len, &config.mining, mining_max)
                    .into_iter()
                    .map(|f| f.pattern),
            );
        }

        let scorer = match Scorer::new(&seqs, &labels, k_node) {
            Ok(s) => s,
            Err(Error::TooFewClusters { .. }) => break,
            Err(e) => return Err(e),
        };
        let Some(best) = scorer.top1(&candidates) else {
            break;
        };

        let (right, left): (Vec<usize>, Vec<usize>) = members
            .iter()
            .partition(|&&i| contains(db.sequences()[i].items(), best.pattern.items()));
        if !config.boost {
            for label in active.iter_mut() {
                if *label == Some(best.positive_cluster) {
                    *label = None;
                }
            }
        }
        splits.push((best.pattern, members, right));
        members = left;
        remaining -= 1;
    }

    let leaf_count = splits.len() + 1;
    let mut node = IsctNode::Leaf {
        cluster_id: splits.len(),
        members,
    };
    let mut patterns_used = Vec::with_capacity(splits.len());
    for (id, (pattern, node_members, right)) in splits.into_iter().enumerate().rev() {
        patterns_used.push(pattern.clone());
        node = IsctNode::Internal {
            pattern,
            left: Box::new(node),
            right: Box::new(IsctNode::Leaf {
                cluster_id: id,
                members: right,
            }),
            members: node_members,
        };
    }
    patterns_used.reverse();

    Ok(IsctTree {
        root: node,
        k_requested: config.k,
        leaf_count,
        patterns_used,
        alphabet: Arc::clone(db.shared_alphabet()),
    })
}

/// Builds the tree and labels every sequence with its leaf's cluster id.
pub fn fit_predict<R: Rng + ?Sized>(
    db: &SequenceDatabase,
    config: &TreeConfig,
    rng: &mut R,
) -> Result<(IsctTree, Clustering)> {
    let tree = build_isct(db, config, rng)?;
    let labels = tree.fitted_labels(db.len());
    let clustering = Clustering::new(labels, tree.leaf_count)?;
    Ok((tree, clustering))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::tests::{pat, toy};

    fn toy_config() -> TreeConfig {
        let mut cfg = TreeConfig::new(3);
        cfg.boost = false;
        cfg.mining.max_pattern_len = Some(2);
        cfg
    }

    fn ground() -> Clustering {
        Clustering::new(vec![0, 0, 1, 1, 2, 2], 3).unwrap()
    }

    #[test]
    fn toy_tree_matches_worked_example() {
        let db = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tree = build_isct_from_clustering(&db, &toy_config(), &ground(), &mut rng).unwrap();
        assert_eq!(tree.leaf_count, 3);
        assert_eq!(tree.patterns_used, vec![pat(&db, "bd"), pat(&db, "ab")]);
        assert_eq!(tree.fitted_labels(6), vec![0, 0, 2, 2, 1, 1]);
        for (i, s) in db.sequences().iter().enumerate() {
            assert_eq!(assign(&tree, s.items()), tree.fitted_labels(6)[i]);
        }
        // s4 = acaeadcd has neither ⟨b d⟩ nor ⟨a b⟩.
        assert_eq!(assign(&tree, db.sequences()[3].items()), 2);
    }

    #[test]
    fn toy_partition_holds_up_to_length_four() {
        let db = toy();
        for len in 2..=4 {
            let mut cfg = toy_config();
            cfg.mining.max_pattern_len = Some(len);
            let tree = build_isct_from_clustering(&db, &cfg, &ground(), &mut cfg.rng()).unwrap();
            let mut parts: Vec<Vec<usize>> = tree
                .root
                .leaves()
                .iter()
                .map(|l| l.members().to_vec())
                .collect();
            parts.sort();
            assert_eq!(
                parts,
                vec![vec![0, 1], vec![2, 3], vec![4, 5]],
                "max len {len}"
            );
        }
    }

    #[test]
    fn toy_with_length_five_prefers_longer_single_sequence_patterns() {
        // Length-5 patterns of s2 alone have infinite relative risk and a
        // larger SIM than any pattern shared by s1 and s2.
        let db = toy();
        let mut cfg = toy_config();
        cfg.mining.max_pattern_len = Some(5);
        let tree = build_isct_from_clustering(&db, &cfg, &ground(), &mut cfg.rng()).unwrap();
        assert_eq!(tree.patterns_used[0].len(), 5);
        match &tree.root {
            IsctNode::Internal { right, .. } => assert_eq!(right.size(), 1),
            leaf => panic!("expected a split, got {leaf:?}"),
        }
    }

    #[test]
    fn k_one_is_single_leaf() {
        let db = toy();
        let mut cfg = TreeConfig::new(1);
        cfg.seed = 3;
        let (tree, c) = fit_predict(&db, &cfg, &mut cfg.rng()).unwrap();
        assert_eq!(tree.leaf_count, 1);
        assert!(tree.patterns_used.is_empty());
        assert!(c.labels().iter().all(|&l| l == 0));
        assert_eq!(assign(&tree, &[0, 1, 2]), 0);
    }

    #[test]
    fn rejects_infeasible_k() {
        let db = toy();
        let cfg = TreeConfig::new(7);
        assert_eq!(
            build_isct(&db, &cfg, &mut cfg.rng()),
            Err(Error::InfeasibleK { k: 7, n: 6 })
        );
        let cfg = TreeConfig::new(0);
        assert!(matches!(
            build_isct(&db, &cfg, &mut cfg.rng()),
            Err(Error::InfeasibleK { k: 0, .. })
        ));
    }

    #[test]
    fn k_equals_n_with_min_split_one() {
        let db = toy();
        let mut cfg = TreeConfig::new(6);
        cfg.min_split = 1;
        cfg.projection.num_patterns = 64;
        let (tree, c) = fit_predict(&db, &cfg, &mut cfg.rng()).unwrap();
        assert!(tree.leaf_count <= 6);
        assert_eq!(tree.patterns_used.len(), tree.leaf_count - 1);
        assert_eq!(c.nonempty_clusters(), tree.leaf_count);
    }

    #[test]
    fn boosted_fit_is_deterministic_and_consistent() {
        let db = toy();
        let mut cfg = TreeConfig::new(3);
        cfg.min_split = 1;
        cfg.seed = 11;
        let (t1, c1) = fit_predict(&db, &cfg, &mut cfg.rng()).unwrap();
        let (t2, c2) = fit_predict(&db, &cfg, &mut cfg.rng()).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(c1, c2);
        for (i, s) in db.sequences().iter().enumerate() {
            assert_eq!(assign(&t1, s.items()), c1.labels()[i]);
        }
    }
}
