//! Planted-signature sequence data.
//!
//! Every cluster owns a length-3 signature pattern. A sequence is its
//! cluster's signature interleaved at random positions into `noise_len`
//! background items, drawn uniformly from symbols that appear in no
//! signature. A signature is therefore contained in every sequence of its
//! cluster and, as long as signatures differ, in no other sequence.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isct_core::{Alphabet, ItemId, Sequence, SequenceDatabase};

pub const SIGNATURE_LEN: usize = 3;

/// How signature items are laid out over the alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignatureLayout {
    /// Cluster `c` uses the private triple `3c, 3c+1, 3c+2`.
    Disjoint,
    /// All signatures are distinct ordered triples over a shared pool of
    /// `pool` symbols, so clusters overlap in items and in sub-patterns.
    Overlapping { pool: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthConfig {
    pub k: usize,
    pub per_cluster: usize,
    pub alphabet_size: usize,
    pub noise_len: usize,
    pub seed: u64,
    pub layout: SignatureLayout,
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub database: SequenceDatabase,
    /// Ground-truth cluster of every sequence.
    pub labels: Vec<usize>,
    /// Signature item ids per cluster.
    pub signatures: Vec<Vec<ItemId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthError {
    #[error("k must be at least 2 (got {0})")]
    TooFewClusters(usize),
    #[error("per_cluster must be at least 1")]
    EmptyClusters,
    #[error("alphabet of {size} symbols cannot host {needed} signature symbols plus a background symbol")]
    AlphabetTooSmall { size: usize, needed: usize },
    #[error("a pool of {pool} symbols has fewer than {k} distinct ordered triples")]
    PoolTooSmall { pool: usize, k: usize },
}

fn signature_symbols(cfg: &SynthConfig) -> usize {
    match cfg.layout {
        SignatureLayout::Disjoint => SIGNATURE_LEN * cfg.k,
        SignatureLayout::Overlapping { pool } => pool,
    }
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthData, SynthError> {
    if cfg.k < 2 {
        return Err(SynthError::TooFewClusters(cfg.k));
    }
    if cfg.per_cluster == 0 {
        return Err(SynthError::EmptyClusters);
    }
    let reserved = signature_symbols(cfg);
    if cfg.alphabet_size < reserved + 1 {
        return Err(SynthError::AlphabetTooSmall {
            size: cfg.alphabet_size,
            needed: reserved,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let signatures: Vec<Vec<ItemId>> = match cfg.layout {
        SignatureLayout::Disjoint => (0..cfg.k)
            .map(|c| {
                (0..SIGNATURE_LEN)
                    .map(|j| (SIGNATURE_LEN * c + j) as ItemId)
                    .collect()
            })
            .collect(),
        SignatureLayout::Overlapping { pool } => {
            let mut triples = Vec::new();
            for a in 0..pool {
                for b in 0..pool {
                    for c in 0..pool {
                        if a != b && b != c && a != c {
                            triples.push(vec![a as ItemId, b as ItemId, c as ItemId]);
                        }
                    }
                }
            }
            if triples.len() < cfg.k {
                return Err(SynthError::PoolTooSmall { pool, k: cfg.k });
            }
            triples.shuffle(&mut rng);
            triples.truncate(cfg.k);
            triples
        }
    };

    let alphabet = Alphabet::from_symbols((0..cfg.alphabet_size).map(|i| format!("i{i}")));
    let background = reserved..cfg.alphabet_size;
    let len = cfg.noise_len + SIGNATURE_LEN;

    let mut rows: Vec<(Sequence, usize)> = Vec::with_capacity(cfg.k * cfg.per_cluster);
    for (c, sig) in signatures.iter().enumerate() {
        for _ in 0..cfg.per_cluster {
            let mut slots = index::sample(&mut rng, len, SIGNATURE_LEN).into_vec();
            slots.sort_unstable();
            let mut items = Vec::with_capacity(len);
            let mut next_sig = 0;
            for pos in 0..len {
                if next_sig < SIGNATURE_LEN && slots[next_sig] == pos {
                    items.push(sig[next_sig]);
                    next_sig += 1;
                } else {
                    items.push(rng.random_range(background.clone()) as ItemId);
                }
            }
            rows.push((Sequence::new(items), c));
        }
    }
    rows.shuffle(&mut rng);

    let (sequences, labels): (Vec<Sequence>, Vec<usize>) = rows.into_iter().unzip();
    let database = SequenceDatabase::new(alphabet, sequences)
        .expect("generated sequences are nonempty and in-alphabet");
    Ok(SynthData {
        database,
        labels,
        signatures,
    })
}

pub fn format_labels(labels: &[usize]) -> String {
    labels.iter().map(|l| format!("c{l}\n")).collect()
}
