//! Top-N frequent sequential pattern mining and discriminative pattern
//! scoring (relative risk, internal similarity, one-vs-rest positive class).

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::projection::{auto_max_pattern_len, Clustering};
use crate::seq::{contains, ItemId, Pattern, Sequence, SequenceDatabase};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningConfig {
    /// Patterns kept per cluster (`maxN`).
    pub max_patterns_per_cluster: usize,
    /// Longest mined pattern; `None` follows the projection's maximum
    /// random pattern length.
    pub max_pattern_len: Option<usize>,
    pub min_pattern_len: usize,
}

impl Default for MiningConfig {
    fn default() -> Self {
        Self {
            max_patterns_per_cluster: 512,
            max_pattern_len: None,
            min_pattern_len: 1,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_patterns_per_cluster == 0 {
            return Err(Error::InvalidConfig(
                "max_patterns_per_cluster must be >= 1",
            ));
        }
        if self.min_pattern_len == 0 {
            return Err(Error::InvalidConfig("min_pattern_len must be >= 1"));
        }
        if self
            .max_pattern_len
            .is_some_and(|m| m < self.min_pattern_len)
        {
            return Err(Error::InvalidConfig(
                "min_pattern_len exceeds max_pattern_len",
            ));
        }
        Ok(())
    }
}

/// A mined pattern with its absolute and relative support in the cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequentPattern {
    pub pattern: Pattern,
    pub count: usize,
    pub support: f64,
}

/// Ranking used for the top-N cut: higher count, then shorter, then
/// lexicographically smaller items. `Less` means "ranks before".
fn frequent_order(a: &(usize, Vec<ItemId>), b: &(usize, Vec<ItemId>)) -> Ordering {
    b.0.cmp(&a.0)
        .then(a.1.len().cmp(&b.1.len()))
        .then_with(|| a.1.cmp(&b.1))
}

/// Heap entry ordered so that the worst-ranked pattern sits on top.
struct Worst((usize, Vec<ItemId>));

impl PartialEq for Worst {
    fn eq(&self, other: &Self) -> bool {
        frequent_order(&self.0, &other.0) == Ordering::Equal
    }
}
impl Eq for Worst {}
impl PartialOrd for Worst {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Worst {
    fn cmp(&self, other: &Self) -> Ordering {
        frequent_order(&self.0, &other.0)
    }
}

struct Miner<'a> {
    seqs: &'a [Sequence],
    budget: usize,
    min_len: usize,
    max_len: usize,
    heap: BinaryHeap<Worst>,
    // scratch for counting distinct extension items per projected sequence
    stamp: Vec<usize>,
    count: Vec<usize>,
    clock: usize,
}

impl Miner<'_> {
    fn full(&self) -> bool {
        self.heap.len() >= self.budget
    }

    /// Could a pattern with this count and length (or any extension of it)
    /// still enter the top-N?
    fn subtree_viable(&self, count: usize, len: usize) -> bool {
        match self.heap.peek() {
            Some(Worst((wc, wp))) if self.full() => {
                count > *wc || (count == *wc && len <= wp.len())
            }
            _ => true,
        }
    }

    fn offer(&mut self, count: usize, items: &[ItemId]) {
        let cand = (count, items.to_vec());
        if !self.full() {
            self.heap.push(Worst(cand));
            return;
        }
        let worse_than_worst = self
            .heap
            .peek()
            .is_some_and(|w| frequent_order(&cand, &w.0) != Ordering::Less);
        if !worse_than_worst {
            self.heap.pop();
            self.heap.push(Worst(cand));
        }
    }

    /// Depth-first pattern growth over a pseudo-projected database of
    /// `(sequence, suffix start)` pairs.
    fn grow(&mut self, prefix: &mut Vec<ItemId>, projected: &[(usize, usize)]) {
        let mut touched: Vec<ItemId> = Vec::new();
        for &(si, start) in projected {
            self.clock += 1;
            for &item in &self.seqs[si].items()[start..] {
                let it = item as usize;
                if self.stamp[it] != self.clock {
                    self.stamp[it] = self.clock;
                    if self.count[it] == 0 {
                        touched.push(item);
                    }
                    self.count[it] += 1;
                }
            }
        }
        touched.sort_unstable();
        let extensions: Vec<(ItemId, usize)> = touched
            .iter()
            .map(|&it| {
                let c = self.count[it as usize];
                self.count[it as usize] = 0;
                (it, c)
            })
            .collect();

        let len = prefix.len() + 1;
        for (item, count) in extensions {
            if !self.subtree_viable(count, len) {
                continue;
            }
            prefix.push(item);
            if len >= self.min_len {
                self.offer(count, prefix);
            }
            if len < self.max_len && self.subtree_viable(count, len + 1) {
                let next: Vec<(usize, usize)> = projected
                    .iter()
                    .filter_map(|&(si, start)| {
                        self.seqs[si].items()[start..]
                            .iter()
                            .position(|&x| x == item)
                            .map(|off| (si, start + off + 1))
                    })
                    .collect();
                self.grow(prefix, &next);
            }
            prefix.pop();
        }
    }
}

/// Mines the `max_patterns_per_cluster` patterns of highest support in
/// `cluster`, with lengths in `[min_pattern_len, max_len]`.
///
/// Uses projected-database pattern growth; once the result buffer is full its
/// weakest entry acts as a rising minimum support that prunes the search.
/// Ties at the cut are resolved by shorter length, then item order, and the
/// output is sorted the same way (descending support first).
///
/// An unset `max_pattern_len` falls back to [`auto_max_pattern_len`] of the
/// cluster's shortest sequence.
pub fn mine_top_frequent(
    cluster: &SequenceDatabase,
    config: &MiningConfig,
) -> Vec<FrequentPattern> {
    let max_len = config
        .max_pattern_len
        .unwrap_or_else(|| auto_max_pattern_len(cluster.min_len()));
    mine_sequences(
        cluster.sequences(),
        cluster.alphabet().len(),
        config,
        max_len,
    )
}

pub(crate) fn mine_sequences(
    seqs: &[Sequence],
    alphabet_len: usize,
    config: &MiningConfig,
    max_len: usize,
) -> Vec<FrequentPattern> {
    let min_len = config.min_pattern_len.max(1);
    if seqs.is_empty() || max_len < min_len {
        return Vec::new();
    }
    let mut miner = Miner {
        seqs,
        budget: config.max_patterns_per_cluster.max(1),
        min_len,
        max_len,
        heap: BinaryHeap::new(),
        stamp: vec![0; alphabet_len],
        count: vec![0; alphabet_len],
        clock: 0,
    };
    let root: Vec<(usize, usize)> = (0..seqs.len()).map(|i| (i, 0)).collect();
    miner.grow(&mut Vec::new(), &root);

    let mut found: Vec<(usize, Vec<ItemId>)> = miner.heap.into_iter().map(|w| w.0).collect();
    found.sort_by(frequent_order);
    let n = seqs.len() as f64;
    found
        .into_iter()
        .map(|(count, items)| FrequentPattern {
            pattern: Pattern::new(items),
            count,
            support: count as f64 / n,
        })
        .collect()
}

/// Discriminative statistics of one pattern against a clustering.
///
/// The positive class is the cluster in which the pattern has the highest
/// support (lowest id on ties); the negative class is everything else. The
/// raw counts are kept so rankings compare exact ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPattern {
    pub pattern: Pattern,
    /// Relative risk `supp_pos / supp_neg`; `+inf` when only the positive
    /// class contains the pattern, `0` when the positive class does not.
    pub rr: f64,
    /// `|p| · |D⁺| / Σ_{s ∈ D⁺} |s|`.
    pub sim: f64,
    pub supp_pos: f64,
    pub supp_neg: f64,
    pub positive_cluster: usize,
    pub pos_count: u64,
    pub pos_size: u64,
    pub neg_count: u64,
    pub neg_size: u64,
    pub pos_total_len: u64,
}

impl ScoredPattern {
    fn rr_cmp(&self, other: &Self) -> Ordering {
        let class = |s: &Self| {
            if s.pos_count == 0 {
                0
            } else if s.neg_count == 0 {
                2
            } else {
                1
            }
        };
        match class(self).cmp(&class(other)) {
            Ordering::Equal if class(self) == 1 => {
                // (pa/psa)/(na/nsa) vs (pb/psb)/(nb/nsb)
                let l = self.pos_count as u128
                    * self.neg_size as u128
                    * other.pos_size as u128
                    * other.neg_count as u128;
                let r = other.pos_count as u128
                    * other.neg_size as u128
                    * self.pos_size as u128
                    * self.neg_count as u128;
                l.cmp(&r)
            }
            ord => ord,
        }
    }

    fn sim_cmp(&self, other: &Self) -> Ordering {
        let l = self.pattern.len() as u128 * self.pos_size as u128 * other.pos_total_len as u128;
        let r = other.pattern.len() as u128 * other.pos_size as u128 * self.pos_total_len as u128;
        l.cmp(&r)
    }

    fn supp_pos_cmp(&self, other: &Self) -> Ordering {
        (self.pos_count as u128 * other.pos_size as u128)
            .cmp(&(other.pos_count as u128 * self.pos_size as u128))
    }

    /// Selection order: `Less` ranks first. Higher relative risk, then higher
    /// SIM, then higher positive support, then shorter, then smaller items.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        other
            .rr_cmp(self)
            .then_with(|| other.sim_cmp(self))
            .then_with(|| other.supp_pos_cmp(self))
            .then(self.pattern.len().cmp(&other.pattern.len()))
            .then_with(|| self.pattern.cmp(&other.pattern))
    }
}

/// Per-node scoring context. `labels[i] == None` marks a sequence that still
/// follows the split but takes no part in scoring.
pub(crate) struct Scorer<'a> {
    seqs: &'a [Sequence],
    labels: &'a [Option<usize>],
    sizes: Vec<u64>,
    total_lens: Vec<u64>,
    labeled: u64,
}

impl<'a> Scorer<'a> {
    pub(crate) fn new(seqs: &'a [Sequence], labels: &'a [Option<usize>], k: usize) -> Result<Self> {
        if seqs.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: seqs.len(),
                right: labels.len(),
            });
        }
        let mut sizes = vec![0u64; k];
        let mut total_lens = vec![0u64; k];
        for (s, l) in seqs.iter().zip(labels) {
            if let Some(c) = *l {
                sizes[c] += 1;
                total_lens[c] += s.len() as u64;
            }
        }
        let found = sizes.iter().filter(|&&s| s > 0).count();
        if found < 2 {
            return Err(Error::TooFewClusters { found });
        }
        let labeled = sizes.iter().sum();
        Ok(Self {
            seqs,
            labels,
            sizes,
            total_lens,
            labeled,
        })
    }

    /// Scores `p` and reports how many of the node's sequences contain it.
    pub(crate) fn score(&self, p: &Pattern) -> (ScoredPattern, usize) {
        let mut hits = vec![0u64; self.sizes.len()];
        let mut contained = 0;
        for (s, l) in self.seqs.iter().zip(self.labels) {
            if contains(s.items(), p.items()) {
                contained += 1;
                if let Some(c) = *l {
                    hits[c] += 1;
                }
            }
        }
        // argmax of hits[c] / sizes[c], lowest id on ties
        let mut best: Option<usize> = None;
        for c in 0..self.sizes.len() {
            if self.sizes[c] == 0 {
                continue;
            }
            best = match best {
                None => Some(c),
                Some(b) if hits[c] * self.sizes[b] > hits[b] * self.sizes[c] => Some(c),
                keep => keep,
            };
        }
        let pos = best.expect("scorer holds at least two nonempty clusters");
        let pos_count = hits[pos];
        let pos_size = self.sizes[pos];
        let neg_count = hits.iter().sum::<u64>() - pos_count;
        let neg_size = self.labeled - pos_size;

        let supp_pos = pos_count as f64 / pos_size as f64;
        let supp_neg = neg_count as f64 / neg_size as f64;
        let rr = if pos_count == 0 {
            0.0
        } else if neg_count == 0 {
            f64::INFINITY
        } else {
            supp_pos / supp_neg
        };
        let pos_total_len = self.total_lens[pos];
        let sim = (p.len() as f64 * pos_size as f64) / pos_total_len as f64;
        (
            ScoredPattern {
                pattern: p.clone(),
                rr,
                sim,
                supp_pos,
                supp_neg,
                positive_cluster: pos,
                pos_count,
                pos_size,
                neg_count,
                neg_size,
                pos_total_len,
            },
            contained,
        )
    }

    /// Best candidate whose split of the node's sequences is nontrivial.
    pub(crate) fn top1<'p, I>(&self, candidates: I) -> Option<ScoredPattern>
    where
        I: IntoIterator<Item = &'p Pattern>,
    {
        let n = self.seqs.len();
        let mut best: Option<ScoredPattern> = None;
        for p in candidates {
            if p.is_empty() {
                continue;
            }
            let (scored, contained) = self.score(p);
            if contained == 0 || contained == n {
                continue;
            }
            if best
                .as_ref()
                .is_none_or(|b| scored.rank_cmp(b) == Ordering::Less)
            {
                best = Some(scored);
            }
        }
        best
    }
}

fn full_labels(db: &SequenceDatabase, c: &Clustering) -> Result<Vec<Option<usize>>> {
    if c.len() != db.len() {
        return Err(Error::LengthMismatch {
            left: db.len(),
            right: c.len(),
        });
    }
    Ok(c.labels().iter().copied().map(Some).collect())
}

/// Relative risk, SIM and positive class of `p` under clustering `c`.
pub fn score_pattern(p: &Pattern, db: &SequenceDatabase, c: &Clustering) -> Result<ScoredPattern> {
    let labels = full_labels(db, c)?;
    let scorer = Scorer::new(db.sequences(), &labels, c.k())?;
    Ok(scorer.score(p).0)
}

/// The highest-ranked candidate (see [`ScoredPattern::rank_cmp`]) that
/// splits `db` into two nonempty parts, or `None` if no candidate does.
///
/// Fewer than two nonempty clusters is an error.
pub fn top1_discriminative(
    candidates: &[Pattern],
    db: &SequenceDatabase,
    c: &Clustering,
) -> Result<Option<ScoredPattern>> {
    let labels = full_labels(db, c)?;
    let scorer = Scorer::new(db.sequences(), &labels, c.k())?;
    let unique: BTreeSet<&Pattern> = candidates.iter().collect();
    Ok(scorer.top1(unique))
}
