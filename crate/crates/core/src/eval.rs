//! External clustering agreement: purity, NMI and pairwise F1.
//!
//! All measures take raw label slices so that predicted cluster ids and
//! ground-truth class ids need not share a numbering.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Counts of items per (predicted cluster, true class) pair.
///
/// Rows and columns follow the sorted order of the distinct labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    /// Row-major cell counts, then row sums, then column sums.
    cells: Vec<u64>,
    pub total: u64,
}

/// Sorts and dedups `v` in place, returning the number of distinct values.
fn sort_distinct(v: &mut [usize]) -> usize {
    v.sort_unstable();
    let mut len = 0;
    for i in 0..v.len() {
        if len == 0 || v[i] != v[len - 1] {
            v[len] = v[i];
            len += 1;
        }
    }
    len
}

fn dense(distinct: &[usize], label: usize) -> usize {
    distinct
        .binary_search(&label)
        .expect("label is in its own set")
}

impl ContingencyTable {
    pub fn new(pred: &[usize], truth: &[usize]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::LengthMismatch {
                left: pred.len(),
                right: truth.len(),
            });
        }
        if pred.is_empty() {
            return Err(Error::EmptyDatabase);
        }
        let n = pred.len();
        let mut scratch = Vec::with_capacity(2 * n);
        scratch.extend_from_slice(pred);
        scratch.extend_from_slice(truth);
        let (p, t) = scratch.split_at_mut(n);
        let rows = sort_distinct(p);
        let cols = sort_distinct(t);
        let (p, t) = (&p[..rows], &t[..cols]);

        let mut cells = vec![0u64; rows * cols + rows + cols];
        for (&a, &b) in pred.iter().zip(truth) {
            let (i, j) = (dense(p, a), dense(t, b));
            cells[i * cols + j] += 1;
            cells[rows * cols + i] += 1;
            cells[rows * cols + rows + j] += 1;
        }
        Ok(Self {
            rows,
            cols,
            cells,
            total: n as u64,
        })
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.cells[self.rows * self.cols..self.rows * self.cols + self.rows]
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.cells[self.rows * self.cols + self.rows..]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.cells[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.cells[i * self.cols..(i + 1) * self.cols]
    }
}

fn entropy(marginals: &[u64], n: f64) -> f64 {
    marginals
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * libm::log(p)
        })
        .sum()
}

fn pairs(c: u64) -> u64 {
    c * c.saturating_sub(1) / 2
}

impl ContingencyTable {
    pub fn purity(&self) -> f64 {
        let hit: u64 = (0..self.rows)
            .map(|i| self.row(i).iter().copied().max().unwrap_or(0))
            .sum();
        hit as f64 / self.total as f64
    }

    /// See [`nmi`].
    pub fn nmi(&self) -> f64 {
        let n = self.total as f64;
        let (row_sums, col_sums) = (self.row_sums(), self.col_sums());
        let hp = entropy(row_sums, n);
        let ht = entropy(col_sums, n);
        if hp == 0.0 && ht == 0.0 {
            return 1.0;
        }
        if hp == 0.0 || ht == 0.0 {
            return 0.0;
        }
        let mut mi = 0.0;
        for (i, &a) in row_sums.iter().enumerate() {
            for (&c, &b) in self.row(i).iter().zip(col_sums) {
                if c == 0 {
                    continue;
                }
                let c = c as f64;
                let expected = a as f64 * b as f64;
                mi += c / n * libm::log(c * n / expected);
            }
        }
        (mi / (0.5 * (hp + ht))).clamp(0.0, 1.0)
    }

    /// See [`pairwise_f1`].
    pub fn pairwise_f1(&self) -> f64 {
        let tp: u64 = self.cells[..self.rows * self.cols]
            .iter()
            .map(|&c| pairs(c))
            .sum();
        let pred_pairs: u64 = self.row_sums().iter().map(|&c| pairs(c)).sum();
        let true_pairs: u64 = self.col_sums().iter().map(|&c| pairs(c)).sum();
        if pred_pairs == 0 && true_pairs == 0 {
            return 1.0;
        }
        let precision = if pred_pairs == 0 {
            0.0
        } else {
            tp as f64 / pred_pairs as f64
        };
        let recall = if true_pairs == 0 {
            0.0
        } else {
            tp as f64 / true_pairs as f64
        };
        if precision + recall == 0.0 {
            return 0.0;
        }
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn purity(pred: &[usize], truth: &[usize]) -> Result<f64> {
    Ok(ContingencyTable::new(pred, truth)?.purity())
}

/// Mutual information normalized by the arithmetic mean of both entropies.
///
/// Two constant labelings score 1; exactly one constant labeling scores 0.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    Ok(ContingencyTable::new(pred, truth)?.nmi())
}

/// Pair-counting F1 over all unordered pairs of items.
///
/// Undefined precision or recall counts as 0; when neither labeling
/// co-clusters any pair the labelings agree and F1 is 1.
pub fn pairwise_f1(pred: &[usize], truth: &[usize]) -> Result<f64> {
    Ok(ContingencyTable::new(pred, truth)?.pairwise_f1())
}
