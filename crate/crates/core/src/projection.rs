//! Random projection clustering: random patterns, LCS featurization, PCA and
//! k-means.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::seq::{lcs_length, Alphabet, ItemId, Pattern, SequenceDatabase};

/// Matrices at or below this side length are eigen-decomposed directly.
const DENSE_EIGEN_LIMIT: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionConfig {
    pub num_patterns: usize,
    /// Longest random pattern. `None` picks [`auto_max_pattern_len`] from the
    /// shortest sequence of the database being clustered.
    pub max_random_len: Option<usize>,
    /// PCA output dimension; `None` uses the number of clusters.
    pub pca_dims: Option<usize>,
    pub kmeans_restarts: usize,
    pub kmeans_max_iters: usize,
    pub kmeans_tol: f64,
    pub seed: u64,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        Self {
            num_patterns: 2048,
            max_random_len: None,
            pca_dims: None,
            kmeans_restarts: 10,
            kmeans_max_iters: 300,
            kmeans_tol: 1e-4,
            seed: 0,
        }
    }
}

impl ProjectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_patterns == 0 {
            return Err(Error::InvalidConfig("num_patterns must be >= 1"));
        }
        if self.max_random_len == Some(0) {
            return Err(Error::InvalidConfig("max_random_len must be >= 1"));
        }
        if self.pca_dims == Some(0) {
            return Err(Error::InvalidConfig("pca_dims must be >= 1"));
        }
        if self.kmeans_restarts == 0 || self.kmeans_max_iters == 0 {
            return Err(Error::InvalidConfig(
                "k-means restarts and iterations must be >= 1",
            ));
        }
        if self.kmeans_tol.is_nan() || self.kmeans_tol < 0.0 {
            return Err(Error::InvalidConfig("kmeans_tol must be non-negative"));
        }
        Ok(())
    }

    pub fn max_len_for(&self, db: &SequenceDatabase) -> usize {
        self.max_random_len
            .unwrap_or_else(|| auto_max_pattern_len(db.min_len()))
    }

    /// A fresh random stream seeded from `seed`.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Default maximum pattern length: 5 when every sequence has at least 10
/// items, otherwise the shortest sequence length.
pub fn auto_max_pattern_len(min_sequence_len: usize) -> usize {
    if min_sequence_len >= 10 {
        5
    } else {
        min_sequence_len.max(1)
    }
}

/// Dense `rows × cols` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), rows * cols, "value count must be rows * cols");
        Self { rows, cols, values }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            values.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (m, x) in means.iter_mut().zip(self.row(i)) {
                *m += x;
            }
        }
        if self.rows > 0 {
            means.iter_mut().for_each(|m| *m /= self.rows as f64);
        }
        means
    }
}

/// Hard assignment of `labels.len()` items to cluster ids in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clustering {
    labels: Vec<usize>,
    k: usize,
}

impl Clustering {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig("clustering needs k >= 1"));
        }
        if labels.iter().any(|&l| l >= k) {
            return Err(Error::InvalidConfig("cluster label out of range"));
        }
        Ok(Self { labels, k })
    }

    /// Uses `max(label) + 1` as `k`.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().max().map_or(1, |m| m + 1);
        Self::new(labels, k)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn nonempty_clusters(&self) -> usize {
        self.sizes().iter().filter(|&&s| s > 0).count()
    }

    /// Item indices of each cluster, in index order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }
}

/// Draws `num_patterns` random patterns over `alphabet`.
///
/// Lengths are uniform on `1..=max_len` and items uniform with replacement.
/// Duplicates are re-drawn within a budget of `10 * num_patterns` draws;
/// once it is spent, remaining draws are kept as they come.
pub fn generate_random_patterns<R: Rng + ?Sized>(
    alphabet: &Alphabet,
    num_patterns: usize,
    max_len: usize,
    rng: &mut R,
) -> Vec<Pattern> {
    let m = alphabet.len();
    if m == 0 || num_patterns == 0 {
        return Vec::new();
    }
    let max_len = max_len.max(1);
    let draw = |rng: &mut R| -> Pattern {
        let len = rng.random_range(1..=max_len);
        Pattern::new((0..len).map(|_| rng.random_range(0..m) as ItemId).collect())
    };

    let budget = num_patterns.saturating_mul(10);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(num_patterns);
    let mut draws = 0;
    while out.len() < num_patterns && draws < budget {
        let p = draw(rng);
        draws += 1;
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    while out.len() < num_patterns {
        out.push(draw(rng));
    }
    out
}

/// Normalized LCS features: entry `(i, j)` is `lcs(s_i, p_j) / |p_j|`.
pub fn lcs_transform(db: &SequenceDatabase, patterns: &[Pattern]) -> FeatureMatrix {
    let rows = db.len();
    let cols = patterns.len();
    let mut values = Vec::with_capacity(rows * cols);
    for s in db.sequences() {
        for p in patterns {
            let v = if p.is_empty() {
                0.0
            } else {
                lcs_length(s.items(), p.items()) as f64 / p.len() as f64
            };
            values.push(v);
        }
    }
    FeatureMatrix::new(rows, cols, values)
}

/// A fitted principal component basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    pub mean: Vec<f64>,
    /// Orthonormal directions, strongest first. Each direction's
    /// largest-magnitude loading is positive.
    pub components: Vec<Vec<f64>>,
    /// Sample variance along each component (divisor `n - 1`).
    pub explained_variance: Vec<f64>,
}

impl Pca {
    pub fn transform(&self, x: &FeatureMatrix) -> FeatureMatrix {
        let d = self.components.len();
        let mut values = Vec::with_capacity(x.rows() * d);
        let mut centered = vec![0.0; x.cols()];
        for i in 0..x.rows() {
            for ((c, v), m) in centered.iter_mut().zip(x.row(i)).zip(&self.mean) {
                *c = v - m;
            }
            for comp in &self.components {
                values.push(linalg::dot(&centered, comp));
            }
        }
        FeatureMatrix::new(x.rows(), d, values)
    }
}

/// Fits the top `min(target_dims, rows, cols)` principal components.
pub fn pca_fit(x: &FeatureMatrix, target_dims: usize) -> Pca {
    let (n, d) = (x.rows(), x.cols());
    let mean = x.column_means();
    let out_dims = target_dims.min(n).min(d);
    if out_dims == 0 {
        return Pca {
            mean,
            components: Vec::new(),
            explained_variance: Vec::new(),
        };
    }
    let mut centered = x.values().to_vec();
    for i in 0..n {
        for j in 0..d {
            centered[i * d + j] -= mean[j];
        }
    }
    let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };

    let (mut components, mut values) = if d <= n && d <= DENSE_EIGEN_LIMIT {
        covariance_route(&centered, n, d, out_dims)
    } else if n <= DENSE_EIGEN_LIMIT {
        gram_route(&centered, n, d, out_dims)
    } else {
        subspace_route(&centered, n, d, out_dims)
    };

    linalg::orthonormalize(&mut components, 1e-10);
    for (comp, val) in components.iter_mut().zip(values.iter_mut()) {
        *val = val.max(0.0) / denom;
        fix_sign(comp);
    }
    Pca {
        mean,
        components,
        explained_variance: values,
    }
}

/// Mean-centers `x` and projects it onto its top principal components.
pub fn pca_reduce(x: &FeatureMatrix, target_dims: usize) -> FeatureMatrix {
    pca_fit(x, target_dims).transform(x)
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if libm::fabs(*x) > libm::fabs(v[best]) {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn covariance_route(c: &[f64], n: usize, d: usize, k: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut cov = vec![0.0; d * d];
    for i in 0..n {
        let row = &c[i * d..(i + 1) * d];
        for a in 0..d {
            let ra = row[a];
            if ra == 0.0 {
                continue;
            }
            for b in a..d {
                cov[a * d + b] += ra * row[b];
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            cov[a * d + b] = cov[b * d + a];
        }
    }
    let eig = linalg::symmetric_eigen(&cov, d);
    (
        eig.vectors.into_iter().take(k).collect(),
        eig.values.into_iter().take(k).collect(),
    )
}

/// Eigenvectors of `X Xᵀ` mapped back through `Xᵀ`; cheaper when `n < d`.
fn gram_route(c: &[f64], n: usize, d: usize, k: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let g = linalg::dot(&c[i * d..(i + 1) * d], &c[j * d..(j + 1) * d]);
            gram[i * n + j] = g;
            gram[j * n + i] = g;
        }
    }
    let eig = linalg::symmetric_eigen(&gram, n);
    let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let mut comps = Vec::with_capacity(k);
    let mut vals = Vec::with_capacity(k);
    for (u, &lambda) in eig.vectors.iter().zip(&eig.values).take(k) {
        let mut v = vec![0.0; d];
        if lambda > 1e-12 * top.max(f64::MIN_POSITIVE) && lambda > 0.0 {
            for (i, &ui) in u.iter().enumerate() {
                let row = &c[i * d..(i + 1) * d];
                v.iter_mut().zip(row).for_each(|(x, r)| *x += ui * r);
            }
        }
        comps.push(v);
        vals.push(lambda.max(0.0));
    }
    (comps, vals)
}

/// Block power iteration on the covariance operator followed by a
/// Rayleigh-Ritz step. Starting block is drawn from a fixed seed.
fn subspace_route(c: &[f64], n: usize, d: usize, k: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let q = (k + 8).min(d).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f9c);
    let mut block: Vec<Vec<f64>> = (0..q)
        .map(|_| (0..d).map(|_| rng.random::<f64>() - 0.5).collect())
        .collect();
    linalg::orthonormalize(&mut block, 1e-12);

    let apply = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; d];
        for i in 0..n {
            let row = &c[i * d..(i + 1) * d];
            let t = linalg::dot(row, v);
            if t != 0.0 {
                out.iter_mut().zip(row).for_each(|(o, r)| *o += t * r);
            }
        }
        out
    };

    let mut prev = vec![0.0; q];
    for _ in 0..500 {
        let mut next: Vec<Vec<f64>> = block.iter().map(|v| apply(v)).collect();
        let ritz: Vec<f64> = block
            .iter()
            .zip(&next)
            .map(|(v, w)| linalg::dot(v, w))
            .collect();
        linalg::orthonormalize(&mut next, 1e-12);
        block = next;
        let converged = ritz
            .iter()
            .zip(&prev)
            .take(k)
            .all(|(a, b)| libm::fabs(a - b) <= 1e-13 * libm::fabs(*a).max(1e-300));
        prev = ritz;
        if converged {
            break;
        }
    }

    let images: Vec<Vec<f64>> = block.iter().map(|v| apply(v)).collect();
    let mut small = vec![0.0; q * q];
    for a in 0..q {
        for b in 0..q {
            small[a * q + b] = linalg::dot(&block[a], &images[b]);
        }
    }
    for a in 0..q {
        for b in 0..a {
            let avg = 0.5 * (small[a * q + b] + small[b * q + a]);
            small[a * q + b] = avg;
            small[b * q + a] = avg;
        }
    }
    let eig = linalg::symmetric_eigen(&small, q);
    let comps = eig
        .vectors
        .iter()
        .take(k)
        .map(|y| {
            let mut v = vec![0.0; d];
            for (coef, b) in y.iter().zip(&block) {
                v.iter_mut().zip(b).for_each(|(x, bb)| *x += coef * bb);
            }
            v
        })
        .collect();
    (comps, eig.values.into_iter().take(k).collect())
}

/// Outcome of [`kmeans_fit`]: the winning restart.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub clustering: Clustering,
    pub centers: Vec<Vec<f64>>,
    pub inertia: f64,
    /// Inertia after every Lloyd iteration of the winning restart.
    pub inertia_trace: Vec<f64>,
}

pub fn kmeans<R: Rng + ?Sized>(
    x: &FeatureMatrix,
    k: usize,
    config: &ProjectionConfig,
    rng: &mut R,
) -> Result<Clustering> {
    kmeans_fit(x, k, config, rng).map(|fit| fit.clustering)
}

/// Lloyd's algorithm with k-means++ seeding over `kmeans_restarts` restarts,
/// keeping the lowest-inertia run (earliest on ties).
///
/// Each restart gets its own stream seeded from one draw of `rng`, so the
/// result does not depend on how restarts are scheduled.
pub fn kmeans_fit<R: Rng + ?Sized>(
    x: &FeatureMatrix,
    k: usize,
    config: &ProjectionConfig,
    rng: &mut R,
) -> Result<KMeansFit> {
    let n = x.rows();
    if k == 0 || n < k {
        return Err(Error::InfeasibleK { k, n });
    }
    let restarts = config.kmeans_restarts.max(1);
    let seeds: Vec<u64> = (0..restarts).map(|_| rng.next_u64()).collect();
    let mut best: Option<KMeansFit> = None;
    for seed in seeds {
        let mut sub = ChaCha8Rng::seed_from_u64(seed);
        let fit = lloyd(x, k, config, &mut sub);
        if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus_seed<R: RngCore + ?Sized>(x: &FeatureMatrix, k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = x.rows();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centers = vec![x.row(first).to_vec()];
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(x.row(i), &centers[0])).collect();

    while centers.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 && total.is_finite() {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in nearest.iter().enumerate() {
                acc += w;
                if w > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            pick.unwrap_or_else(|| (0..n).rev().find(|&i| nearest[i] > 0.0).unwrap())
        } else {
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        let c = x.row(pick).to_vec();
        for (i, w) in nearest.iter_mut().enumerate() {
            *w = w.min(sq_dist(x.row(i), &c));
        }
        centers.push(c);
    }
    centers
}

fn lloyd<R: RngCore + ?Sized>(
    x: &FeatureMatrix,
    k: usize,
    config: &ProjectionConfig,
    rng: &mut R,
) -> KMeansFit {
    let (n, d) = (x.rows(), x.cols());
    let mut centers = plus_plus_seed(x, k, rng);
    let mut labels = vec![0usize; n];
    let mut trace = Vec::new();

    for _ in 0..config.kmeans_max_iters.max(1) {
        for (i, label) in labels.iter_mut().enumerate() {
            let row = x.row(i);
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let dist = sq_dist(row, center);
                if dist < best_d {
                    best_d = dist;
                    best = c;
                }
            }
            *label = best;
        }

        // Empty clusters take the point farthest from its own center.
        let mut sizes = vec![0usize; k];
        labels.iter().for_each(|&l| sizes[l] += 1);
        for c in 0..k {
            if sizes[c] > 0 {
                continue;
            }
            let mut far = None;
            let mut far_d = -1.0;
            for i in 0..n {
                if sizes[labels[i]] <= 1 {
                    continue;
                }
                let dist = sq_dist(x.row(i), &centers[labels[i]]);
                if dist > far_d {
                    far_d = dist;
                    far = Some(i);
                }
            }
            let i = far.expect("n >= k leaves a donor cluster");
            sizes[labels[i]] -= 1;
            labels[i] = c;
            sizes[c] = 1;
            centers[c] = x.row(i).to_vec();
        }

        let mut next = vec![vec![0.0; d]; k];
        for (i, &l) in labels.iter().enumerate() {
            next[l].iter_mut().zip(x.row(i)).for_each(|(a, v)| *a += v);
        }
        for (c, center) in next.iter_mut().enumerate() {
            let s = sizes[c] as f64;
            center.iter_mut().for_each(|a| *a /= s);
        }
        let shift = centers
            .iter()
            .zip(&next)
            .map(|(a, b)| libm::sqrt(sq_dist(a, b)))
            .fold(0.0, f64::max);
        centers = next;
        let inertia = (0..n).map(|i| sq_dist(x.row(i), &centers[labels[i]])).sum();
        trace.push(inertia);
        if shift < config.kmeans_tol {
            break;
        }
    }

    KMeansFit {
        clustering: Clustering { labels, k },
        centers,
        inertia: *trace.last().expect("at least one iteration"),
        inertia_trace: trace,
    }
}

/// Random patterns → LCS features → PCA to `pca_dims` (default `k`) → k-means.
pub fn random_projection_clustering<R: Rng + ?Sized>(
    db: &SequenceDatabase,
    k: usize,
    config: &ProjectionConfig,
    rng: &mut R,
) -> Result<Clustering> {
    config.validate()?;
    if k == 0 || db.len() < k {
        return Err(Error::InfeasibleK { k, n: db.len() });
    }
    let patterns = generate_random_patterns(
        db.alphabet(),
        config.num_patterns,
        config.max_len_for(db),
        rng,
    );
    let features = lcs_transform(db, &patterns);
    let reduced = pca_reduce(&features, config.pca_dims.unwrap_or(k));
    kmeans(&reduced, k, config, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::contains;
    use crate::seq::tests::{pat, toy};

    fn rand_matrix(rows: usize, cols: usize, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FeatureMatrix::new(
            rows,
            cols,
            (0..rows * cols).map(|_| rng.random::<f64>()).collect(),
        )
    }

    fn assert_orthonormal(pca: &Pca, tol: f64) {
        for (i, a) in pca.components.iter().enumerate() {
            for (j, b) in pca.components.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((linalg::dot(a, b) - expect).abs() < tol, "gram[{i}][{j}]");
            }
        }
    }

    #[test]
    fn auto_max_len_rule() {
        assert_eq!(auto_max_pattern_len(5), 5);
        assert_eq!(auto_max_pattern_len(3), 3);
        assert_eq!(auto_max_pattern_len(10), 5);
        assert_eq!(auto_max_pattern_len(400), 5);
    }

    #[test]
    fn single_symbol_alphabet_exhausts_dedup() {
        let a = Alphabet::from_symbols(["x"]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ps = generate_random_patterns(&a, 3, 1, &mut rng);
        assert_eq!(ps, vec![Pattern::new(vec![0]); 3]);
    }

    #[test]
    fn random_patterns_respect_bounds_and_seed() {
        let db = toy();
        let gen = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            generate_random_patterns(db.alphabet(), 2048, 5, &mut rng)
        };
        let ps = gen(42);
        assert_eq!(ps.len(), 2048);
        assert!(ps.iter().all(|p| (1..=5).contains(&p.len())));
        assert!(ps.iter().flat_map(|p| p.items()).all(|&i| (i as usize) < 5));
        assert_eq!(ps, gen(42));
        let distinct: BTreeSet<_> = ps.iter().collect();
        assert_eq!(distinct.len(), 2048);
    }

    #[test]
    fn lcs_transform_examples() {
        let db = toy();
        let ps = [pat(&db, "bd"), pat(&db, "b"), pat(&db, "abbc")];
        let x = lcs_transform(&db, &ps);
        assert_eq!((x.rows(), x.cols()), (6, 3));
        assert_eq!(x.get(0, 0), 1.0);
        assert_eq!(x.get(2, 1), 0.0);
        assert_eq!(x.get(2, 2), 0.5);
        for i in 0..6 {
            for (j, p) in ps.iter().enumerate() {
                let v = x.get(i, j);
                assert!((0.0..=1.0).contains(&v));
                assert_eq!(v == 1.0, contains(db.sequences()[i].items(), p.items()));
            }
        }
    }

    #[test]
    fn pca_constant_matrix_projects_to_zero() {
        let x = FeatureMatrix::from_rows(&vec![vec![0.3, 0.7, 1.0]; 4]);
        let y = pca_reduce(&x, 2);
        assert_eq!((y.rows(), y.cols()), (4, 2));
        assert!(y.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pca_on_a_line_preserves_distances() {
        let rows: Vec<Vec<f64>> = [0.0, 1.0, 2.5, -3.0, 7.0]
            .iter()
            .map(|&t| vec![1.0 + 2.0 * t, -1.0 + t])
            .collect();
        let x = FeatureMatrix::from_rows(&rows);
        let y = pca_reduce(&x, 1);
        assert_eq!(y.cols(), 1);
        for i in 0..5 {
            for j in 0..5 {
                let orig = libm::sqrt(sq_dist(x.row(i), x.row(j)));
                let proj = (y.get(i, 0) - y.get(j, 0)).abs();
                assert!((orig - proj).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn pca_components_orthonormal_all_routes() {
        // covariance route (d <= n), gram route (n < d), subspace route (both large)
        for &(n, d, k) in &[(10, 6, 3), (6, 40, 4), (300, 280, 5)] {
            let x = rand_matrix(n, d, (n * d) as u64);
            let pca = pca_fit(&x, k);
            assert_eq!(pca.components.len(), k.min(n).min(d));
            assert_orthonormal(&pca, 1e-9);
            for w in pca.explained_variance.windows(2) {
                assert!(w[0] >= w[1] - 1e-9);
            }
            let y = pca.transform(&x);
            for m in y.column_means() {
                assert!(m.abs() < 1e-9);
            }
            for comp in &pca.components {
                let big = comp
                    .iter()
                    .fold(0.0f64, |a, &b| if b.abs() > a.abs() { b } else { a });
                assert!(big > 0.0);
            }
        }
    }

    #[test]
    fn pca_routes_agree_on_variance() {
        let x = rand_matrix(12, 9, 3);
        let cov = pca_fit(&x, 4);
        // Transposing the roles exercises the Gram route on the same spectrum.
        let (n, d) = (x.rows(), x.cols());
        let mean = x.column_means();
        let mut c = x.values().to_vec();
        for i in 0..n {
            for j in 0..d {
                c[i * d + j] -= mean[j];
            }
        }
        let (_, gram_vals) = gram_route(&c, n, d, 4);
        let (_, sub_vals) = subspace_route(&c, n, d, 4);
        for i in 0..4 {
            let v = cov.explained_variance[i] * (n - 1) as f64;
            assert!((v - gram_vals[i]).abs() < 1e-9 * v.max(1.0));
            assert!((v - sub_vals[i]).abs() < 1e-9 * v.max(1.0));
        }
    }

    #[test]
    fn kmeans_separated_groups() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut rows = Vec::new();
        for g in 0..2 {
            for _ in 0..10 {
                rows.push(vec![
                    100.0 * g as f64 + rng.random::<f64>(),
                    rng.random::<f64>(),
                ]);
            }
        }
        let x = FeatureMatrix::from_rows(&rows);
        let c = kmeans(&x, 2, &ProjectionConfig::default(), &mut rng).unwrap();
        let l = c.labels();
        assert!(l[..10].iter().all(|&v| v == l[0]));
        assert!(l[10..].iter().all(|&v| v == l[10]));
        assert_ne!(l[0], l[10]);
    }

    #[test]
    fn kmeans_n_equals_k() {
        let x = rand_matrix(5, 3, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let fit = kmeans_fit(&x, 5, &ProjectionConfig::default(), &mut rng).unwrap();
        assert_eq!(fit.inertia, 0.0);
        let mut l = fit.clustering.labels().to_vec();
        l.sort();
        assert_eq!(l, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn kmeans_duplicate_points_keep_all_clusters_nonempty() {
        let x = FeatureMatrix::from_rows(&vec![vec![1.0, 1.0]; 6]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = kmeans(&x, 3, &ProjectionConfig::default(), &mut rng).unwrap();
        assert_eq!(c.nonempty_clusters(), 3);
    }

    #[test]
    fn kmeans_rejects_infeasible_k() {
        let x = rand_matrix(2, 2, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cfg = ProjectionConfig::default();
        assert_eq!(
            kmeans(&x, 3, &cfg, &mut rng),
            Err(Error::InfeasibleK { k: 3, n: 2 })
        );
        assert_eq!(
            kmeans(&x, 0, &cfg, &mut rng),
            Err(Error::InfeasibleK { k: 0, n: 2 })
        );
    }

    #[test]
    fn kmeans_inertia_non_increasing() {
        let x = rand_matrix(200, 4, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fit = kmeans_fit(&x, 6, &ProjectionConfig::default(), &mut rng).unwrap();
        for w in fit.inertia_trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn random_projection_clustering_on_toy() {
        let db = toy();
        let cfg = ProjectionConfig::default();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_projection_clustering(&db, 3, &cfg, &mut rng).unwrap()
        };
        let c = run(7);
        assert_eq!(c.len(), 6);
        assert_eq!(c.nonempty_clusters(), 3);
        assert_eq!(c, run(7));

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let one = random_projection_clustering(&db, 1, &cfg, &mut rng).unwrap();
        assert!(one.labels().iter().all(|&l| l == 0));
        assert!(matches!(
            random_projection_clustering(&db, 7, &cfg, &mut rng),
            Err(Error::InfeasibleK { k: 7, n: 6 })
        ));
    }
}
