//! Items, sequences, databases and patterns, plus the containment, LCS and
//! support primitives the rest of the crate is built on.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Dense item identifier, an index into an [`Alphabet`].
pub type ItemId = u32;

/// Interned item symbols. Ids are assigned densely in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: BTreeMap<String, ItemId>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an alphabet from distinct symbols; repeated symbols keep their
    /// first id.
    pub fn from_symbols<I, S>(symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut alphabet = Self::new();
        for s in symbols {
            alphabet.intern(s.as_ref());
        }
        alphabet
    }

    /// Returns the id of `symbol`, adding it if unseen.
    pub fn intern(&mut self, symbol: &str) -> ItemId {
        if let Some(&id) = self.index.get(symbol) {
            return id;
        }
        let id = self.symbols.len() as ItemId;
        self.symbols.push(symbol.to_string());
        self.index.insert(symbol.to_string(), id);
        id
    }

    pub fn id(&self, symbol: &str) -> Option<ItemId> {
        self.index.get(symbol).copied()
    }

    pub fn symbol(&self, id: ItemId) -> Option<&str> {
        self.symbols.get(id as usize).map(String::as_str)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// An ordered list of item ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequence(Vec<ItemId>);

impl Sequence {
    pub fn new(items: Vec<ItemId>) -> Self {
        Sequence(items)
    }

    pub fn items(&self) -> &[ItemId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<ItemId>> for Sequence {
    fn from(items: Vec<ItemId>) -> Self {
        Sequence(items)
    }
}

impl AsRef<[ItemId]> for Sequence {
    fn as_ref(&self) -> &[ItemId] {
        &self.0
    }
}

/// A sequential pattern: used as a random projection axis and as a split test.
///
/// Ordering is lexicographic over item ids, which is the final tie-breaker
/// wherever patterns are ranked.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern(Vec<ItemId>);

impl Pattern {
    pub fn new(items: Vec<ItemId>) -> Self {
        Pattern(items)
    }

    pub fn items(&self) -> &[ItemId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Renders the pattern with alphabet symbols, e.g. `⟨b d⟩`.
    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> PatternDisplay<'a> {
        PatternDisplay {
            pattern: self,
            alphabet,
        }
    }
}

impl From<Vec<ItemId>> for Pattern {
    fn from(items: Vec<ItemId>) -> Self {
        Pattern(items)
    }
}

impl AsRef<[ItemId]> for Pattern {
    fn as_ref(&self) -> &[ItemId] {
        &self.0
    }
}

pub struct PatternDisplay<'a> {
    pattern: &'a Pattern,
    alphabet: &'a Alphabet,
}

impl fmt::Display for PatternDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        for (i, &item) in self.pattern.items().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match self.alphabet.symbol(item) {
                Some(s) => f.write_str(s)?,
                None => write!(f, "#{item}")?,
            }
        }
        f.write_str("⟩")
    }
}

/// A nonempty list of nonempty sequences over a shared alphabet.
///
/// Duplicate sequences are kept. The alphabet is reference counted so that
/// sub-databases (clusters, tree nodes) are cheap to form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceDatabase {
    alphabet: Arc<Alphabet>,
    sequences: Vec<Sequence>,
    source_ids: Option<Vec<String>>,
}

impl SequenceDatabase {
    pub fn new(alphabet: Alphabet, sequences: Vec<Sequence>) -> Result<Self> {
        Self::with_shared_alphabet(Arc::new(alphabet), sequences)
    }

    pub fn with_shared_alphabet(alphabet: Arc<Alphabet>, sequences: Vec<Sequence>) -> Result<Self> {
        if sequences.is_empty() {
            return Err(Error::EmptyDatabase);
        }
        let m = alphabet.len();
        for (index, s) in sequences.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::EmptySequence { index });
            }
            if let Some(&item) = s.items().iter().find(|&&it| it as usize >= m) {
                return Err(Error::UnknownItem {
                    item,
                    alphabet_len: m,
                });
            }
        }
        Ok(Self {
            alphabet,
            sequences,
            source_ids: None,
        })
    }

    /// Interns string rows into a fresh alphabet in first-appearance order.
    pub fn from_symbol_rows<R, S>(rows: R) -> Result<Self>
    where
        R: IntoIterator,
        R::Item: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut alphabet = Alphabet::new();
        let sequences: Vec<Sequence> = rows
            .into_iter()
            .map(|row| {
                Sequence::new(
                    row.into_iter()
                        .map(|s| alphabet.intern(s.as_ref()))
                        .collect(),
                )
            })
            .collect();
        Self::new(alphabet, sequences)
    }

    pub fn with_source_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.sequences.len() {
            return Err(Error::LengthMismatch {
                left: ids.len(),
                right: self.sequences.len(),
            });
        }
        self.source_ids = Some(ids);
        Ok(self)
    }

    /// Sub-database holding the sequences at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let sequences = indices.iter().map(|&i| self.sequences[i].clone()).collect();
        let mut sub = Self::with_shared_alphabet(Arc::clone(&self.alphabet), sequences)?;
        if let Some(ids) = &self.source_ids {
            sub.source_ids = Some(indices.iter().map(|&i| ids[i].clone()).collect());
        }
        Ok(sub)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn shared_alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn sequences(&self) -> &[Sequence] {
        &self.sequences
    }

    pub fn source_ids(&self) -> Option<&[String]> {
        self.source_ids.as_deref()
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    /// Always false for a constructed database; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn min_len(&self) -> usize {
        self.sequences.iter().map(Sequence::len).min().unwrap_or(0)
    }

    pub fn total_len(&self) -> usize {
        self.sequences.iter().map(Sequence::len).sum()
    }
}

/// Is `p` a subsequence of `s` (strictly increasing indices, gaps allowed)?
///
/// Greedy leftmost matching, linear in `|s|`. The empty pattern is contained
/// in every sequence.
pub fn contains(s: &[ItemId], p: &[ItemId]) -> bool {
    let mut want = p.iter();
    let mut next = match want.next() {
        Some(x) => x,
        None => return true,
    };
    for item in s {
        if item == next {
            match want.next() {
                Some(x) => next = x,
                None => return true,
            }
        }
    }
    false
}

/// Length of the longest common subsequence of `a` and `b`.
///
/// Standard dynamic program with a single rolling row sized by the shorter
/// argument.
pub fn lcs_length(a: &[ItemId], b: &[ItemId]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return 0;
    }
    let mut row = alloc::vec![0usize; short.len() + 1];
    for &x in long {
        let mut diag = 0;
        for (j, &y) in short.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[short.len()]
}

/// Number of sequences of `db` containing `p`.
pub fn occurrences(p: &[ItemId], db: &SequenceDatabase) -> usize {
    db.sequences()
        .iter()
        .filter(|s| contains(s.items(), p))
        .count()
}

/// Fraction of sequences of `db` containing `p`.
pub fn support(p: &[ItemId], db: &SequenceDatabase) -> Result<f64> {
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    Ok(occurrences(p, db) as f64 / db.len() as f64)
}
