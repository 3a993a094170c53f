//! Sequence, label and assignment files.
//!
//! * tokens: one sequence per line, whitespace-separated items, blank lines
//!   skipped.
//! * SPMF: integer items, `-1` closes an itemset, `-2` closes the sequence.
//!   Itemsets are flattened in order; a multi-item itemset is reported as a
//!   warning.
//! * labels: one label token per line, aligned with the sequences.
//! * assignments: `index<TAB>cluster_id` per line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use isct_core::{Alphabet, Sequence, SequenceDatabase};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    Tokens,
    Spmf,
}

/// A database plus any non-fatal issues noticed while parsing it.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub database: SequenceDatabase,
    pub warnings: Vec<String>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes through a sibling temporary file and a rename, so readers never
/// observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(e)
    })
}

pub fn parse_tokens(text: &str, path: &str) -> Result<SequenceDatabase> {
    let rows: Vec<Vec<&str>> = text
        .lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>())
        .filter(|r| !r.is_empty())
        .collect();
    if rows.is_empty() {
        return Err(Error::NoSequences {
            path: path.to_string(),
        });
    }
    Ok(SequenceDatabase::from_symbol_rows(rows)?)
}

pub fn load_tokens(path: &Path) -> Result<SequenceDatabase> {
    parse_tokens(&read(path)?, &path.display().to_string())
}

/// Inverse of [`load_tokens`].
pub fn format_tokens(db: &SequenceDatabase) -> String {
    let alphabet = db.alphabet();
    let mut out = String::new();
    for s in db.sequences() {
        let line: Vec<&str> = s
            .items()
            .iter()
            .map(|&i| {
                alphabet
                    .symbol(i)
                    .expect("database items are in the alphabet")
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_tokens(path: &Path, db: &SequenceDatabase) -> Result<()> {
    write_atomic(path, &format_tokens(db))
}

pub fn parse_spmf(text: &str, path: &str) -> Result<Loaded> {
    let mut alphabet = Alphabet::new();
    let mut sequences = Vec::new();
    let mut warnings = Vec::new();
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_string(),
        line,
        msg,
    };

    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with(['#', '%', '@']) {
            continue;
        }
        let mut items = Vec::new();
        let mut itemset = 0usize;
        let mut terminated = false;
        for tok in line.split_whitespace() {
            if terminated {
                return Err(parse_err(line_no, format!("token {tok:?} after -2")));
            }
            let value: i64 = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("malformed token {tok:?}")))?;
            match value {
                -1 | -2 => {
                    if itemset > 1 {
                        warnings.push(format!(
                            "{path}:{line_no}: itemset of {itemset} items flattened into sequence order"
                        ));
                    }
                    itemset = 0;
                    terminated = value == -2;
                }
                v if v < 0 => {
                    return Err(parse_err(line_no, format!("negative item {v}")));
                }
                _ => {
                    items.push(alphabet.intern(tok));
                    itemset += 1;
                }
            }
        }
        if !terminated {
            return Err(parse_err(line_no, "missing -2 terminator".to_string()));
        }
        if items.is_empty() {
            return Err(parse_err(line_no, "empty sequence".to_string()));
        }
        sequences.push(Sequence::new(items));
    }
    if sequences.is_empty() {
        return Err(Error::NoSequences {
            path: path.to_string(),
        });
    }
    Ok(Loaded {
        database: SequenceDatabase::new(alphabet, sequences)?,
        warnings,
    })
}

pub fn load_spmf(path: &Path) -> Result<Loaded> {
    parse_spmf(&read(path)?, &path.display().to_string())
}

pub fn load(path: &Path, format: InputFormat) -> Result<Loaded> {
    match format {
        InputFormat::Tokens => Ok(Loaded {
            database: load_tokens(path)?,
            warnings: Vec::new(),
        }),
        InputFormat::Spmf => load_spmf(path),
    }
}

/// Label tokens mapped to dense ids in first-appearance order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    pub ids: Vec<usize>,
    pub names: Vec<String>,
}

pub fn parse_labels(text: &str) -> Labels {
    let mut names: Vec<String> = Vec::new();
    let mut ids = Vec::new();
    for tok in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let id = match names.iter().position(|n| n == tok) {
            Some(id) => id,
            None => {
                names.push(tok.to_string());
                names.len() - 1
            }
        };
        ids.push(id);
    }
    Labels { ids, names }
}

pub fn load_labels(path: &Path) -> Result<Labels> {
    Ok(parse_labels(&read(path)?))
}

pub fn format_assignments(labels: &[usize]) -> String {
    let mut out = String::new();
    for (i, l) in labels.iter().enumerate() {
        let _ = writeln!(out, "{i}\t{l}");
    }
    out
}

pub fn parse_assignments(text: &str, path: &str) -> Result<Vec<usize>> {
    let mut labels = Vec::new();
    for (no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: &str| Error::Parse {
            path: path.to_string(),
            line: no + 1,
            msg: msg.to_string(),
        };
        let (idx, cluster) = line
            .split_once('\t')
            .ok_or_else(|| err("expected index<TAB>cluster"))?;
        let idx: usize = idx.trim().parse().map_err(|_| err("bad index"))?;
        let cluster: usize = cluster.trim().parse().map_err(|_| err("bad cluster id"))?;
        if idx != labels.len() {
            return Err(err("indices must be consecutive from 0"));
        }
        labels.push(cluster);
    }
    Ok(labels)
}

pub fn load_assignments(path: &Path) -> Result<Vec<usize>> {
    parse_assignments(&read(path)?, &path.display().to_string())
}
