//! tf-idf ranked document retrieval.
//!
//! Three engines answer the same top-k question:
//!
//! - [`topk_dr`]: best-first splitting of document segments, using only
//!   counting on the wavelet tree. Documents come out in decreasing score
//!   order and the search can stop at any time.
//! - [`topk_drb_and`] / [`topk_drb_or`]: walk per-word tf bitmaps to
//!   enumerate candidate documents, then keep the best k.
//! - [`Oracle`]: plain per-document term counting, used as ground truth.
//!
//! All engines order results by score descending, then document id
//! ascending, and drop zero-score documents.

mod bitmaps;
mod dr;
mod drb;
mod oracle;

use std::cmp::Ordering;

pub use bitmaps::{bitmap_from_tfs, build_bitmaps, tfs_from_bitmap, Bitmap, DrbConfig, WordBitmaps, DEFAULT_EPSILON};
pub use dr::{score_segment, topk_dr, DrSearch, Segment};
pub use drb::{topk_drb, topk_drb_and, topk_drb_or, AndIntersection, StepOutcome, Triplet};
pub use oracle::{topk_oracle, Oracle};

use crate::corpus::{tokenize, TokenKind};
use crate::wtbc::{CodePath, WtbcIndex};

/// Inverse document frequency, `ln(N / df)`.
pub fn idf(df: u64, n_docs: u64) -> f64 {
    (n_docs as f64 / df as f64).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Weighted conjunctive: every query word must occur.
    And,
    /// Bag of words.
    Or,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "and" => Ok(Mode::And),
            "or" => Ok(Mode::Or),
            other => Err(format!("unknown mode {other:?} (expected and|or)")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::And => "and",
            Mode::Or => "or",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    /// Distinct words in first-seen order.
    pub words: Vec<String>,
    pub mode: Mode,
    pub k: usize,
}

impl Query {
    pub fn new<I, S>(words: I, mode: Mode, k: usize) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for w in words {
            let w = w.into();
            if !out.contains(&w) {
                out.push(w);
            }
        }
        Query { words: out, mode, k }
    }

    /// Tokenizes `text` like a document and keeps its words.
    pub fn parse(text: &str, mode: Mode, k: usize) -> Self {
        Self::new(
            tokenize(text)
                .into_iter()
                .filter(|t| t.kind == TokenKind::Word)
                .map(|t| t.text),
            mode,
            k,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredDoc {
    pub doc: u64,
    pub score: f64,
}

/// Result order: higher score first, then smaller document id.
pub fn result_order(a: &ScoredDoc, b: &ScoredDoc) -> Ordering {
    b.score.total_cmp(&a.score).then(a.doc.cmp(&b.doc))
}

/// A query word resolved against an index.
#[derive(Debug, Clone)]
pub struct Term {
    pub id: u32,
    pub df: u64,
    pub freq: u64,
    pub idf: f64,
    pub path: CodePath,
}

/// Resolves query words in query order. Returns `None` when the query can
/// match nothing (an AND query with a word missing from the collection);
/// OR queries skip missing words.
pub fn resolve_terms(idx: &WtbcIndex, query: &Query) -> Option<Vec<Term>> {
    let mut terms = Vec::with_capacity(query.words.len());
    for w in &query.words {
        let found = idx.vocab().rank_of(w).and_then(|id| {
            let e = idx.vocab().get(id)?;
            Some(Term {
                id,
                df: e.df,
                freq: e.freq,
                idf: idf(e.df, idx.num_docs()),
                path: idx.path_of(id)?,
            })
        });
        match (found, query.mode) {
            (Some(t), _) => terms.push(t),
            (None, Mode::And) => return None,
            (None, Mode::Or) => {}
        }
    }
    Some(terms)
}

/// Sum of `tf * idf` over the terms, in term order.
pub(crate) fn tfidf(tfs: impl IntoIterator<Item = u64>, terms: &[Term]) -> f64 {
    let mut score = 0.0;
    for (tf, t) in tfs.into_iter().zip(terms) {
        score += tf as f64 * t.idf;
    }
    score
}

/// Keeps the best `k` documents under [`result_order`].
pub(crate) struct TopK {
    k: usize,
    heap: std::collections::BinaryHeap<Worst>,
}

/// Heap entry whose maximum is the worst-ranked document.
struct Worst(ScoredDoc);

impl PartialEq for Worst {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
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
        result_order(&self.0, &other.0)
    }
}

impl TopK {
    pub(crate) fn new(k: usize) -> Self {
        TopK {
            k,
            heap: std::collections::BinaryHeap::with_capacity(k + 1),
        }
    }

    pub(crate) fn push(&mut self, doc: ScoredDoc) {
        if self.k == 0 {
            return;
        }
        if self.heap.len() < self.k {
            self.heap.push(Worst(doc));
        } else if let Some(worst) = self.heap.peek() {
            if result_order(&doc, &worst.0) == Ordering::Less {
                self.heap.pop();
                self.heap.push(Worst(doc));
            }
        }
    }

    pub(crate) fn into_sorted(self) -> Vec<ScoredDoc> {
        self.heap.into_sorted_vec().into_iter().map(|w| w.0).collect()
    }
}
