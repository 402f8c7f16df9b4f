use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{resolve_terms, tfidf, Mode, Query, ScoredDoc, Term};
use crate::error::Result;
use crate::wtbc::WtbcIndex;

/// A run of consecutive whole documents, `[start_pos, end_pos]` in the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start_pos: u64,
    pub end_pos: u64,
    pub score: f64,
    pub ndocs: u64,
    pub first_doc: u64,
    /// Occurrences of each query term inside the segment.
    pub counts: Vec<u64>,
    /// Occurrences of each query term before `start_pos`.
    before: Vec<u64>,
}

struct Queued(Segment);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    // max-heap: higher score first, then the segment further left
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .score
            .total_cmp(&other.0.score)
            .then(other.0.start_pos.cmp(&self.0.start_pos))
    }
}

/// Best-first search over document segments.
///
/// Starting from the whole collection, the highest-scoring segment is
/// repeatedly pulled and split at the document boundary nearest its middle.
/// Since tf-idf of a concatenation is never below that of its parts, a
/// single-document segment at the head of the queue is the next best
/// document. Iterating yields documents in result order.
pub struct DrSearch<'a> {
    idx: &'a WtbcIndex,
    terms: Vec<Term>,
    mode: Mode,
    queue: BinaryHeap<Queued>,
}

impl<'a> DrSearch<'a> {
    pub fn new(idx: &'a WtbcIndex, query: &Query) -> Result<Self> {
        let mut search = DrSearch {
            idx,
            terms: Vec::new(),
            mode: query.mode,
            queue: BinaryHeap::new(),
        };
        let Some(terms) = resolve_terms(idx, query) else {
            return Ok(search);
        };
        search.terms = terms;
        let root = search.root_segment();
        search.offer(root);
        Ok(search)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// The segment covering every document.
    pub fn root_segment(&self) -> Segment {
        let counts: Vec<u64> = self
            .terms
            .iter()
            .map(|t| self.idx.tree().frequency(&t.path) as u64)
            .collect();
        Segment {
            start_pos: 1,
            end_pos: self.idx.len(),
            score: tfidf(counts.iter().copied(), &self.terms),
            ndocs: self.idx.num_docs(),
            first_doc: 1,
            counts,
            before: vec![0; self.terms.len()],
        }
    }

    fn worth_exploring(&self, seg: &Segment) -> bool {
        if self.terms.is_empty() || seg.score <= 0.0 {
            return false;
        }
        self.mode == Mode::Or || seg.counts.iter().all(|&c| c > 0)
    }

    fn offer(&mut self, seg: Segment) {
        if self.worth_exploring(&seg) {
            self.queue.push(Queued(seg));
        }
    }

    /// Splits a multi-document segment at the boundary closest to its
    /// positional middle, clamped so both halves keep a document. The left
    /// half is counted on the tree; the right half is the difference.
    pub fn split(&self, seg: &Segment) -> Result<(Segment, Segment)> {
        assert!(seg.ndocs >= 2, "cannot split a single-document segment");
        let bounds = self.idx.bounds();
        let mid = (seg.start_pos + seg.end_pos) / 2;
        let last_split = seg.first_doc + seg.ndocs - 2;
        let d = bounds.doc_rank(mid).clamp(seg.first_doc, last_split);
        let p = bounds.doc_select(d)?;

        let mut left_counts = Vec::with_capacity(self.terms.len());
        for (t, &before) in self.terms.iter().zip(&seg.before) {
            left_counts.push(self.idx.tree().count_prefix(&t.path, p as usize)? as u64 - before);
        }
        let right_counts: Vec<u64> = seg.counts.iter().zip(&left_counts).map(|(a, b)| a - b).collect();
        let right_before: Vec<u64> = seg.before.iter().zip(&left_counts).map(|(a, b)| a + b).collect();
        let left_ndocs = d - seg.first_doc + 1;

        let left = Segment {
            start_pos: seg.start_pos,
            end_pos: p,
            score: tfidf(left_counts.iter().copied(), &self.terms),
            ndocs: left_ndocs,
            first_doc: seg.first_doc,
            counts: left_counts,
            before: seg.before.clone(),
        };
        let right = Segment {
            start_pos: p + 1,
            end_pos: seg.end_pos,
            score: tfidf(right_counts.iter().copied(), &self.terms),
            ndocs: seg.ndocs - left_ndocs,
            first_doc: d + 1,
            counts: right_counts,
            before: right_before,
        };
        Ok((left, right))
    }

    fn advance(&mut self) -> Result<Option<ScoredDoc>> {
        while let Some(Queued(seg)) = self.queue.pop() {
            if seg.ndocs == 1 {
                return Ok(Some(ScoredDoc {
                    doc: seg.first_doc,
                    score: seg.score,
                }));
            }
            let (left, right) = self.split(&seg)?;
            self.offer(left);
            self.offer(right);
        }
        Ok(None)
    }
}

impl Iterator for DrSearch<'_> {
    type Item = Result<ScoredDoc>;

    fn next(&mut self) -> Option<Self::Item> {
        self.advance().transpose()
    }
}

/// The `query.k` best documents by best-first segment splitting.
pub fn topk_dr(idx: &WtbcIndex, query: &Query) -> Result<Vec<ScoredDoc>> {
    DrSearch::new(idx, query)?.take(query.k).collect()
}

/// tf-idf of positions `[start, end]` seen as one document. Words missing
/// from the collection contribute nothing.
pub fn score_segment(idx: &WtbcIndex, query: &Query, start: u64, end: u64) -> Result<f64> {
    let or = Query {
        mode: Mode::Or,
        ..query.clone()
    };
    let terms = resolve_terms(idx, &or).unwrap_or_default();
    let mut tfs = Vec::with_capacity(terms.len());
    for t in &terms {
        let hi = idx.tree().count_prefix(&t.path, end as usize)?;
        let lo = idx.tree().count_prefix(&t.path, start as usize - 1)?;
        tfs.push((hi - lo) as u64);
    }
    Ok(tfidf(tfs, &terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Collection;
    use crate::wtbc::BuildOptions;
    use rand::{Rng, SeedableRng};

    fn index(docs: &[&str]) -> WtbcIndex {
        let c = Collection::from_documents(docs, "$").unwrap();
        WtbcIndex::build(&c, &BuildOptions::default()).unwrap()
    }

    #[test]
    fn k_zero_is_empty() {
        let idx = index(&["x y", "x"]);
        assert!(topk_dr(&idx, &Query::new(["y"], Mode::Or, 0)).unwrap().is_empty());
    }

    #[test]
    fn zero_idf_word_yields_nothing() {
        let idx = index(&["a b", "a a a"]);
        assert!(topk_dr(&idx, &Query::new(["a"], Mode::Or, 2)).unwrap().is_empty());
    }

    #[test]
    fn two_document_conjunction() {
        let idx = index(&["x y", "x"]);
        let got = topk_dr(&idx, &Query::new(["x", "y"], Mode::And, 5)).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].doc, 1);
        assert!((got[0].score - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(topk_dr(&idx, &Query::new(["x", "nope"], Mode::And, 5)).unwrap().is_empty());
        assert_eq!(topk_dr(&idx, &Query::new(["y", "nope"], Mode::Or, 5)).unwrap().len(), 1);
    }

    #[test]
    fn two_document_split_uses_the_only_boundary() {
        let idx = index(&["p p p p p p q", "q"]);
        let search = DrSearch::new(&idx, &Query::new(["p", "q"], Mode::Or, 1)).unwrap();
        let root = search.root_segment();
        let (l, r) = search.split(&root).unwrap();
        assert_eq!((l.start_pos, l.end_pos, l.ndocs, l.first_doc), (1, 8, 1, 1));
        assert_eq!((r.start_pos, r.end_pos, r.ndocs, r.first_doc), (9, 10, 1, 2));
    }

    #[test]
    fn splits_partition_and_add_up() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let docs: Vec<String> = (0..60)
            .map(|_| {
                (0..rng.random_range(0..12))
                    .map(|_| format!("t{}", rng.random_range(0..15)))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        let refs: Vec<&str> = docs.iter().map(|s| s.as_str()).collect();
        let idx = index(&refs);
        let query = Query::new(["t1", "t4", "t9", "t14"], Mode::Or, 10);
        let search = DrSearch::new(&idx, &query).unwrap();
        let mut stack = vec![search.root_segment()];
        let mut leaves = 0;
        while let Some(seg) = stack.pop() {
            let direct = score_segment(&idx, &query, seg.start_pos, seg.end_pos).unwrap();
            assert!((seg.score - direct).abs() <= 1e-9 * direct.abs().max(1.0));
            if seg.ndocs == 1 {
                leaves += 1;
                continue;
            }
            let (l, r) = search.split(&seg).unwrap();
            assert_eq!(l.ndocs + r.ndocs, seg.ndocs);
            assert_eq!(l.end_pos + 1, r.start_pos);
            assert!(l.start_pos <= l.end_pos && r.start_pos <= r.end_pos);
            assert!((l.score + r.score - seg.score).abs() <= 1e-9 * seg.score.max(1.0));
            stack.push(l);
            stack.push(r);
        }
        assert_eq!(leaves, 60);
    }
}
