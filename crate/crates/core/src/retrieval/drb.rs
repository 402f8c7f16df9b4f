use std::collections::HashMap;

use super::{resolve_terms, result_order, tfidf, Bitmap, Mode, Query, ScoredDoc, Term, TopK, WordBitmaps};
use crate::error::{Error, Result};
use crate::wtbc::WtbcIndex;

/// Progress of one query word through its bitmap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triplet {
    pub word: u32,
    /// Documents containing the word that are still unprocessed.
    pub ndocs: u64,
    /// Bitmap position (occurrence ordinal) opening the next such document.
    pub i: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    Accepted(ScoredDoc),
    Rejected { doc: u64 },
    Done,
}

/// Drops words at or below the bitmap threshold and pairs the rest with
/// their bitmaps.
fn bitmap_terms<'a>(
    idx: &'a WtbcIndex,
    bitmaps: &'a WordBitmaps,
    query: &Query,
) -> Result<Option<(Vec<Term>, Vec<Bitmap<'a>>)>> {
    let Some(terms) = resolve_terms(idx, query) else {
        return Ok(None);
    };
    let terms: Vec<Term> = terms.into_iter().filter(|t| t.idf > bitmaps.epsilon()).collect();
    let maps = terms
        .iter()
        .map(|t| bitmaps.get(t.id).ok_or(Error::MissingBitmaps))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some((terms, maps)))
}

/// Document-at-a-time intersection driven by the word with the fewest
/// unprocessed documents.
pub struct AndIntersection<'a> {
    idx: &'a WtbcIndex,
    terms: Vec<Term>,
    maps: Vec<Bitmap<'a>>,
    triplets: Vec<Triplet>,
    done: bool,
}

impl<'a> AndIntersection<'a> {
    pub fn new(idx: &'a WtbcIndex, bitmaps: &'a WordBitmaps, query: &Query) -> Result<Self> {
        let (terms, maps) = bitmap_terms(idx, bitmaps, query)?.unwrap_or_default();
        let triplets: Vec<Triplet> = terms
            .iter()
            .map(|t| Triplet {
                word: t.id,
                ndocs: t.df,
                i: 1,
            })
            .collect();
        Ok(AndIntersection {
            idx,
            done: terms.is_empty(),
            terms,
            maps,
            triplets,
        })
    }

    /// Current triplets, in query order.
    pub fn triplets(&self) -> &[Triplet] {
        &self.triplets
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Processes the next document of the word with the fewest documents
    /// left, then advances every word past that document.
    pub fn step(&mut self) -> Result<StepOutcome> {
        if self.done {
            return Ok(StepOutcome::Done);
        }
        let m = (0..self.triplets.len())
            .min_by_key(|&x| (self.triplets[x].ndocs, self.triplets[x].word))
            .expect("non-empty");
        let lead = self.triplets[m];
        let tree = self.idx.tree();
        let p = tree.locate(&self.terms[m].path, lead.i as usize)? as u64;
        let d = self.idx.doc_of(p)?;
        let (s, e) = self.idx.doc_bounds(d)?;

        let mut tfs = Vec::with_capacity(self.terms.len());
        let mut upto_e = Vec::with_capacity(self.terms.len());
        for (x, t) in self.terms.iter().enumerate() {
            if x == m {
                let tf = (self.maps[m].next1(lead.i as usize)? as u64) - lead.i;
                tfs.push(tf);
                upto_e.push(lead.i + tf - 1);
            } else {
                let hi = tree.count_prefix(&t.path, e as usize)? as u64;
                let lo = tree.count_prefix(&t.path, s as usize)? as u64;
                tfs.push(hi - lo);
                upto_e.push(hi);
            }
        }

        for ((trip, t), (&c, bm)) in self
            .triplets
            .iter_mut()
            .zip(&self.terms)
            .zip(upto_e.iter().zip(&self.maps))
        {
            trip.i = c + 1;
            trip.ndocs = t.df - bm.rank1(c as usize)? as u64;
            if trip.ndocs == 0 {
                self.done = true;
            }
        }

        if tfs.iter().all(|&tf| tf > 0) {
            let score = tfidf(tfs, &self.terms);
            if score > 0.0 {
                return Ok(StepOutcome::Accepted(ScoredDoc { doc: d, score }));
            }
        }
        Ok(StepOutcome::Rejected { doc: d })
    }
}

/// Top-k weighted conjunctive query using word bitmaps.
pub fn topk_drb_and(idx: &WtbcIndex, bitmaps: &WordBitmaps, query: &Query) -> Result<Vec<ScoredDoc>> {
    let mut it = AndIntersection::new(idx, bitmaps, query)?;
    let mut top = TopK::new(query.k);
    loop {
        match it.step()? {
            StepOutcome::Accepted(doc) => top.push(doc),
            StepOutcome::Rejected { .. } => {}
            StepOutcome::Done => break,
        }
    }
    Ok(top.into_sorted())
}

/// Top-k bag-of-words query: every document of every query word is
/// visited through the ones of its bitmap and scores are accumulated.
pub fn topk_drb_or(idx: &WtbcIndex, bitmaps: &WordBitmaps, query: &Query) -> Result<Vec<ScoredDoc>> {
    let Some((terms, maps)) = bitmap_terms(idx, bitmaps, query)? else {
        return Ok(Vec::new());
    };
    let mut acc: HashMap<u64, f64> = HashMap::new();
    for (t, bm) in terms.iter().zip(&maps) {
        let mut p = 1usize;
        while p <= bm.len() {
            let pos = idx.tree().locate(&t.path, p)? as u64;
            let doc = idx.doc_of(pos)?;
            let next = bm.next1(p)?;
            *acc.entry(doc).or_insert(0.0) += (next - p) as u64 as f64 * t.idf;
            p = next;
        }
    }
    let mut out: Vec<ScoredDoc> = acc
        .into_iter()
        .filter(|&(_, score)| score > 0.0)
        .map(|(doc, score)| ScoredDoc { doc, score })
        .collect();
    out.sort_by(result_order);
    out.truncate(query.k);
    Ok(out)
}

/// Dispatches on the query mode. Fails if the index has no bitmaps.
pub fn topk_drb(idx: &WtbcIndex, query: &Query) -> Result<Vec<ScoredDoc>> {
    let bitmaps = idx.bitmaps().ok_or(Error::MissingBitmaps)?;
    match query.mode {
        Mode::And => topk_drb_and(idx, bitmaps, query),
        Mode::Or => topk_drb_or(idx, bitmaps, query),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Collection;
    use crate::retrieval::DrbConfig;
    use crate::wtbc::BuildOptions;

    fn index(docs: &[&str], epsilon: f64) -> WtbcIndex {
        let c = Collection::from_documents(docs, "$").unwrap();
        WtbcIndex::build(
            &c,
            &BuildOptions {
                bitmaps: Some(DrbConfig { epsilon }),
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn single_word_or() {
        let idx = index(&["a b b", "c", "b", "a"], 0.0);
        let got = topk_drb(&idx, &Query::new(["b"], Mode::Or, 10)).unwrap();
        let idf = (4.0f64 / 2.0).ln();
        assert_eq!(
            got,
            vec![ScoredDoc { doc: 1, score: 2.0 * idf }, ScoredDoc { doc: 3, score: idf }]
        );
    }

    #[test]
    fn disjoint_words_or() {
        let idx = index(&["a", "b", "a", "c"], 0.0);
        let got = topk_drb(&idx, &Query::new(["a", "b"], Mode::Or, 10)).unwrap();
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn and_rejects_and_terminates() {
        let idx = index(&["a b", "a", "b", "a b b", "c"], 0.0);
        let bms = idx.bitmaps().unwrap();
        let q = Query::new(["a", "b"], Mode::And, 10);
        let mut it = AndIntersection::new(&idx, bms, &q).unwrap();
        let mut outcomes = Vec::new();
        loop {
            let o = it.step().unwrap();
            if o == StepOutcome::Done {
                break;
            }
            outcomes.push(o);
        }
        let accepted: Vec<u64> = outcomes
            .iter()
            .filter_map(|o| match o {
                StepOutcome::Accepted(d) => Some(d.doc),
                _ => None,
            })
            .collect();
        assert_eq!(accepted, vec![1, 4]);
        assert!(topk_drb(&idx, &Query::new(["a", "zz"], Mode::And, 3)).unwrap().is_empty());
    }

    #[test]
    fn missing_bitmaps_are_reported() {
        let c = Collection::from_documents(&["a", "b"], "$").unwrap();
        let idx = WtbcIndex::build(&c, &BuildOptions::default()).unwrap();
        assert!(matches!(
            topk_drb(&idx, &Query::new(["a"], Mode::Or, 1)),
            Err(Error::MissingBitmaps)
        ));
    }

    #[test]
    fn low_idf_words_are_dropped() {
        // "a" is everywhere (idf 0), "b" is rare
        let idx = index(&["a b", "a", "a"], 1e-6);
        let got = topk_drb(&idx, &Query::new(["a", "b"], Mode::And, 3)).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].doc, 1);
        assert!(topk_drb(&idx, &Query::new(["a"], Mode::And, 3)).unwrap().is_empty());
    }
}
