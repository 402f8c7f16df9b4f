use std::collections::HashMap;

use super::{Mode, Query, ScoredDoc};
use crate::corpus::tokenize;

/// Brute-force scorer over the raw documents. Shares nothing with the index
/// beyond the tokenizer.
#[derive(Debug, Clone)]
pub struct Oracle {
    n_docs: u64,
    /// word -> per-document tf, in document order
    postings: HashMap<String, Vec<(u64, u64)>>,
}

impl Oracle {
    pub fn new<S: AsRef<str>>(docs: &[S]) -> Self {
        let mut postings: HashMap<String, Vec<(u64, u64)>> = HashMap::new();
        for (i, doc) in docs.iter().enumerate() {
            let d = i as u64 + 1;
            let mut tf: HashMap<&str, u64> = HashMap::new();
            for tok in tokenize(doc.as_ref()) {
                *tf.entry(tok.text).or_default() += 1;
            }
            for (w, c) in tf {
                postings.entry(w.to_owned()).or_default().push((d, c));
            }
        }
        Oracle {
            n_docs: docs.len() as u64,
            postings,
        }
    }

    pub fn num_docs(&self) -> u64 {
        self.n_docs
    }

    /// Term frequency of `word` in every document (1-based ids).
    fn tf_table(&self, word: &str) -> Option<Vec<u64>> {
        let list = self.postings.get(word)?;
        let mut tf = vec![0u64; self.n_docs as usize + 1];
        for &(d, c) in list {
            tf[d as usize] = c;
        }
        Some(tf)
    }

    pub fn topk(&self, query: &Query) -> Vec<ScoredDoc> {
        let mut tables = Vec::new();
        let mut idfs = Vec::new();
        for w in &query.words {
            match self.tf_table(w) {
                Some(t) => {
                    let df = t.iter().filter(|&&c| c > 0).count() as f64;
                    idfs.push((self.n_docs as f64 / df).ln());
                    tables.push(t);
                }
                None if query.mode == Mode::And => return Vec::new(),
                None => {}
            }
        }
        if tables.is_empty() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for d in 1..=self.n_docs as usize {
            if query.mode == Mode::And && tables.iter().any(|t| t[d] == 0) {
                continue;
            }
            let mut score = 0.0;
            for (t, &idf) in tables.iter().zip(&idfs) {
                score += t[d] as f64 * idf;
            }
            if score > 0.0 {
                out.push(ScoredDoc {
                    doc: d as u64,
                    score,
                });
            }
        }
        out.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.doc.cmp(&b.doc)));
        out.truncate(query.k);
        out
    }
}

/// One-shot oracle query.
pub fn topk_oracle<S: AsRef<str>>(docs: &[S], query: &Query) -> Vec<ScoredDoc> {
    Oracle::new(docs).topk(query)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_conjunction() {
        let got = topk_oracle(&["x y", "x"], &Query::new(["x", "y"], Mode::And, 10));
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].doc, 1);
        assert_eq!(got[0].score, 0.0 + 2f64.ln());
    }

    #[test]
    fn unknown_words() {
        let docs = ["x y", "x"];
        assert!(topk_oracle(&docs, &Query::new(["nope"], Mode::Or, 5)).is_empty());
        assert!(topk_oracle(&docs, &Query::new(["y", "nope"], Mode::And, 5)).is_empty());
        assert_eq!(topk_oracle(&docs, &Query::new(["y", "nope"], Mode::Or, 5)).len(), 1);
    }

    #[test]
    fn truncation_is_a_prefix() {
        let docs: Vec<String> = (0..40).map(|i| "q ".repeat(i % 7 + 1) + if i % 3 == 0 { "r" } else { "s" }).collect();
        let o = Oracle::new(&docs);
        let all = o.topk(&Query::new(["q", "r"], Mode::Or, 40));
        let top = o.topk(&Query::new(["q", "r"], Mode::Or, 10));
        assert_eq!(&all[..10], &top[..]);
    }
}
