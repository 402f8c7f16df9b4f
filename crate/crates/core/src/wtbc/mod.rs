//! Wavelet tree on bytecodes and the document index built on it.

mod index;
mod tree;

pub use index::{BuildOptions, WtbcIndex, DEFAULT_SNIPPET_WINDOW};
pub use tree::{CodePath, Node, WaveletTree};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Collection;
    use crate::scdc::Codeword;
    use rand::{Rng, SeedableRng};

    const B1: u8 = 0;
    const B2: u8 = 1;
    const B3: u8 = 2;
    const B4: u8 = 3;
    const B5: u8 = 4;

    /// The seven-word example with b1, b2 as stoppers and b3..b5 as
    /// continuers.
    fn fig1() -> (WaveletTree, Vec<(&'static str, Codeword)>) {
        let words: Vec<(&str, &[u8])> = vec![
            ("AS", &[B1]),
            ("NOT", &[B2]),
            ("MAKE", &[B3, B1]),
            ("BUT", &[B3, B4, B2]),
            ("EVERYTHING", &[B4, B1]),
            ("SIMPLE", &[B4, B2]),
            ("SIMPLER", &[B4, B5, B1]),
            ("POSSIBLE", &[B5, B1]),
        ];
        let codes: Vec<(&str, Codeword)> = words
            .iter()
            .map(|(w, c)| (*w, Codeword::from_slice(c).unwrap()))
            .collect();
        let text: Vec<u32> = "MAKE EVERYTHING AS SIMPLE AS POSSIBLE BUT NOT SIMPLER"
            .split(' ')
            .map(|w| codes.iter().position(|(x, _)| *x == w).unwrap() as u32)
            .collect();
        let cws: Vec<Codeword> = codes.iter().map(|(_, c)| *c).collect();
        (WaveletTree::build(2, &cws, &text, 4).unwrap(), codes)
    }

    #[test]
    fn fig1_layout_and_walkthroughs() {
        let (tree, codes) = fig1();
        assert_eq!(tree.len(), 9);
        assert_eq!(tree.root().as_bytes(), &[B3, B4, B1, B4, B1, B5, B3, B2, B4]);
        assert_eq!(tree.node(&[B4]).unwrap().as_bytes(), &[B1, B2, B5]);
        assert_eq!(tree.node(&[B3, B4]).unwrap().as_bytes(), &[B2]);
        assert_eq!(tree.root().rank(B4, 9).unwrap(), 3);
        assert_eq!(tree.node(&[B4]).unwrap().rank(B5, 3).unwrap(), 1);
        assert_eq!(tree.root().select(B3, 2).unwrap(), 7);
        assert_eq!(tree.node(&[B3]).unwrap().select(B4, 1).unwrap(), 2);

        let code = tree.codeword_at(9).unwrap();
        assert_eq!(code.as_bytes(), &[B4, B5, B1]);
        let word = codes.iter().find(|(_, c)| *c == code).unwrap().0;
        assert_eq!(word, "SIMPLER");

        let but = tree.resolve(&[B3, B4, B2]).unwrap();
        assert_eq!(tree.locate(&but, 1).unwrap(), 7);
        let as_ = tree.resolve(&[B1]).unwrap();
        assert_eq!(tree.count_prefix(&as_, 9).unwrap(), 2);
        assert_eq!(tree.count_prefix(&as_, 4).unwrap(), 1);
        assert_eq!(tree.frequency(&as_), 2);
    }

    #[test]
    fn fig1_sequential_decode() {
        let (tree, codes) = fig1();
        let mut words = Vec::new();
        tree.for_each_codeword(7, 9, |c| {
            words.push(codes.iter().find(|(_, x)| x.as_bytes() == c).unwrap().0);
            Ok(())
        })
        .unwrap();
        assert_eq!(words.join(" "), "BUT NOT SIMPLER");
    }

    #[test]
    fn fig1_as_an_index() {
        let text = "MAKE EVERYTHING AS SIMPLE AS POSSIBLE BUT NOT SIMPLER";
        let c = Collection::from_documents(&[text], "$").unwrap();
        let idx = WtbcIndex::build(&c, &BuildOptions::default()).unwrap();
        assert_eq!(idx.len(), 10);
        assert_eq!(idx.decode_at(9).unwrap(), "SIMPLER");
        assert_eq!(idx.locate("BUT", 1).unwrap(), 7);
        assert_eq!(idx.decode_range(7, 9).unwrap(), "BUT NOT SIMPLER");
        assert_eq!(idx.decode_range(1, 10).unwrap(), text);
        assert_eq!(idx.snippet("BUT", 1, 2).unwrap(), "AS POSSIBLE BUT NOT SIMPLER");
        assert_eq!(idx.snippet("BUT", 1, 20).unwrap(), text);
        assert_eq!(idx.count_range("AS", 1, 10).unwrap(), 2);
        assert_eq!(idx.doc_bounds(1).unwrap(), (0, 10));
    }

    #[test]
    fn one_word_document() {
        let c = Collection::from_documents(&["a"], "$").unwrap();
        let idx = WtbcIndex::build(&c, &BuildOptions::default()).unwrap();
        let a = idx.codeword(idx.word_id("a").unwrap());
        assert_eq!(idx.tree().root().as_bytes(), &[a[0], 0]);
        assert_eq!(idx.bounds().ends(), &[2]);
        assert_eq!(idx.decode_at(1).unwrap(), "a");
        assert_eq!(idx.locate("a", 1).unwrap(), 1);
        assert_eq!(idx.doc_of(2).unwrap(), 1);
    }

    #[test]
    fn errors() {
        let c = Collection::from_documents(&["a b", "b"], "$").unwrap();
        let idx = WtbcIndex::build(&c, &BuildOptions::default()).unwrap();
        use crate::error::Error;
        assert!(matches!(idx.decode_at(0), Err(Error::OutOfRange { .. })));
        assert!(matches!(idx.decode_at(6), Err(Error::OutOfRange { .. })));
        assert!(matches!(idx.locate("zzz", 1), Err(Error::UnknownWord(_))));
        assert!(matches!(idx.locate("a", 2), Err(Error::NotFound { .. })));
        assert!(matches!(idx.count_prefix("a", 6), Err(Error::OutOfRange { .. })));
        assert!(matches!(idx.doc_bounds(3), Err(Error::OutOfRange { .. })));
        assert!(matches!(idx.decode_range(3, 2), Err(Error::OutOfRange { .. })));
        assert_eq!(idx.count_prefix("a", 0).unwrap(), 0);
        assert_eq!(idx.count_range("a", 4, 5).unwrap(), 0);
    }

    #[test]
    fn tree_rejects_inconsistent_nodes() {
        use crate::rankselect::ByteSequence;
        let seq = |d: &[u8]| ByteSequence::new(d.to_vec()).unwrap();
        assert!(WaveletTree::from_nodes(2, vec![(vec![], seq(&[0, 1]))]).is_ok());
        // continuer in root without child
        assert!(WaveletTree::from_nodes(2, vec![(vec![], seq(&[0, 5]))]).is_err());
        // child length mismatch
        assert!(WaveletTree::from_nodes(2, vec![(vec![], seq(&[5])), (vec![5], seq(&[0, 0]))]).is_err());
        // child path containing a stopper
        assert!(WaveletTree::from_nodes(2, vec![(vec![], seq(&[0])), (vec![1], seq(&[]))]).is_err());
        // out of order
        assert!(WaveletTree::from_nodes(
            2,
            vec![(vec![], seq(&[5, 6])), (vec![6], seq(&[0])), (vec![5], seq(&[0]))]
        )
        .is_err());
        assert!(WaveletTree::from_nodes(2, vec![]).is_err());
    }

    fn random_docs(rng: &mut impl Rng, ndocs: usize, vocab: usize) -> Vec<String> {
        (0..ndocs)
            .map(|_| {
                let len = rng.random_range(0..30);
                let mut d = String::new();
                for i in 0..len {
                    if i > 0 {
                        d.push_str(if rng.random_bool(0.9) { " " } else { ", " });
                    }
                    let w = (rng.random::<f64>().powi(3) * vocab as f64) as usize;
                    d.push_str(&format!("w{w}"));
                }
                d
            })
            .collect()
    }

    #[test]
    fn random_corpus_matches_scan() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(99);
        for round in 0..5 {
            // large vocabularies force multi-byte codewords
            let docs = random_docs(&mut rng, 200, if round % 2 == 0 { 50 } else { 3000 });
            let c = Collection::from_documents(&docs, "$").unwrap();
            let idx = WtbcIndex::build(&c, &BuildOptions { block_size: 37, ..Default::default() }).unwrap();
            let n = idx.len();

            // node byte multisets vs. direct recomputation from codewords
            let mut expected: std::collections::BTreeMap<Vec<u8>, Vec<u8>> = Default::default();
            for &t in &c.text {
                let code = idx.codeword(t);
                for l in 0..code.len() {
                    expected.entry(code[..l].to_vec()).or_default().push(code[l]);
                }
            }
            assert_eq!(idx.tree().nodes().len(), expected.len());
            for node in idx.tree().nodes() {
                assert_eq!(node.bytes().as_bytes(), &expected[node.path()][..]);
            }
            let total: usize = c.text.iter().map(|&t| idx.codeword(t).len()).sum();
            assert_eq!(idx.tree().byte_len(), total);

            // per-position decode and the locate/count identity
            let mut seen = std::collections::HashMap::<u32, u64>::new();
            for p in 1..=n {
                let t = c.text[p as usize - 1];
                assert_eq!(idx.token_id_at(p).unwrap(), t);
                let j = seen.entry(t).or_default();
                *j += 1;
                assert_eq!(idx.count_prefix_id(t, p).unwrap(), *j);
                assert_eq!(idx.locate_id(t, *j).unwrap(), p);
            }
            assert_eq!(idx.token_ids(1, n).unwrap(), c.text);
            assert_eq!(idx.decode_range(1, n).unwrap(), docs.concat());
            for (d, doc) in docs.iter().enumerate() {
                assert_eq!(&idx.document(d as u64 + 1).unwrap(), doc);
            }
            for e in c.vocab.entries().iter().skip(1) {
                assert_eq!(idx.count_prefix(&e.word, n).unwrap(), e.freq);
            }

            // random ranges vs. scan
            for _ in 0..500 {
                let a = rng.random_range(1..=n);
                let b = rng.random_range(a..=n);
                let id = c.text[rng.random_range(0..n as usize)];
                let scan = c.text[a as usize - 1..b as usize].iter().filter(|&&x| x == id).count();
                let w = &c.vocab.get(id).unwrap().word;
                if id != 0 {
                    assert_eq!(idx.count_range(w, a, b).unwrap(), scan as u64);
                }
                let ids = idx.token_ids(a, b).unwrap();
                assert_eq!(&ids[..], &c.text[a as usize - 1..b as usize]);
            }

            // doc_of against a scan of the token stream
            let mut doc = 1;
            for p in 1..=n {
                assert_eq!(idx.doc_of(p).unwrap(), doc);
                if c.text[p as usize - 1] == 0 {
                    let (s, e) = idx.doc_bounds(doc).unwrap();
                    assert_eq!(e, p);
                    assert!(e > s);
                    assert_eq!(idx.bounds().doc_rank(p), doc);
                    assert_eq!(idx.tree().root().rank(0, p as usize).unwrap() as u64, doc);
                    assert_eq!(idx.tree().root().select(0, doc as usize).unwrap() as u64, p);
                    doc += 1;
                }
            }
        }
    }
}
