use crate::corpus::{detokenize_into, Collection, CollectionStats, Token, Vocabulary, DOC_END_RANK};
use crate::error::{Error, Result};
use crate::rankselect::{DocBoundaries, DEFAULT_BLOCK_SIZE};
use crate::retrieval::{build_bitmaps, DrbConfig, WordBitmaps};
use crate::scdc::{self, Codeword, ScdcParams};

use super::tree::{CodePath, WaveletTree};

/// Default number of tokens shown on each side of a hit.
pub const DEFAULT_SNIPPET_WINDOW: usize = 10;

#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Bytemap counter sampling period.
    pub block_size: usize,
    /// Leave the sentinel's frequency out when choosing (s, c).
    pub exclude_sentinel_from_optimization: bool,
    /// Build per-word tf bitmaps for words whose idf exceeds this threshold.
    pub bitmaps: Option<DrbConfig>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            block_size: DEFAULT_BLOCK_SIZE,
            exclude_sentinel_from_optimization: false,
            bitmaps: None,
        }
    }
}

/// The complete self-index: dense-coded text reorganized as a wavelet tree
/// on bytecodes, plus the vocabulary and document boundaries.
#[derive(Debug, Clone)]
pub struct WtbcIndex {
    pub(crate) params: ScdcParams,
    pub(crate) vocab: Vocabulary,
    pub(crate) stats: CollectionStats,
    pub(crate) tree: WaveletTree,
    pub(crate) bounds: DocBoundaries,
    pub(crate) bitmaps: Option<WordBitmaps>,
    pub(crate) original_size: u64,
}

impl WtbcIndex {
    pub fn build(collection: &Collection, options: &BuildOptions) -> Result<Self> {
        let mut freqs = collection.vocab.freqs();
        if options.exclude_sentinel_from_optimization {
            freqs[DOC_END_RANK as usize] = 0;
        }
        let params = scdc::optimize_sc(&freqs)?;
        let codes = (0..freqs.len() as u64)
            .map(|r| scdc::encode_rank(r, params))
            .collect::<Result<Vec<Codeword>>>()?;
        let tree = WaveletTree::build(params.s(), &codes, &collection.text, options.block_size)?;
        let ends = collection
            .text
            .iter()
            .enumerate()
            .filter(|(_, &t)| t == DOC_END_RANK)
            .map(|(i, _)| i as u64 + 1)
            .collect();
        let mut index = WtbcIndex {
            params,
            vocab: collection.vocab.clone(),
            stats: collection.stats,
            tree,
            bounds: DocBoundaries::new(ends)?,
            bitmaps: None,
            original_size: collection.original_size,
        };
        if let Some(cfg) = &options.bitmaps {
            index.bitmaps = Some(build_bitmaps(&index, cfg)?);
        }
        Ok(index)
    }

    pub fn params(&self) -> ScdcParams {
        self.params
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn stats(&self) -> CollectionStats {
        self.stats
    }

    pub fn tree(&self) -> &WaveletTree {
        &self.tree
    }

    pub fn bounds(&self) -> &DocBoundaries {
        &self.bounds
    }

    pub fn bitmaps(&self) -> Option<&WordBitmaps> {
        self.bitmaps.as_ref()
    }

    /// Attaches (or replaces) word bitmaps.
    pub fn set_bitmaps(&mut self, bitmaps: Option<WordBitmaps>) {
        self.bitmaps = bitmaps;
    }

    pub fn original_size(&self) -> u64 {
        self.original_size
    }

    /// Number of tokens n.
    pub fn len(&self) -> u64 {
        self.stats.tokens
    }

    pub fn is_empty(&self) -> bool {
        self.stats.tokens == 0
    }

    pub fn num_docs(&self) -> u64 {
        self.stats.docs
    }

    pub fn codeword(&self, rank: u32) -> Codeword {
        scdc::encode_rank(rank as u64, self.params).expect("vocabulary fits the code")
    }

    /// Rank of `word`, or [`Error::UnknownWord`].
    pub fn word_id(&self, word: &str) -> Result<u32> {
        self.vocab
            .rank_of(word)
            .ok_or_else(|| Error::UnknownWord(word.to_owned()))
    }

    /// Node chain for word rank `id`; `None` if it never occurs.
    pub fn path_of(&self, id: u32) -> Option<CodePath> {
        self.tree.resolve(&self.codeword(id))
    }

    fn path_or_err(&self, id: u32) -> Result<CodePath> {
        self.path_of(id).ok_or(Error::NotFound {
            ordinal: 1,
            available: 0,
        })
    }

    fn check_pos(&self, p: u64) -> Result<()> {
        if p == 0 || p > self.len() {
            return Err(Error::out_of_range(p, 1, self.len()));
        }
        Ok(())
    }

    fn rank_from_code(&self, code: &[u8]) -> Result<u32> {
        let rank = scdc::rank_of_codeword(code, self.params);
        if rank >= self.vocab.len() as u64 {
            return Err(Error::CorruptStream("codeword outside the vocabulary"));
        }
        Ok(rank as u32)
    }

    /// Vocabulary rank of the token at position `p`.
    pub fn token_id_at(&self, p: u64) -> Result<u32> {
        self.check_pos(p)?;
        let code = self.tree.codeword_at(p as usize)?;
        self.rank_from_code(&code)
    }

    /// Word (or separator, or sentinel glyph) at position `p`.
    pub fn decode_at(&self, p: u64) -> Result<&str> {
        let id = self.token_id_at(p)?;
        Ok(&self.vocab.get(id).expect("checked").word)
    }

    /// Vocabulary ranks of positions `a..=b`, decoded sequentially.
    pub fn token_ids(&self, a: u64, b: u64) -> Result<Vec<u32>> {
        self.check_range(a, b)?;
        let mut out = Vec::with_capacity((b - a + 1) as usize);
        self.tree.for_each_codeword(a as usize, b as usize, |code| {
            out.push(self.rank_from_code(code)?);
            Ok(())
        })?;
        Ok(out)
    }

    fn check_range(&self, a: u64, b: u64) -> Result<()> {
        self.check_pos(a)?;
        self.check_pos(b)?;
        if a > b {
            return Err(Error::out_of_range(a, 1, b));
        }
        Ok(())
    }

    /// Text of positions `a..=b`; document ends render as nothing, so the
    /// full range reproduces the concatenated documents.
    pub fn decode_range(&self, a: u64, b: u64) -> Result<String> {
        self.decode_range_with(a, b, "")
    }

    /// Like [`decode_range`](Self::decode_range) but renders each document
    /// end as `doc_end`.
    pub fn decode_range_with(&self, a: u64, b: u64, doc_end: &str) -> Result<String> {
        let ids = self.token_ids(a, b)?;
        let mut out = String::new();
        detokenize_into(
            &mut out,
            ids.iter().map(|&id| self.vocab.token(id).expect("checked")),
            Some(doc_end),
        );
        Ok(out)
    }

    pub fn tokens(&self, ids: &[u32]) -> Vec<Token<'_>> {
        ids.iter().filter_map(|&id| self.vocab.token(id)).collect()
    }

    /// Original text of document `d`.
    pub fn document(&self, d: u64) -> Result<String> {
        let (s, e) = self.doc_bounds(d)?;
        if e - s == 1 {
            return Ok(String::new());
        }
        self.decode_range(s + 1, e - 1)
    }

    /// Position of the `j`-th occurrence of `word`.
    pub fn locate(&self, word: &str, j: u64) -> Result<u64> {
        let id = self.word_id(word)?;
        self.locate_id(id, j)
    }

    pub fn locate_id(&self, id: u32, j: u64) -> Result<u64> {
        let path = self.path_or_err(id)?;
        Ok(self.tree.locate(&path, j as usize)? as u64)
    }

    /// Occurrences of `word` in positions `1..=p`.
    pub fn count_prefix(&self, word: &str, p: u64) -> Result<u64> {
        let id = self.word_id(word)?;
        self.count_prefix_id(id, p)
    }

    pub fn count_prefix_id(&self, id: u32, p: u64) -> Result<u64> {
        if p > self.len() {
            return Err(Error::out_of_range(p, 0, self.len()));
        }
        match self.path_of(id) {
            Some(path) => Ok(self.tree.count_prefix(&path, p as usize)? as u64),
            None => Ok(0),
        }
    }

    /// Occurrences of `word` in positions `a..=b`.
    pub fn count_range(&self, word: &str, a: u64, b: u64) -> Result<u64> {
        self.check_range(a, b)?;
        let id = self.word_id(word)?;
        Ok(self.count_prefix_id(id, b)? - self.count_prefix_id(id, a - 1)?)
    }

    /// Document containing position `p`. A document-end position belongs
    /// to the document it terminates.
    pub fn doc_of(&self, p: u64) -> Result<u64> {
        self.check_pos(p)?;
        Ok(1 + self.bounds.doc_rank(p - 1))
    }

    /// `(s, e)` for document `d`: `s` is the previous document's end (0 for
    /// the first) and `e` this document's end. Its words lie in `(s, e)`.
    pub fn doc_bounds(&self, d: u64) -> Result<(u64, u64)> {
        if d == 0 || d > self.num_docs() {
            return Err(Error::out_of_range(d, 1, self.num_docs()));
        }
        Ok((self.bounds.doc_select(d - 1)?, self.bounds.doc_select(d)?))
    }

    /// Text around the `j`-th occurrence of `word`: up to `window` tokens on
    /// each side, clipped to the containing document.
    pub fn snippet(&self, word: &str, j: u64, window: u64) -> Result<String> {
        let p = self.locate(word, j)?;
        let (s, e) = self.doc_bounds(self.doc_of(p)?)?;
        let a = p.saturating_sub(window).max(s + 1);
        let b = (p + window).min(e - 1);
        self.decode_range(a, b)
    }
}
