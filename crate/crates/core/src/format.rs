//! On-disk index format.
//!
//! All integers are little-endian. Counts are 32-bit, positions and
//! lengths of position ranges 64-bit.
//!
//! ```text
//! header   magic "WTBC1", version u32, flags u32, s u32, c u32,
//!          N u64, n u64, V u64, epsilon f64, block size u32, input size u64
//! vocab    V x (len u32, UTF-8 bytes, freq u32, df u32)        rank order
//! tree     node count u32, then per node in breadth-first path order:
//!          path len u8, path bytes, data len u64, data bytes
//!          [+ if STORED_COUNTERS: value count u16, values, counter count u64, u32 counters]
//! bounds   N x u64 document end positions
//! bitmaps  only if HAS_BITMAPS: presence bits (one per word id) as ceil(V/64) u64,
//!          total bits u64, then the bitmaps of present words concatenated
//!          in id order as packed u64 words; each has freq bits
//! ```
//!
//! Unless `STORED_COUNTERS` is set, bytemap counters are rebuilt on load.

use std::fs;
use std::path::Path;

use crate::corpus::{CollectionStats, VocabEntry, Vocabulary};
use crate::error::{Error, Result};
use crate::rankselect::{BitVector, ByteSequence, DocBoundaries};
use crate::retrieval::WordBitmaps;
use crate::scdc::{self, ScdcParams, MAX_CODEWORD_LEN};
use crate::wtbc::{WaveletTree, WtbcIndex};

pub const MAGIC: &[u8; 5] = b"WTBC1";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 5 + 4 + 4 + 4 + 4 + 8 + 8 + 8 + 8 + 4 + 8;

pub const FLAG_HAS_BITMAPS: u32 = 1;
pub const FLAG_STORED_COUNTERS: u32 = 1 << 1;
const KNOWN_FLAGS: u32 = FLAG_HAS_BITMAPS | FLAG_STORED_COUNTERS;

/// Byte sizes of each section of a serialized index.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Layout {
    pub header: usize,
    pub vocab: usize,
    pub tree: usize,
    /// Part of `tree` taken by stored counters; zero when they are rebuilt.
    pub stored_counters: usize,
    pub bounds: usize,
    pub bitmaps: usize,
}

impl Layout {
    pub fn total(&self) -> usize {
        self.header + self.vocab + self.tree + self.bounds + self.bitmaps
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WriteOptions {
    pub store_counters: bool,
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn bytes(&mut self, v: &[u8]) {
        self.buf.extend_from_slice(v);
    }
}

fn to_u32(v: u64, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Format(format!("{what} {v} does not fit in 32 bits")))
}

/// Serializes `idx`, returning the bytes and the section sizes.
pub fn write_index(idx: &WtbcIndex, opts: WriteOptions) -> Result<(Vec<u8>, Layout)> {
    let mut w = Writer { buf: Vec::new() };
    let mut layout = Layout::default();
    let mut flags = 0;
    if idx.bitmaps.is_some() {
        flags |= FLAG_HAS_BITMAPS;
    }
    if opts.store_counters {
        flags |= FLAG_STORED_COUNTERS;
    }
    let block = idx.tree.root().block_size();

    w.bytes(MAGIC);
    w.u32(VERSION);
    w.u32(flags);
    w.u32(idx.params.s());
    w.u32(idx.params.c());
    w.u64(idx.stats.docs);
    w.u64(idx.stats.tokens);
    w.u64(idx.stats.vocab);
    w.u64(idx.bitmaps.as_ref().map_or(0.0, |b| b.epsilon()).to_bits());
    w.u32(to_u32(block as u64, "block size")?);
    w.u64(idx.original_size);
    layout.header = w.buf.len();
    debug_assert_eq!(layout.header, HEADER_LEN);

    for e in idx.vocab.entries() {
        w.u32(to_u32(e.word.len() as u64, "word length")?);
        w.bytes(e.word.as_bytes());
        w.u32(to_u32(e.freq, "word frequency")?);
        w.u32(to_u32(e.df, "document frequency")?);
    }
    layout.vocab = w.buf.len() - layout.header;

    let mark = w.buf.len();
    w.u32(to_u32(idx.tree.nodes().len() as u64, "node count")?);
    for node in idx.tree.nodes() {
        let seq = node.bytes();
        w.u8(node.path().len() as u8);
        w.bytes(node.path());
        w.u64(seq.len() as u64);
        w.bytes(seq.as_bytes());
        if opts.store_counters {
            let before = w.buf.len();
            w.u16(seq.values().len() as u16);
            w.bytes(seq.values());
            w.u64(seq.counters().len() as u64);
            for &c in seq.counters() {
                w.u32(c);
            }
            layout.stored_counters += w.buf.len() - before;
        }
    }
    layout.tree = w.buf.len() - mark;

    let mark = w.buf.len();
    for &e in idx.bounds.ends() {
        w.u64(e);
    }
    layout.bounds = w.buf.len() - mark;

    if let Some(bms) = &idx.bitmaps {
        let mark = w.buf.len();
        for &word in bms.presence().words() {
            w.u64(word);
        }
        w.u64(bms.bits().len() as u64);
        for &word in bms.bits().words() {
            w.u64(word);
        }
        layout.bitmaps = w.buf.len() - mark;
    }
    Ok((w.buf, layout))
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Format(format!("truncated while reading {what}")));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }
    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }
    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
    /// Converts a declared element count to usize, rejecting counts that
    /// cannot fit in the rest of the input.
    fn count(&self, n: u64, elem_size: usize, what: &str) -> Result<usize> {
        match usize::try_from(n) {
            Ok(n) if n.checked_mul(elem_size).is_some_and(|b| b <= self.remaining()) => Ok(n),
            _ => Err(Error::Format(format!("{what} count {n} exceeds the input"))),
        }
    }
}

fn read_words(r: &mut Reader<'_>, n: usize, what: &str) -> Result<Vec<u64>> {
    Ok(r.take(n * 8, what)?
        .chunks_exact(8)
        .map(|ch| u64::from_le_bytes(ch.try_into().unwrap()))
        .collect())
}

/// Parses and validates a serialized index.
pub fn read_index(bytes: &[u8]) -> Result<(WtbcIndex, Layout)> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let mut layout = Layout::default();
    let bad = |m: String| Error::Format(m);

    if r.take(MAGIC.len(), "magic")? != MAGIC {
        return Err(bad("bad magic".into()));
    }
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let flags = r.u32("flags")?;
    if flags & !KNOWN_FLAGS != 0 {
        return Err(bad(format!("unknown flags {flags:#x}")));
    }
    let s = r.u32("s")?;
    let c = r.u32("c")?;
    let params = ScdcParams::new(s, c)?;
    let n_docs = r.u64("N")?;
    let n_tokens = r.u64("n")?;
    let v = r.u64("V")?;
    let epsilon = f64::from_bits(r.u64("epsilon")?);
    let block = r.u32("block size")? as usize;
    let original_size = r.u64("input size")?;
    if block == 0 {
        return Err(bad("zero block size".into()));
    }
    if params.capacity() < v as u128 {
        return Err(bad(format!("vocabulary of {v} words exceeds the code capacity")));
    }
    layout.header = r.pos;

    let v_len = r.count(v, 12, "vocabulary")?;
    let mut entries = Vec::with_capacity(v_len);
    for _ in 0..v_len {
        let len = r.u32("word length")? as usize;
        let word = std::str::from_utf8(r.take(len, "word")?)
            .map_err(|_| bad("vocabulary word is not UTF-8".into()))?
            .to_owned();
        let freq = r.u32("frequency")? as u64;
        let df = r.u32("document frequency")? as u64;
        if df == 0 || df > freq || df > n_docs {
            return Err(bad(format!("inconsistent counts for {word:?}")));
        }
        entries.push(VocabEntry { word, freq, df });
    }
    if entries.first().is_none_or(|e| e.freq != n_docs || e.df != n_docs || e.word.is_empty()) {
        return Err(bad("sentinel entry does not match the document count".into()));
    }
    let vocab = Vocabulary::from_entries(entries)?;
    layout.vocab = r.pos - layout.header;

    let mark = r.pos;
    let node_count = r.u32("node count")? as u64;
    let node_count = r.count(node_count, 9, "node")?;
    let mut nodes = Vec::with_capacity(node_count);
    for _ in 0..node_count {
        let plen = r.u8("path length")? as usize;
        if plen >= MAX_CODEWORD_LEN {
            return Err(bad(format!("tree path of length {plen}")));
        }
        let path = r.take(plen, "path")?.to_vec();
        let len = r.u64("node length")?;
        let len = r.count(len, 1, "node byte")?;
        let data = r.take(len, "node bytes")?.to_vec();
        let seq = if flags & FLAG_STORED_COUNTERS != 0 {
            let before = r.pos;
            let nv = r.u16("value count")? as usize;
            let values = r.take(nv, "values")?.to_vec();
            let nc = r.u64("counter count")?;
            let nc = r.count(nc, 4, "counter")?;
            let raw = r.take(nc * 4, "counters")?;
            let counters = raw
                .chunks_exact(4)
                .map(|ch| u32::from_le_bytes(ch.try_into().unwrap()))
                .collect();
            layout.stored_counters += r.pos - before;
            ByteSequence::from_parts(data, block, values, counters)?
        } else {
            ByteSequence::with_block_size(data, block)?
        };
        nodes.push((path, seq));
    }
    let tree = WaveletTree::from_nodes(s, nodes)?;
    layout.tree = r.pos - mark;
    if tree.len() as u64 != n_tokens {
        return Err(bad("root length differs from the token count".into()));
    }

    // Every word's total count must match its leaf, and every codeword
    // present in the tree must belong to the vocabulary.
    let histograms: Vec<[u64; 256]> = tree
        .nodes()
        .iter()
        .map(|n| {
            let mut h = [0u64; 256];
            n.bytes().as_bytes().iter().for_each(|&b| h[b as usize] += 1);
            h
        })
        .collect();
    let mut total = 0u64;
    for (rank, e) in vocab.entries().iter().enumerate() {
        let code = scdc::encode_rank(rank as u64, params)?;
        let found = tree.resolve(&code).map_or(0, |p| {
            let (node, b) = p.last_step();
            histograms[node][b as usize]
        });
        if found != e.freq {
            return Err(bad(format!("frequency of rank {rank} disagrees with the tree")));
        }
        total += e.freq;
    }
    if total != n_tokens {
        return Err(bad("tree holds codewords outside the vocabulary".into()));
    }

    let mark = r.pos;
    let nd = r.count(n_docs, 8, "boundary")?;
    let mut ends = Vec::with_capacity(nd);
    for _ in 0..nd {
        ends.push(r.u64("boundary")?);
    }
    let bounds = DocBoundaries::new(ends)?;
    if bounds.ends().last() != Some(&n_tokens) {
        return Err(bad("last document does not end the text".into()));
    }
    for (d, &e) in bounds.ends().iter().enumerate() {
        if tree.root().access(e as usize)? != 0 || tree.root().rank(0, e as usize)? != d + 1 {
            return Err(bad(format!("boundary {e} is not a document end")));
        }
    }
    layout.bounds = r.pos - mark;

    let bitmaps = if flags & FLAG_HAS_BITMAPS != 0 {
        let mark = r.pos;
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(bad("invalid bitmap threshold".into()));
        }
        let pwords = r.count(vocab.len().div_ceil(64) as u64, 8, "presence word")?;
        let present = BitVector::from_words(read_words(&mut r, pwords, "presence")?, vocab.len())?;
        if present.get(1) {
            return Err(bad("the sentinel cannot have a bitmap".into()));
        }
        let nbits = r.u64("bitmap length")?;
        let nwords = r.count(nbits.div_ceil(64), 8, "bitmap word")?;
        let bits = BitVector::from_words(read_words(&mut r, nwords, "bitmaps")?, nbits as usize)?;
        let lens = vocab.entries().iter().map(|e| e.freq as u32).collect();
        let bms = WordBitmaps::from_parts(epsilon, present, bits, lens)?;
        for (rank, e) in vocab.entries().iter().enumerate() {
            if let Some(bm) = bms.get(rank as u32) {
                if bm.count_ones() as u64 != e.df || !bm.get(1) {
                    return Err(bad(format!("bitmap of rank {rank} disagrees with df")));
                }
            }
        }
        layout.bitmaps = r.pos - mark;
        Some(bms)
    } else {
        None
    };

    if r.remaining() != 0 {
        return Err(bad(format!("{} trailing bytes", r.remaining())));
    }

    let stats = CollectionStats {
        docs: n_docs,
        tokens: n_tokens,
        vocab: v,
    };
    let idx = WtbcIndex {
        params,
        vocab,
        stats,
        tree,
        bounds,
        bitmaps,
        original_size,
    };
    Ok((idx, layout))
}

impl WtbcIndex {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        Ok(write_index(self, WriteOptions::default())?.0)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Ok(read_index(bytes)?.0)
    }

    pub fn save(&self, path: impl AsRef<Path>, opts: WriteOptions) -> Result<Layout> {
        let (bytes, layout) = write_index(self, opts)?;
        fs::write(path, bytes)?;
        Ok(layout)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(Self, Layout)> {
        read_index(&fs::read(path)?)
    }
}
