use super::idf;
use crate::corpus::DOC_END_RANK;
use crate::error::{Error, Result};
use crate::rankselect::{BitVector, BitVectorBuilder};
use crate::scdc;
use crate::wtbc::WtbcIndex;

pub const DEFAULT_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrbConfig {
    /// Words with idf at or below this threshold get no bitmap.
    pub epsilon: f64,
}

impl Default for DrbConfig {
    fn default() -> Self {
        DrbConfig {
            epsilon: DEFAULT_EPSILON,
        }
    }
}

/// Per-word occurrence bitmaps, indexed by vocabulary rank.
///
/// Bit `j` of a word's bitmap stands for its `j`-th occurrence in the text:
/// a one when that occurrence opens a new document, a zero otherwise. So
/// the bitmap has `freq` bits and `df` ones, and each run `1 0^(tf-1)` is
/// one document.
///
/// All bitmaps are stored back to back in rank order. Since a bitmap's
/// length is its word's frequency, only a presence bit per word is kept,
/// plus the starting offset of every 64th word.
#[derive(Debug, Clone, PartialEq)]
pub struct WordBitmaps {
    epsilon: f64,
    present: BitVector,
    bits: BitVector,
    /// Bit offset of the first bitmap at or after each multiple of 64 ids.
    samples: Vec<u64>,
    lens: Vec<u32>,
}

/// One word's bitmap: a window of the shared bit string.
#[derive(Debug, Clone, Copy)]
pub struct Bitmap<'a> {
    bits: &'a BitVector,
    start: usize,
    len: usize,
}

impl Bitmap<'_> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.len, "bit {i} out of range 1..={}", self.len);
        self.bits.get(self.start + i)
    }

    /// Ones in positions `1..=i`.
    pub fn rank1(&self, i: usize) -> Result<usize> {
        if i > self.len {
            return Err(Error::out_of_range(i, 0, self.len as u64));
        }
        Ok(self.bits.rank1(self.start + i)? - self.bits.rank1(self.start)?)
    }

    pub fn count_ones(&self) -> usize {
        self.rank1(self.len).expect("in range")
    }

    /// Smallest position `p > i` holding a one, or `len + 1` if none.
    pub fn next1(&self, i: usize) -> Result<usize> {
        if i > self.len {
            return Err(Error::out_of_range(i, 0, self.len as u64));
        }
        let p = self.bits.next1(self.start + i)?;
        Ok((p - self.start).min(self.len + 1))
    }

    pub fn to_bitvector(&self) -> BitVector {
        (1..=self.len).map(|i| self.get(i)).collect()
    }
}

const SAMPLE: usize = 64;

impl WordBitmaps {
    /// `present` has one bit per word id; `lens[id]` is the bitmap length of
    /// every present word (its frequency) and `bits` their concatenation.
    pub fn from_parts(epsilon: f64, present: BitVector, bits: BitVector, lens: Vec<u32>) -> Result<Self> {
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::Format(format!("invalid bitmap threshold {epsilon}")));
        }
        if lens.len() != present.len() {
            return Err(Error::Format("bitmap lengths do not cover the vocabulary".into()));
        }
        let mut samples = Vec::with_capacity(lens.len() / SAMPLE + 1);
        let mut offset = 0u64;
        for (id, &len) in lens.iter().enumerate() {
            if id % SAMPLE == 0 {
                samples.push(offset);
            }
            if present.get(id + 1) {
                if len == 0 {
                    return Err(Error::Format(format!("empty bitmap for word {id}")));
                }
                offset += len as u64;
            }
        }
        if offset != bits.len() as u64 {
            return Err(Error::Format("bitmap lengths disagree with the bit string".into()));
        }
        Ok(WordBitmaps {
            epsilon,
            present,
            bits,
            samples,
            lens,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn get(&self, id: u32) -> Option<Bitmap<'_>> {
        let id = id as usize;
        if id >= self.present.len() || !self.present.get(id + 1) {
            return None;
        }
        let first = id / SAMPLE * SAMPLE;
        let start = self.samples[id / SAMPLE] as usize
            + (first..id)
                .filter(|&x| self.present.get(x + 1))
                .map(|x| self.lens[x] as usize)
                .sum::<usize>();
        Some(Bitmap {
            bits: &self.bits,
            start,
            len: self.lens[id] as usize,
        })
    }

    /// One bit per word id: whether it has a bitmap.
    pub fn presence(&self) -> &BitVector {
        &self.present
    }

    /// All bitmaps concatenated in id order.
    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    /// Number of words with a bitmap.
    pub fn count(&self) -> usize {
        self.present.count_ones()
    }

    pub fn total_bits(&self) -> usize {
        self.bits.len()
    }

    /// Packed bits plus rank counters and offset samples. Bitmap lengths
    /// are shared with the vocabulary and not counted.
    pub fn heap_bytes(&self) -> usize {
        (self.bits.words().len() + self.present.words().len() + self.samples.len()) * 8
            + self.bits.counter_bytes()
            + self.present.counter_bytes()
    }
}

/// Encodes a tf vector: `1 0^(tf-1)` per document.
pub fn bitmap_from_tfs(tfs: &[u64]) -> BitVector {
    let mut b = BitVectorBuilder::new();
    for &tf in tfs {
        assert!(tf >= 1, "a document run needs at least one occurrence");
        b.push(true);
        for _ in 1..tf {
            b.push(false);
        }
    }
    b.build()
}

/// Decodes the tf vector of a bitmap using next-one jumps.
pub fn tfs_from_bitmap(bm: &BitVector) -> Vec<u64> {
    tf_runs(bm.len(), |i| bm.next1(i))
}

fn tf_runs(len: usize, next1: impl Fn(usize) -> Result<usize>) -> Vec<u64> {
    let mut out = Vec::new();
    let mut i = match next1(0) {
        Ok(i) if i <= len => i,
        _ => return out,
    };
    while i <= len {
        let next = next1(i).expect("i is in range");
        out.push((next - i) as u64);
        i = next;
    }
    out
}

impl Bitmap<'_> {
    /// The tf of each document containing the word, in document order.
    pub fn tfs(&self) -> Vec<u64> {
        tf_runs(self.len, |i| self.next1(i))
    }
}

/// Builds the bitmap of every word whose idf exceeds `cfg.epsilon`, in one
/// sequential pass over the text.
pub fn build_bitmaps(idx: &WtbcIndex, cfg: &DrbConfig) -> Result<WordBitmaps> {
    let n_docs = idx.num_docs();
    let mut builders: Vec<Option<(BitVectorBuilder, u64)>> = idx
        .vocab()
        .entries()
        .iter()
        .enumerate()
        .map(|(rank, e)| {
            (rank as u32 != DOC_END_RANK && idf(e.df, n_docs) > cfg.epsilon)
                .then(|| (BitVectorBuilder::new(), 0))
        })
        .collect();
    let mut doc = 1u64;
    let params = idx.params();
    idx.tree().for_each_codeword(1, idx.len() as usize, |code| {
        let rank = scdc::rank_of_codeword(code, params) as usize;
        if rank == DOC_END_RANK as usize {
            doc += 1;
        } else if let Some(Some((b, last))) = builders.get_mut(rank) {
            b.push(*last != doc);
            *last = doc;
        }
        Ok(())
    })?;
    let present: BitVector = builders.iter().map(Option::is_some).collect();
    let mut bits = BitVectorBuilder::new();
    for (b, _) in builders.iter().flatten() {
        bits.append(b);
    }
    let lens = idx
        .vocab()
        .entries()
        .iter()
        .map(|e| u32::try_from(e.freq).map_err(|_| Error::Format("word frequency exceeds 32 bits".into())))
        .collect::<Result<Vec<u32>>>()?;
    WordBitmaps::from_parts(cfg.epsilon, present, bits.build(), lens)
}
