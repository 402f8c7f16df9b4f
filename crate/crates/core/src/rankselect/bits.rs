use crate::error::{Error, Result};

const WORDS_PER_BLOCK: usize = 8;

/// Plain bitvector with rank, select and next-one. Positions are 1-based.
///
/// Cumulative popcounts are sampled every 512 bits.
#[derive(Clone, PartialEq, Eq)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
    /// `blocks[t]` = ones in bits `[0, 512 t)`; one trailing total.
    blocks: Vec<u64>,
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.len <= 128 {
            write!(f, "BitVector({self})")
        } else {
            write!(f, "BitVector(len={}, ones={})", self.len, self.count_ones())
        }
    }
}

impl std::fmt::Display for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 1..=self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Default, Clone)]
pub struct BitVectorBuilder {
    words: Vec<u64>,
    len: usize,
}

impl BitVectorBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Appends all bits of `other`.
    pub fn append(&mut self, other: &BitVectorBuilder) {
        let shift = self.len % 64;
        if shift == 0 {
            self.words.extend_from_slice(&other.words);
        } else {
            for &w in &other.words {
                *self.words.last_mut().unwrap() |= w << shift;
                self.words.push(w >> (64 - shift));
            }
        }
        self.len += other.len;
        self.words.truncate(self.len.div_ceil(64));
    }

    pub fn build(self) -> BitVector {
        BitVector::from_words(self.words, self.len).expect("builder keeps words consistent")
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut b = BitVectorBuilder::new();
        for bit in iter {
            b.push(bit);
        }
        b.build()
    }
}

impl BitVector {
    /// Parses a string of `0`/`1` characters.
    pub fn parse(bits: &str) -> Option<Self> {
        bits.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect()
    }

    /// Wraps packed little-endian words. Bits past `len` must be zero.
    pub fn from_words(words: Vec<u64>, len: usize) -> Result<Self> {
        if words.len() != len.div_ceil(64) {
            return Err(Error::Format(format!(
                "{} words cannot hold exactly {len} bits",
                words.len()
            )));
        }
        if !len.is_multiple_of(64) {
            if let Some(&last) = words.last() {
                if last >> (len % 64) != 0 {
                    return Err(Error::Format("bits set past the end of a bitvector".into()));
                }
            }
        }
        let mut blocks = Vec::with_capacity(words.len() / WORDS_PER_BLOCK + 2);
        let mut acc = 0u64;
        for chunk in words.chunks(WORDS_PER_BLOCK) {
            blocks.push(acc);
            acc += chunk.iter().map(|w| w.count_ones() as u64).sum::<u64>();
        }
        blocks.push(acc);
        Ok(BitVector { words, len, blocks })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        *self.blocks.last().unwrap() as usize
    }

    /// Bytes used by the sampled counters.
    pub fn counter_bytes(&self) -> usize {
        self.blocks.len() * std::mem::size_of::<u64>()
    }

    /// Bit at 1-based position `i`. Panics when out of range.
    pub fn get(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.len, "bit {i} out of range 1..={}", self.len);
        let k = i - 1;
        self.words[k / 64] >> (k % 64) & 1 == 1
    }

    /// Ones in positions `1..=i`.
    pub fn rank1(&self, i: usize) -> Result<usize> {
        if i > self.len {
            return Err(Error::out_of_range(i, 0, self.len as u64));
        }
        Ok(self.rank1_unchecked(i))
    }

    fn rank1_unchecked(&self, i: usize) -> usize {
        let w = i / 64;
        let t = w / WORDS_PER_BLOCK;
        let mut r = self.blocks[t];
        for &word in &self.words[t * WORDS_PER_BLOCK..w] {
            r += word.count_ones() as u64;
        }
        if !i.is_multiple_of(64) {
            r += (self.words[w] & ((1u64 << (i % 64)) - 1)).count_ones() as u64;
        }
        r as usize
    }

    /// Position of the `j`-th one (`j >= 1`).
    pub fn select1(&self, j: usize) -> Result<usize> {
        let total = self.count_ones();
        if j == 0 {
            return Err(Error::out_of_range(0, 1, total as u64));
        }
        if j > total {
            return Err(Error::NotFound {
                ordinal: j as u64,
                available: total as u64,
            });
        }
        let t = self.blocks.partition_point(|&c| (c as usize) < j) - 1;
        let mut remaining = j - self.blocks[t] as usize;
        for (w, &word) in self.words.iter().enumerate().skip(t * WORDS_PER_BLOCK) {
            let ones = word.count_ones() as usize;
            if remaining <= ones {
                let mut x = word;
                for _ in 1..remaining {
                    x &= x - 1;
                }
                return Ok(w * 64 + x.trailing_zeros() as usize + 1);
            }
            remaining -= ones;
        }
        unreachable!("block counters are consistent with words")
    }

    /// Smallest position `p > i` holding a one, or `len + 1` if none.
    pub fn next1(&self, i: usize) -> Result<usize> {
        if i > self.len {
            return Err(Error::out_of_range(i, 0, self.len as u64));
        }
        // 0-based index i is position i + 1.
        if i < self.len {
            let w = i / 64;
            let masked = self.words[w] & (u64::MAX << (i % 64));
            if masked != 0 {
                return Ok(w * 64 + masked.trailing_zeros() as usize + 1);
            }
            if let Some(&next) = self.words.get(w + 1) {
                if next != 0 {
                    return Ok((w + 1) * 64 + next.trailing_zeros() as usize + 1);
                }
            }
        }
        let r = self.rank1_unchecked(i);
        if r == self.count_ones() {
            Ok(self.len + 1)
        } else {
            self.select1(r + 1)
        }
    }
}
