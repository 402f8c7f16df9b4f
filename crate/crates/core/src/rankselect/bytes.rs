use crate::error::{Error, Result};

pub const DEFAULT_BLOCK_SIZE: usize = 1 << 14;

/// A byte array with rank and select for every byte value.
///
/// For each byte value present in the data, an absolute 32-bit count of
/// its occurrences is kept at every interior block boundary. The counts at
/// both ends are implied (zero) or recovered by scanning the last block, so
/// a sequence shorter than one block carries no counters at all. Rank
/// starts from the nearest known boundary; select binary searches the
/// counters and scans forward. Positions are 1-based.
#[derive(Clone)]
pub struct ByteSequence {
    data: Vec<u8>,
    block: usize,
    present: [u64; 4],
    values: Vec<u8>,
    /// `counters[slot * stride + t - 1]` = occurrences of `values[slot]` in
    /// `data[..t * block]`, for `t` in `1..=stride`.
    counters: Vec<u32>,
    stride: usize,
}

impl std::fmt::Debug for ByteSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ByteSequence")
            .field("len", &self.data.len())
            .field("block", &self.block)
            .field("values", &self.values.len())
            .finish()
    }
}

#[inline]
pub(crate) fn count_byte(data: &[u8], b: u8) -> usize {
    data.iter().map(|&x| (x == b) as usize).sum()
}

/// Number of stored boundaries for `len` bytes split in blocks of `block`.
fn interior_boundaries(len: usize, block: usize) -> usize {
    len.div_ceil(block).saturating_sub(1)
}

impl ByteSequence {
    pub fn new(data: Vec<u8>) -> Result<Self> {
        Self::with_block_size(data, DEFAULT_BLOCK_SIZE)
    }

    pub fn with_block_size(data: Vec<u8>, block: usize) -> Result<Self> {
        if block == 0 || block > u32::MAX as usize {
            return Err(Error::Format(format!("invalid block size {block}")));
        }
        if data.len() > u32::MAX as usize {
            return Err(Error::Format(format!(
                "byte sequence of {} bytes exceeds 32-bit counters",
                data.len()
            )));
        }
        let mut present = [0u64; 4];
        for &b in &data {
            present[b as usize / 64] |= 1 << (b % 64);
        }
        let values: Vec<u8> = (0..=255u8).filter(|&v| present[v as usize / 64] >> (v % 64) & 1 == 1).collect();
        let mut seq = ByteSequence {
            data,
            block,
            present,
            values,
            counters: Vec::new(),
            stride: 0,
        };
        let stride = interior_boundaries(seq.data.len(), block);
        let mut counters = vec![0u32; seq.values.len() * stride];
        let mut running = vec![0u32; seq.values.len()];
        for (t, chunk) in seq.data.chunks(block).take(stride).enumerate() {
            for &b in chunk {
                running[seq.slot(b).expect("present")] += 1;
            }
            for (slot, &r) in running.iter().enumerate() {
                counters[slot * stride + t] = r;
            }
        }
        seq.counters = counters;
        seq.stride = stride;
        Ok(seq)
    }

    #[inline]
    fn slot(&self, b: u8) -> Option<usize> {
        let (w, bit) = (b as usize / 64, b % 64);
        if self.present[w] >> bit & 1 == 0 {
            return None;
        }
        let below: u32 = self.present[..w].iter().map(|x| x.count_ones()).sum();
        Some((below + (self.present[w] & ((1u64 << bit) - 1)).count_ones()) as usize)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn block_size(&self) -> usize {
        self.block
    }

    /// Distinct byte values present, ascending.
    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Bytes spent on counters and the presence mask.
    pub fn counter_bytes(&self) -> usize {
        self.counters.len() * std::mem::size_of::<u32>() + std::mem::size_of_val(&self.present)
    }

    /// Byte at 1-based position `i`.
    pub fn access(&self, i: usize) -> Result<u8> {
        if i == 0 || i > self.data.len() {
            return Err(Error::out_of_range(i, 1, self.data.len() as u64));
        }
        Ok(self.data[i - 1])
    }

    /// Total occurrences of `b`.
    pub fn count(&self, b: u8) -> usize {
        self.rank_unchecked(b, self.data.len())
    }

    /// Occurrences of `b` in positions `1..=i`.
    pub fn rank(&self, b: u8, i: usize) -> Result<usize> {
        if i > self.data.len() {
            return Err(Error::out_of_range(i, 0, self.data.len() as u64));
        }
        Ok(self.rank_unchecked(b, i))
    }

    #[inline]
    pub(crate) fn rank_unchecked(&self, b: u8, i: usize) -> usize {
        let Some(slot) = self.slot(b) else {
            return 0;
        };
        let row = &self.counters[slot * self.stride..][..self.stride];
        let at = |t: usize| if t == 0 { 0 } else { row[t - 1] as usize };
        let t = (i / self.block).min(self.stride);
        let lo = t * self.block;
        let hi = lo + self.block;
        if t < self.stride && hi - i < i - lo {
            at(t + 1) - count_byte(&self.data[i..hi], b)
        } else {
            at(t) + count_byte(&self.data[lo..i], b)
        }
    }

    /// Position of the `j`-th occurrence of `b` (`j >= 1`).
    pub fn select(&self, b: u8, j: usize) -> Result<usize> {
        if j == 0 {
            return Err(Error::out_of_range(0, 1, self.count(b) as u64));
        }
        let not_found = || Error::NotFound {
            ordinal: j as u64,
            available: self.count(b) as u64,
        };
        let slot = self.slot(b).ok_or_else(not_found)?;
        let row = &self.counters[slot * self.stride..][..self.stride];
        // blocks whose starting count is below j
        let t = row.partition_point(|&c| (c as usize) < j);
        let mut remaining = j - if t == 0 { 0 } else { row[t - 1] as usize };
        let start = t * self.block;
        for (off, &x) in self.data[start..].iter().enumerate() {
            if x == b {
                remaining -= 1;
                if remaining == 0 {
                    return Ok(start + off + 1);
                }
            }
        }
        Err(not_found())
    }

    /// Rebuilds from data plus previously stored counters. Only the counter
    /// shape is checked against the data.
    pub fn from_parts(data: Vec<u8>, block: usize, values: Vec<u8>, counters: Vec<u32>) -> Result<Self> {
        if block == 0 || block > u32::MAX as usize || data.len() > u32::MAX as usize {
            return Err(Error::Format("invalid stored byte sequence".into()));
        }
        let stride = interior_boundaries(data.len(), block);
        if values.windows(2).any(|w| w[0] >= w[1]) || counters.len() != values.len() * stride {
            return Err(Error::Format("stored counters have the wrong shape".into()));
        }
        let mut present = [0u64; 4];
        for &v in &values {
            present[v as usize / 64] |= 1 << (v % 64);
        }
        let mut seen = [0u64; 4];
        for &b in &data {
            seen[b as usize / 64] |= 1 << (b % 64);
        }
        if seen != present {
            return Err(Error::Format("stored byte values disagree with the data".into()));
        }
        if stride > 0 {
            for row in counters.chunks(stride) {
                if row[0] as usize > block || row.windows(2).any(|w| w[0] > w[1] || (w[1] - w[0]) as usize > block) {
                    return Err(Error::Format("stored counters are not monotone".into()));
                }
            }
        }
        Ok(ByteSequence {
            data,
            block,
            present,
            values,
            counters,
            stride,
        })
    }

    /// Raw counters, slot-major, for serialization.
    pub fn counters(&self) -> &[u32] {
        &self.counters
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn naive_rank(data: &[u8], b: u8, i: usize) -> usize {
        data[..i].iter().filter(|&&x| x == b).count()
    }

    fn naive_select(data: &[u8], b: u8, j: usize) -> Option<usize> {
        data.iter()
            .enumerate()
            .filter(|(_, &x)| x == b)
            .nth(j.checked_sub(1)?)
            .map(|(p, _)| p + 1)
    }

    #[test]
    fn fig1_root() {
        // b1..b5 mapped to 0..4
        let root = ByteSequence::with_block_size(vec![2, 3, 0, 3, 0, 4, 2, 1, 3], 4).unwrap();
        assert_eq!(root.rank(3, 9).unwrap(), 3);
        assert_eq!(root.select(2, 2).unwrap(), 7);
        assert_eq!(root.rank(3, 0).unwrap(), 0);
    }

    #[test]
    fn errors() {
        let seq = ByteSequence::with_block_size(vec![1, 2, 1], 2).unwrap();
        assert!(matches!(seq.rank(1, 4), Err(Error::OutOfRange { .. })));
        assert!(matches!(seq.select(1, 3), Err(Error::NotFound { .. })));
        assert!(matches!(seq.select(9, 1), Err(Error::NotFound { .. })));
        assert!(matches!(seq.select(1, 0), Err(Error::OutOfRange { .. })));
        assert!(matches!(seq.access(0), Err(Error::OutOfRange { .. })));
        assert!(ByteSequence::with_block_size(vec![], 0).is_err());
    }

    #[test]
    fn empty_sequence() {
        let seq = ByteSequence::new(Vec::new()).unwrap();
        assert_eq!(seq.rank(0, 0).unwrap(), 0);
        assert!(seq.select(0, 1).is_err());
    }

    #[test]
    fn matches_linear_scan() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for &(len, block, alphabet) in &[(1usize, 1usize, 2u8), (1000, 7, 3), (5000, 64, 40), (70_000, 1 << 14, 255)] {
            let data: Vec<u8> = (0..len).map(|_| rng.random_range(0..alphabet)).collect();
            let seq = ByteSequence::with_block_size(data.clone(), block).unwrap();
            for _ in 0..2000 {
                let b = rng.random_range(0..alphabet);
                let i = rng.random_range(0..=len);
                assert_eq!(seq.rank(b, i).unwrap(), naive_rank(&data, b, i));
                let j = rng.random_range(1..=len.max(1));
                assert_eq!(seq.select(b, j).ok(), naive_select(&data, b, j));
            }
        }
    }

    #[test]
    fn stored_counters_round_trip() {
        let data: Vec<u8> = (0..1000u32).map(|i| (i * 7 % 13) as u8).collect();
        let a = ByteSequence::with_block_size(data.clone(), 50).unwrap();
        let b = ByteSequence::from_parts(data.clone(), 50, a.values().to_vec(), a.counters().to_vec()).unwrap();
        for v in 0..13 {
            assert_eq!(a.rank(v, 777).unwrap(), b.rank(v, 777).unwrap());
        }
        assert!(ByteSequence::from_parts(data, 50, vec![0], vec![0; 21]).is_err());
    }

    proptest! {
        #[test]
        fn rank_select_adjoint(data in proptest::collection::vec(0u8..6, 0..400), block in 1usize..40, b in 0u8..6, i in 0usize..400) {
            let seq = ByteSequence::with_block_size(data.clone(), block).unwrap();
            let i = i.min(data.len());
            let r = seq.rank(b, i).unwrap();
            for j in 1..=seq.count(b) {
                prop_assert_eq!(seq.rank(b, seq.select(b, j).unwrap()).unwrap(), j);
            }
            if r > 0 {
                prop_assert!(seq.select(b, r).unwrap() <= i);
            }
            if r < seq.count(b) {
                prop_assert!(seq.select(b, r + 1).unwrap() > i);
            }
        }
    }
}
