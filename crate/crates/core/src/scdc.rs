//! (s,c)-Dense Code: a byte-oriented, prefix-free code over frequency ranks.
//!
//! Byte values `[0, s)` are stoppers and `[s, 256)` are continuers. A
//! codeword is zero or more continuers followed by one stopper. Ranks are
//! enumerated densely: the first `s` ranks get one byte, the next `s*c` get
//! two bytes, the next `s*c^2` three bytes, and so on.

use std::fmt;

use crate::error::{Error, Result};

/// Longest codeword the index supports.
pub const MAX_CODEWORD_LEN: usize = 5;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScdcParams {
    s: u32,
}

impl fmt::Debug for ScdcParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(s={}, c={})", self.s, self.c())
    }
}

impl ScdcParams {
    pub fn new(s: u32, c: u32) -> Result<Self> {
        if s == 0 || c == 0 || s.checked_add(c) != Some(256) {
            return Err(Error::InvalidParams { s, c });
        }
        Ok(ScdcParams { s })
    }

    pub fn with_stoppers(s: u32) -> Result<Self> {
        Self::new(s, 256u32.saturating_sub(s))
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn c(&self) -> u32 {
        256 - self.s
    }

    #[inline]
    pub fn is_stopper(&self, b: u8) -> bool {
        (b as u32) < self.s
    }

    /// Number of ranks with codewords of exactly `len` bytes.
    fn block_size(&self, len: usize) -> u128 {
        self.s as u128 * (self.c() as u128).pow(len as u32 - 1)
    }

    /// First rank whose codeword has `len` bytes.
    fn block_start(&self, len: usize) -> u128 {
        (1..len).map(|j| self.block_size(j)).sum()
    }

    /// Number of ranks representable with at most [`MAX_CODEWORD_LEN`] bytes.
    pub fn capacity(&self) -> u128 {
        self.block_start(MAX_CODEWORD_LEN + 1)
    }
}

/// A single codeword, stored inline.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Codeword {
    bytes: [u8; MAX_CODEWORD_LEN],
    len: u8,
}

impl Codeword {
    /// Wraps raw bytes. Returns `None` for empty or over-long input; does not
    /// check the stopper/continuer structure.
    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        if bytes.is_empty() || bytes.len() > MAX_CODEWORD_LEN {
            return None;
        }
        let mut buf = [0u8; MAX_CODEWORD_LEN];
        buf[..bytes.len()].copy_from_slice(bytes);
        Some(Codeword {
            bytes: buf,
            len: bytes.len() as u8,
        })
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_bytes())
    }
}

impl std::ops::Deref for Codeword {
    type Target = [u8];

    fn deref(&self) -> &[u8] {
        self.as_bytes()
    }
}

/// Length in bytes of the codeword for `rank`. Not capped at
/// [`MAX_CODEWORD_LEN`].
pub fn codeword_len(rank: u64, p: ScdcParams) -> usize {
    let rank = rank as u128;
    let mut start = 0u128;
    let mut len = 1;
    loop {
        let end = start + p.block_size(len);
        if rank < end {
            return len;
        }
        start = end;
        len += 1;
    }
}

pub fn encode_rank(rank: u64, p: ScdcParams) -> Result<Codeword> {
    let len = codeword_len(rank, p);
    if len > MAX_CODEWORD_LEN {
        return Err(Error::CapacityExceeded {
            rank,
            s: p.s(),
            max_len: MAX_CODEWORD_LEN,
        });
    }
    let (s, c) = (p.s() as u128, p.c() as u128);
    let m = rank as u128 - p.block_start(len);
    let mut bytes = [0u8; MAX_CODEWORD_LEN];
    bytes[len - 1] = (m % s) as u8;
    let mut q = m / s;
    for slot in bytes[..len - 1].iter_mut().rev() {
        *slot = (s + q % c) as u8;
        q /= c;
    }
    debug_assert_eq!(q, 0);
    Ok(Codeword {
        bytes,
        len: len as u8,
    })
}

/// Consumes one codeword from the front of `stream` and returns its rank.
pub fn decode_bytes(stream: &mut &[u8], p: ScdcParams) -> Result<u64> {
    let end = stream
        .iter()
        .take(MAX_CODEWORD_LEN)
        .position(|&b| p.is_stopper(b));
    let Some(last) = end else {
        return Err(if stream.len() < MAX_CODEWORD_LEN {
            Error::CorruptStream("stream ends before a stopper byte")
        } else {
            Error::CorruptStream("codeword longer than the supported maximum")
        });
    };
    let (code, rest) = stream.split_at(last + 1);
    *stream = rest;
    Ok(rank_of_codeword(code, p))
}

/// Rank of a complete, well-formed codeword.
pub fn rank_of_codeword(code: &[u8], p: ScdcParams) -> u64 {
    let (s, c) = (p.s() as u128, p.c() as u128);
    let len = code.len();
    let mut q = 0u128;
    for &b in &code[..len - 1] {
        q = q * c + (b as u128 - s);
    }
    let m = q * s + code[len - 1] as u128;
    (p.block_start(len) + m) as u64
}

/// Chooses the number of stoppers minimizing the encoded size of a text
/// whose rank-`r` symbol occurs `freqs[r]` times. Ties go to the smaller
/// `s`; splits that cannot encode every rank within
/// [`MAX_CODEWORD_LEN`] bytes are skipped.
pub fn optimize_sc(freqs: &[u64]) -> Result<ScdcParams> {
    let mut prefix = Vec::with_capacity(freqs.len() + 1);
    prefix.push(0u128);
    let mut acc = 0u128;
    for &f in freqs {
        acc += f as u128;
        prefix.push(acc);
    }
    let v = freqs.len() as u128;
    let mut best: Option<(u128, u32)> = None;
    for s in 1..=255u32 {
        let p = ScdcParams { s };
        if p.capacity() < v {
            continue;
        }
        let mut cost = 0u128;
        let mut start = 0u128;
        for len in 1..=MAX_CODEWORD_LEN {
            if start >= v {
                break;
            }
            let end = (start + p.block_size(len)).min(v);
            cost += len as u128 * (prefix[end as usize] - prefix[start as usize]);
            start = end;
        }
        if best.is_none_or(|(c, _)| cost < c) {
            best = Some((cost, s));
        }
    }
    match best {
        Some((_, s)) => Ok(ScdcParams { s }),
        None => Err(Error::CapacityExceeded {
            rank: freqs.len() as u64 - 1,
            s: 255,
            max_len: MAX_CODEWORD_LEN,
        }),
    }
}

/// Total encoded size in bytes for `freqs` under `p`.
pub fn encoded_size(freqs: &[u64], p: ScdcParams) -> u128 {
    freqs
        .iter()
        .enumerate()
        .map(|(r, &f)| f as u128 * codeword_len(r as u64, p) as u128)
        .sum()
}
