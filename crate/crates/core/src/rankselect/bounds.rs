use crate::error::{Error, Result};

/// Root positions of every end-of-document token, in increasing order.
///
/// Select is an array read and rank a binary search, which is all the
/// retrieval engines need for `$`-boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocBoundaries {
    ends: Vec<u64>,
}

impl DocBoundaries {
    pub fn new(ends: Vec<u64>) -> Result<Self> {
        if ends.is_empty() {
            return Err(Error::EmptyCollection);
        }
        if ends[0] == 0 || ends.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format(
                "document boundaries must be positive and strictly increasing".into(),
            ));
        }
        Ok(DocBoundaries { ends })
    }

    /// Number of documents.
    pub fn len(&self) -> u64 {
        self.ends.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    pub fn ends(&self) -> &[u64] {
        &self.ends
    }

    /// Boundaries at positions `<= p`.
    pub fn doc_rank(&self, p: u64) -> u64 {
        self.ends.partition_point(|&e| e <= p) as u64
    }

    /// End position of document `d`; `doc_select(0) = 0`.
    pub fn doc_select(&self, d: u64) -> Result<u64> {
        match d {
            0 => Ok(0),
            d if d <= self.len() => Ok(self.ends[d as usize - 1]),
            d => Err(Error::out_of_range(d, 0, self.len())),
        }
    }
}
