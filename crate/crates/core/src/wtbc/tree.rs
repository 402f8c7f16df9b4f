use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::rankselect::ByteSequence;
use crate::scdc::{Codeword, MAX_CODEWORD_LEN};

/// One bytemap of the tree. A node at depth `path.len() + 1` stores, in
/// text order, the next byte of every codeword that starts with `path`.
#[derive(Debug, Clone)]
pub struct Node {
    path: Vec<u8>,
    seq: ByteSequence,
    /// Sorted by byte.
    children: Vec<(u8, u32)>,
}

impl Node {
    pub fn path(&self) -> &[u8] {
        &self.path
    }

    pub fn bytes(&self) -> &ByteSequence {
        &self.seq
    }

    fn child(&self, b: u8) -> Option<u32> {
        self.children
            .binary_search_by_key(&b, |&(k, _)| k)
            .ok()
            .map(|i| self.children[i].1)
    }
}

/// The nodes visited by one codeword, resolved once and reused for repeated
/// rank/select chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodePath {
    code: Codeword,
    nodes: [u32; MAX_CODEWORD_LEN],
}

impl CodePath {
    pub fn code(&self) -> &Codeword {
        &self.code
    }

    /// Index of the node holding the last byte, and that byte.
    pub(crate) fn last_step(&self) -> (usize, u8) {
        let l = self.code.len() - 1;
        (self.nodes[l] as usize, self.code[l])
    }
}

/// Wavelet tree on bytecodes: codeword bytes redistributed so that level
/// `l` holds the `l`-th byte of each codeword, split by the prefix before it.
///
/// Nodes are kept in breadth-first order, siblings by ascending byte, with
/// the root at index 0. All positions are 1-based.
#[derive(Debug, Clone)]
pub struct WaveletTree {
    stoppers: u32,
    nodes: Vec<Node>,
}

fn check_codeword(code: &[u8], stoppers: u32) -> Result<()> {
    let Some((&last, head)) = code.split_last() else {
        return Err(Error::CorruptStream("empty codeword"));
    };
    if (last as u32) >= stoppers || head.iter().any(|&b| (b as u32) < stoppers) {
        return Err(Error::CorruptStream("codeword violates the stopper/continuer rule"));
    }
    Ok(())
}

impl WaveletTree {
    /// Builds the tree for `text`, where token `t` is encoded as `codes[t]`.
    /// Byte values below `stoppers` terminate codewords.
    pub fn build(stoppers: u32, codes: &[Codeword], text: &[u32], block: usize) -> Result<Self> {
        if stoppers == 0 || stoppers > 255 {
            return Err(Error::InvalidParams {
                s: stoppers,
                c: 256u32.saturating_sub(stoppers),
            });
        }
        for code in codes {
            check_codeword(code, stoppers)?;
        }

        let mut paths: Vec<Vec<u8>> = vec![Vec::new()];
        let mut bufs: Vec<Vec<u8>> = vec![Vec::with_capacity(text.len())];
        let mut child_of: HashMap<(u32, u8), u32> = HashMap::new();
        let mut chains: Vec<Option<[u32; MAX_CODEWORD_LEN]>> = vec![None; codes.len()];

        for &t in text {
            let code = codes
                .get(t as usize)
                .ok_or(Error::CorruptStream("token has no codeword"))?;
            let chain = match chains[t as usize] {
                Some(c) => c,
                None => {
                    let mut c = [0u32; MAX_CODEWORD_LEN];
                    let mut node = 0u32;
                    for (l, &b) in code.iter().enumerate() {
                        c[l] = node;
                        if l + 1 < code.len() {
                            node = *child_of.entry((node, b)).or_insert_with(|| {
                                let mut p = paths[node as usize].clone();
                                p.push(b);
                                paths.push(p);
                                bufs.push(Vec::new());
                                (paths.len() - 1) as u32
                            });
                        }
                    }
                    chains[t as usize] = Some(c);
                    c
                }
            };
            for (l, &b) in code.iter().enumerate() {
                bufs[chain[l] as usize].push(b);
            }
        }

        let mut raw: Vec<(Vec<u8>, Vec<u8>)> = paths.into_iter().zip(bufs).collect();
        raw.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        let nodes = raw
            .into_iter()
            .map(|(path, data)| Ok((path, ByteSequence::with_block_size(data, block)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_nodes(stoppers, nodes)
    }

    /// Assembles a tree from `(path, bytemap)` pairs in canonical order,
    /// validating the layout so that every traversal stays in bounds.
    pub fn from_nodes(stoppers: u32, nodes: Vec<(Vec<u8>, ByteSequence)>) -> Result<Self> {
        let bad = |msg: String| Err(Error::Format(msg));
        if stoppers == 0 || stoppers > 255 {
            return bad(format!("invalid stopper count {stoppers}"));
        }
        if nodes.first().map(|(p, _)| !p.is_empty()).unwrap_or(true) {
            return bad("tree must start with the root node".into());
        }
        for w in nodes.windows(2) {
            let (a, b) = (&w[0].0, &w[1].0);
            if (a.len(), a) >= (b.len(), b) {
                return bad(format!("tree nodes out of order at path {b:?}"));
            }
        }

        let mut index: HashMap<&[u8], u32> = HashMap::with_capacity(nodes.len());
        let mut children: Vec<Vec<(u8, u32)>> = vec![Vec::new(); nodes.len()];
        for (i, (path, seq)) in nodes.iter().enumerate() {
            if let Some((&last, parent_path)) = path.split_last() {
                if path.len() >= MAX_CODEWORD_LEN {
                    return bad(format!("tree path {path:?} is too deep"));
                }
                if path.iter().any(|&b| (b as u32) < stoppers) {
                    return bad(format!("tree path {path:?} contains a stopper"));
                }
                let Some(&parent) = index.get(parent_path) else {
                    return bad(format!("tree path {path:?} has no parent"));
                };
                if nodes[parent as usize].1.count(last) != seq.len() {
                    return bad(format!("tree node {path:?} has the wrong length"));
                }
                children[parent as usize].push((last, i as u32));
            }
            index.insert(path, i as u32);
        }
        for ((path, seq), kids) in nodes.iter().zip(&children) {
            let continuers = seq.values().iter().filter(|&&v| v as u32 >= stoppers).count();
            if continuers != kids.len() {
                return bad(format!("tree node {path:?} lacks children for its continuers"));
            }
        }
        drop(index);

        let nodes = nodes
            .into_iter()
            .zip(children)
            .map(|((path, seq), children)| Node {
                path,
                seq,
                children,
            })
            .collect();
        Ok(WaveletTree { stoppers, nodes })
    }

    pub fn stoppers(&self) -> u32 {
        self.stoppers
    }

    pub fn root(&self) -> &ByteSequence {
        &self.nodes[0].seq
    }

    /// Number of codewords (tokens) in the text.
    pub fn len(&self) -> usize {
        self.root().len()
    }

    pub fn is_empty(&self) -> bool {
        self.root().is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Bytemap reached by `path`, e.g. `[b3, b4]` for node B3B4.
    pub fn node(&self, path: &[u8]) -> Option<&ByteSequence> {
        let mut node = 0u32;
        for &b in path {
            node = self.nodes[node as usize].child(b)?;
        }
        Some(&self.nodes[node as usize].seq)
    }

    /// Resolves the node chain of `code`; `None` when the codeword's prefix
    /// never occurs in the text.
    pub fn resolve(&self, code: &[u8]) -> Option<CodePath> {
        let code = Codeword::from_slice(code)?;
        let mut nodes = [0u32; MAX_CODEWORD_LEN];
        let mut node = 0u32;
        for (l, &b) in code.iter().enumerate() {
            nodes[l] = node;
            if l + 1 < code.len() {
                node = self.nodes[node as usize].child(b)?;
            }
        }
        Some(CodePath { code, nodes })
    }

    /// Occurrences of the codeword in positions `1..=p`, following the
    /// rank chain down to its last byte.
    pub fn count_prefix(&self, path: &CodePath, p: usize) -> Result<usize> {
        if p > self.len() {
            return Err(Error::out_of_range(p, 0, self.len() as u64));
        }
        let mut pos = p;
        for (l, &b) in path.code.iter().enumerate() {
            if pos == 0 {
                break;
            }
            pos = self.nodes[path.nodes[l] as usize].seq.rank_unchecked(b, pos);
        }
        Ok(pos)
    }

    /// Text position of the `j`-th occurrence of the codeword, following
    /// the select chain from its last byte up to the root.
    pub fn locate(&self, path: &CodePath, j: usize) -> Result<usize> {
        let mut pos = j;
        for (l, &b) in path.code.iter().enumerate().rev() {
            pos = self.nodes[path.nodes[l] as usize].seq.select(b, pos)?;
        }
        Ok(pos)
    }

    /// Total occurrences of the codeword.
    pub fn frequency(&self, path: &CodePath) -> usize {
        let l = path.code.len() - 1;
        self.nodes[path.nodes[l] as usize].seq.count(path.code[l])
    }

    /// Codeword at text position `p`, read top-down with rank.
    pub fn codeword_at(&self, p: usize) -> Result<Codeword> {
        if p == 0 || p > self.len() {
            return Err(Error::out_of_range(p, 1, self.len() as u64));
        }
        let mut buf = [0u8; MAX_CODEWORD_LEN];
        let mut node = 0usize;
        let mut pos = p;
        for (l, slot) in buf.iter_mut().enumerate() {
            let seq = &self.nodes[node].seq;
            let b = seq.access(pos)?;
            *slot = b;
            if (b as u32) < self.stoppers {
                return Ok(Codeword::from_slice(&buf[..=l]).unwrap());
            }
            pos = seq.rank_unchecked(b, pos);
            node = self.nodes[node]
                .child(b)
                .ok_or(Error::CorruptStream("continuer without child node"))? as usize;
        }
        Err(Error::CorruptStream("codeword longer than the supported maximum"))
    }

    /// Calls `f` with each codeword in positions `a..=b`, in order. Each node
    /// keeps a cursor, so after the first visit every byte costs O(1).
    pub fn for_each_codeword(
        &self,
        a: usize,
        b: usize,
        mut f: impl FnMut(&[u8]) -> Result<()>,
    ) -> Result<()> {
        if a == 0 || a > b || b > self.len() {
            return Err(Error::out_of_range(if a == 0 { a } else { b }, 1, self.len() as u64));
        }
        // 0-based index of the next unread byte in each node.
        let mut cursor: Vec<usize> = vec![usize::MAX; self.nodes.len()];
        cursor[0] = a - 1;
        let mut buf = [0u8; MAX_CODEWORD_LEN];
        for _ in a..=b {
            let mut node = 0usize;
            let mut len = 0;
            loop {
                let seq = &self.nodes[node].seq;
                let idx = cursor[node];
                let byte = seq.as_bytes()[idx];
                cursor[node] = idx + 1;
                buf[len] = byte;
                len += 1;
                if (byte as u32) < self.stoppers {
                    break;
                }
                if len == MAX_CODEWORD_LEN {
                    return Err(Error::CorruptStream("codeword longer than the supported maximum"));
                }
                let child = self.nodes[node]
                    .child(byte)
                    .ok_or(Error::CorruptStream("continuer without child node"))?
                    as usize;
                if cursor[child] == usize::MAX {
                    cursor[child] = seq.rank_unchecked(byte, idx + 1) - 1;
                }
                node = child;
            }
            f(&buf[..len])?;
        }
        Ok(())
    }

    /// Total bytes over all bytemaps.
    pub fn byte_len(&self) -> usize {
        self.nodes.iter().map(|n| n.seq.len()).sum()
    }

    pub fn counter_bytes(&self) -> usize {
        self.nodes.iter().map(|n| n.seq.counter_bytes()).sum()
    }
}
