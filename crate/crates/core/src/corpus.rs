//! Document ingestion under the spaceless word model.
//!
//! Text is split into maximal runs of alphanumeric characters (words) and
//! maximal runs of everything else (separators). A separator consisting of
//! exactly one space between two words is implicit: it is not emitted as a
//! token and [`detokenize`] restores it. Every document is terminated by a
//! `DocEnd` token, which owns rank 0 in the vocabulary.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const DEFAULT_SENTINEL: &str = "$";
pub const DEFAULT_DELIMITER: &str = "%%DOC%%";

/// Vocabulary rank reserved for the end-of-document sentinel.
pub const DOC_END_RANK: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Separator,
    DocEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
}

impl<'a> Token<'a> {
    pub fn word(text: &'a str) -> Self {
        Token {
            kind: TokenKind::Word,
            text,
        }
    }

    pub fn separator(text: &'a str) -> Self {
        Token {
            kind: TokenKind::Separator,
            text,
        }
    }
}

#[inline]
fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Classifies a vocabulary string (never the sentinel) by its first character.
pub fn kind_of(text: &str) -> TokenKind {
    match text.chars().next() {
        Some(c) if is_word_char(c) => TokenKind::Word,
        _ => TokenKind::Separator,
    }
}

/// Splits `text` into alternating word/separator tokens.
pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut runs: Vec<Token<'_>> = Vec::new();
    let mut start = 0;
    let mut current: Option<bool> = None;
    for (i, c) in text.char_indices() {
        let w = is_word_char(c);
        match current {
            Some(prev) if prev == w => {}
            Some(prev) => {
                runs.push(make_run(&text[start..i], prev));
                start = i;
                current = Some(w);
            }
            None => current = Some(w),
        }
    }
    if let Some(prev) = current {
        runs.push(make_run(&text[start..], prev));
    }

    let mut out = Vec::with_capacity(runs.len());
    for (i, tok) in runs.iter().enumerate() {
        let implicit = tok.kind == TokenKind::Separator
            && tok.text == " "
            && i > 0
            && i + 1 < runs.len()
            && runs[i - 1].kind == TokenKind::Word
            && runs[i + 1].kind == TokenKind::Word;
        if !implicit {
            out.push(*tok);
        }
    }
    out
}

fn make_run(text: &str, word: bool) -> Token<'_> {
    if word {
        Token::word(text)
    } else {
        Token::separator(text)
    }
}

/// Inverse of [`tokenize`]. `DocEnd` tokens render as their text.
pub fn detokenize(tokens: &[Token<'_>]) -> String {
    let mut out = String::new();
    detokenize_into(&mut out, tokens.iter().copied(), None);
    out
}

/// Appends the rendering of `tokens` to `out`. When `doc_end` is given, it
/// replaces the text of every `DocEnd` token.
pub fn detokenize_into<'a>(
    out: &mut String,
    tokens: impl IntoIterator<Item = Token<'a>>,
    doc_end: Option<&str>,
) {
    let mut prev_word = false;
    for tok in tokens {
        match tok.kind {
            TokenKind::Word => {
                if prev_word {
                    out.push(' ');
                }
                out.push_str(tok.text);
                prev_word = true;
            }
            TokenKind::Separator => {
                out.push_str(tok.text);
                prev_word = false;
            }
            TokenKind::DocEnd => {
                out.push_str(doc_end.unwrap_or(tok.text));
                prev_word = false;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabEntry {
    pub word: String,
    /// Total occurrences in the collection.
    pub freq: u64,
    /// Number of documents containing the word.
    pub df: u64,
}

/// Frequency-ranked vocabulary. The index of an entry is its codeword rank;
/// rank 0 is the end-of-document sentinel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<VocabEntry>,
    lookup: HashMap<String, u32>,
}

impl Vocabulary {
    /// Wraps entries that are already in rank order. Entry 0 must be the
    /// sentinel; the remaining words must be distinct.
    pub fn from_entries(entries: Vec<VocabEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Format("vocabulary is missing the sentinel".into()));
        }
        let mut lookup = HashMap::with_capacity(entries.len());
        for (rank, e) in entries.iter().enumerate().skip(1) {
            if e.word.is_empty() {
                return Err(Error::Format(format!("empty vocabulary word at rank {rank}")));
            }
            if lookup.insert(e.word.clone(), rank as u32).is_some() {
                return Err(Error::Format(format!("duplicate vocabulary word {:?}", e.word)));
            }
        }
        Ok(Vocabulary { entries, lookup })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    pub fn get(&self, rank: u32) -> Option<&VocabEntry> {
        self.entries.get(rank as usize)
    }

    /// Rank of a word or separator. The sentinel cannot be looked up by text.
    pub fn rank_of(&self, word: &str) -> Option<u32> {
        self.lookup.get(word).copied()
    }

    pub fn sentinel(&self) -> &str {
        &self.entries[DOC_END_RANK as usize].word
    }

    pub fn token(&self, rank: u32) -> Option<Token<'_>> {
        let e = self.entries.get(rank as usize)?;
        let kind = if rank == DOC_END_RANK {
            TokenKind::DocEnd
        } else {
            kind_of(&e.word)
        };
        Some(Token {
            kind,
            text: &e.word,
        })
    }

    pub fn freqs(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.freq).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollectionStats {
    /// Number of documents (N).
    pub docs: u64,
    /// Number of tokens including one `DocEnd` per document (n).
    pub tokens: u64,
    /// Vocabulary size including the sentinel (V).
    pub vocab: u64,
}

impl CollectionStats {
    pub fn tokens_without_sentinels(&self) -> u64 {
        self.tokens - self.docs
    }
}

/// A tokenized collection: every token replaced by its vocabulary rank,
/// documents concatenated with the sentinel after each one.
#[derive(Debug, Clone)]
pub struct Collection {
    pub text: Vec<u32>,
    pub vocab: Vocabulary,
    pub stats: CollectionStats,
    /// Size in bytes of the ingested input.
    pub original_size: u64,
}

impl Collection {
    /// Builds a collection from in-memory documents.
    pub fn from_documents<S: AsRef<str>>(docs: &[S], sentinel: &str) -> Result<Self> {
        let named: Vec<(String, &str, usize)> = docs
            .iter()
            .enumerate()
            .map(|(i, d)| (format!("document {}", i + 1), d.as_ref(), 0))
            .collect();
        let size = docs.iter().map(|d| d.as_ref().len() as u64).sum();
        build(&named, sentinel, size)
    }

    /// Reads and ingests documents according to `config`.
    pub fn ingest(config: &IngestConfig) -> Result<Self> {
        let raw = RawDocuments::read(config)?;
        let named: Vec<(String, &str, usize)> = raw
            .docs
            .iter()
            .map(|d| (d.source.clone(), d.text.as_str(), d.offset))
            .collect();
        build(&named, &config.sentinel, raw.size)
    }

    /// Token ranks of document `d` (1-based), excluding its `DocEnd`.
    pub fn documents(&self) -> impl Iterator<Item = &[u32]> {
        let mut text = &self.text[..];
        std::iter::from_fn(move || {
            let end = text.iter().position(|&t| t == DOC_END_RANK)?;
            let (doc, rest) = text.split_at(end);
            text = &rest[1..];
            Some(doc)
        })
    }
}

#[derive(Debug, Clone)]
pub enum Source {
    /// One file per document, taken in file-name order.
    Directory(PathBuf),
    /// One file holding all documents separated by full-line delimiters.
    File { path: PathBuf, delimiter: String },
}

#[derive(Debug, Clone)]
pub struct IngestConfig {
    pub source: Source,
    pub sentinel: String,
}

impl IngestConfig {
    pub fn directory(path: impl Into<PathBuf>) -> Self {
        IngestConfig {
            source: Source::Directory(path.into()),
            sentinel: DEFAULT_SENTINEL.to_owned(),
        }
    }

    pub fn file(path: impl Into<PathBuf>, delimiter: impl Into<String>) -> Self {
        IngestConfig {
            source: Source::File {
                path: path.into(),
                delimiter: delimiter.into(),
            },
            sentinel: DEFAULT_SENTINEL.to_owned(),
        }
    }

    /// Picks directory or single-file ingestion based on what `path` is.
    pub fn for_path(path: impl AsRef<Path>, delimiter: &str) -> Self {
        let path = path.as_ref();
        if path.is_dir() {
            Self::directory(path)
        } else {
            Self::file(path, delimiter)
        }
    }
}

/// One document as read from disk, before tokenization.
#[derive(Debug, Clone)]
pub struct RawDocument {
    pub source: String,
    /// Byte offset of the document within its source file.
    pub offset: usize,
    pub text: String,
}

/// The documents of an ingestion source, in document-id order.
#[derive(Debug, Clone)]
pub struct RawDocuments {
    pub docs: Vec<RawDocument>,
    /// Total bytes read.
    pub size: u64,
}

impl RawDocuments {
    pub fn read(config: &IngestConfig) -> Result<Self> {
        match &config.source {
            Source::Directory(dir) => {
                let mut files: Vec<PathBuf> = fs::read_dir(dir)?
                    .filter_map(|e| e.ok())
                    .map(|e| e.path())
                    .filter(|p| p.is_file())
                    .collect();
                files.sort();
                let mut docs = Vec::with_capacity(files.len());
                let mut size = 0u64;
                for f in &files {
                    let bytes = fs::read(f)?;
                    size += bytes.len() as u64;
                    docs.push(RawDocument {
                        source: f.display().to_string(),
                        offset: 0,
                        text: decode_utf8(bytes, f)?,
                    });
                }
                Ok(RawDocuments { docs, size })
            }
            Source::File { path, delimiter } => {
                let bytes = fs::read(path)?;
                let size = bytes.len() as u64;
                let text = decode_utf8(bytes, path)?;
                let name = path.display().to_string();
                let docs = split_documents(&text, delimiter)
                    .into_iter()
                    .map(|(offset, doc)| RawDocument {
                        source: name.clone(),
                        offset,
                        text: doc.to_owned(),
                    })
                    .collect();
                Ok(RawDocuments { docs, size })
            }
        }
    }

    pub fn texts(&self) -> Vec<&str> {
        self.docs.iter().map(|d| d.text.as_str()).collect()
    }
}

fn decode_utf8(bytes: Vec<u8>, path: &Path) -> Result<String> {
    String::from_utf8(bytes).map_err(|e| Error::InvalidEncoding {
        source_name: path.display().to_string(),
        offset: e.utf8_error().valid_up_to(),
    })
}

/// Splits `text` at lines equal to `delimiter`, returning each non-empty
/// document with its byte offset. The newline ending the line before a
/// delimiter belongs to the preceding document.
pub fn split_documents<'a>(text: &'a str, delimiter: &str) -> Vec<(usize, &'a str)> {
    let mut docs = Vec::new();
    let mut doc_start = 0;
    let mut line_start = 0;
    for line in text.split_inclusive('\n') {
        let content = line
            .strip_suffix('\n')
            .map(|l| l.strip_suffix('\r').unwrap_or(l))
            .unwrap_or(line);
        if content == delimiter {
            if line_start > doc_start {
                docs.push((doc_start, &text[doc_start..line_start]));
            }
            doc_start = line_start + line.len();
        }
        line_start += line.len();
    }
    if text.len() > doc_start {
        docs.push((doc_start, &text[doc_start..]));
    }
    docs
}

struct Counter {
    freq: u64,
    df: u64,
    last_doc: usize,
}

fn build(docs: &[(String, &str, usize)], sentinel: &str, original_size: u64) -> Result<Collection> {
    if docs.is_empty() || docs.iter().all(|(_, d, _)| d.is_empty()) {
        return Err(Error::EmptyCollection);
    }
    if sentinel.is_empty() {
        return Err(Error::Format("sentinel glyph must not be empty".into()));
    }

    // Temporary ids in first-seen order; remapped to ranks below.
    let mut ids: HashMap<&str, u32> = HashMap::new();
    let mut counters: Vec<Counter> = Vec::new();
    let mut words: Vec<&str> = Vec::new();
    let mut text: Vec<u32> = Vec::new();
    const DOC_END_TMP: u32 = u32::MAX;

    for (d, (name, doc, base)) in docs.iter().enumerate() {
        if let Some(off) = doc.find(sentinel) {
            return Err(Error::SentinelInInput {
                source_name: name.clone(),
                glyph: sentinel.to_owned(),
                offset: base + off,
            });
        }
        for tok in tokenize(doc) {
            let id = *ids.entry(tok.text).or_insert_with(|| {
                words.push(tok.text);
                counters.push(Counter {
                    freq: 0,
                    df: 0,
                    last_doc: usize::MAX,
                });
                (words.len() - 1) as u32
            });
            let c = &mut counters[id as usize];
            c.freq += 1;
            if c.last_doc != d {
                c.last_doc = d;
                c.df += 1;
            }
            text.push(id);
        }
        text.push(DOC_END_TMP);
    }

    let mut order: Vec<u32> = (0..words.len() as u32).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (&counters[a as usize], &counters[b as usize]);
        cb.freq
            .cmp(&ca.freq)
            .then_with(|| words[a as usize].cmp(words[b as usize]))
    });
    let mut rank_of_tmp = vec![0u32; words.len()];
    let n_docs = docs.len() as u64;
    let mut entries = Vec::with_capacity(words.len() + 1);
    entries.push(VocabEntry {
        word: sentinel.to_owned(),
        freq: n_docs,
        df: n_docs,
    });
    for (i, &tmp) in order.iter().enumerate() {
        rank_of_tmp[tmp as usize] = i as u32 + 1;
        let c = &counters[tmp as usize];
        entries.push(VocabEntry {
            word: words[tmp as usize].to_owned(),
            freq: c.freq,
            df: c.df,
        });
    }
    for t in text.iter_mut() {
        *t = if *t == DOC_END_TMP {
            DOC_END_RANK
        } else {
            rank_of_tmp[*t as usize]
        };
    }
    let stats = CollectionStats {
        docs: n_docs,
        tokens: text.len() as u64,
        vocab: entries.len() as u64,
    };
    Ok(Collection {
        text,
        vocab: Vocabulary::from_entries(entries)?,
        stats,
        original_size,
    })
}
