//! Compressed self-index over word-based dense-coded text, with top-k
//! tf-idf document retrieval.
//!
//! ```
//! use wtbc::{BuildOptions, Collection, Mode, Query, WtbcIndex};
//!
//! let docs = ["to be or not to be", "that is the question"];
//! let coll = Collection::from_documents(&docs, "$").unwrap();
//! let idx = WtbcIndex::build(&coll, &BuildOptions::default()).unwrap();
//! assert_eq!(idx.document(1).unwrap(), docs[0]);
//!
//! let hits = wtbc::retrieval::topk_dr(&idx, &Query::new(["question"], Mode::Or, 5)).unwrap();
//! assert_eq!(hits[0].doc, 2);
//! ```

pub mod corpus;
pub mod error;
pub mod format;
pub mod rankselect;
pub mod retrieval;
pub mod scdc;
pub mod wtbc;

pub use corpus::{Collection, IngestConfig, RawDocuments, Vocabulary};
pub use error::{Error, Result};
pub use retrieval::{DrbConfig, Mode, Query, ScoredDoc};
pub use wtbc::{BuildOptions, WtbcIndex};
