#![no_main]

use libfuzzer_sys::fuzz_target;
use wtbc::corpus::split_documents;
use wtbc::{BuildOptions, Collection, DrbConfig, WtbcIndex};

// documents are separated by blank lines
fuzz_target!(|text: &str| {
    let docs: Vec<&str> = split_documents(text, "").into_iter().map(|(_, d)| d).collect();
    let Ok(c) = Collection::from_documents(&docs, "$") else {
        return;
    };
    let opts = BuildOptions {
        block_size: 16,
        bitmaps: Some(DrbConfig { epsilon: 0.0 }),
        ..Default::default()
    };
    let idx = WtbcIndex::build(&c, &opts).unwrap();
    for (d, doc) in docs.iter().enumerate() {
        assert_eq!(&idx.document(d as u64 + 1).unwrap(), doc);
    }
    let bytes = idx.to_bytes().unwrap();
    let back = WtbcIndex::from_bytes(&bytes).unwrap();
    assert_eq!(back.to_bytes().unwrap(), bytes);
});
