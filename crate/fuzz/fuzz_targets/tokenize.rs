#![no_main]

use libfuzzer_sys::fuzz_target;
use wtbc::corpus::{detokenize, split_documents, tokenize};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let tokens = tokenize(text);
    assert_eq!(detokenize(&tokens), text);

    // first line is the delimiter, the rest is the collection
    if let Some((delim, body)) = text.split_once('\n') {
        if !delim.is_empty() {
            for (offset, doc) in split_documents(body, delim) {
                assert_eq!(&body[offset..offset + doc.len()], doc);
            }
        }
    }
});
