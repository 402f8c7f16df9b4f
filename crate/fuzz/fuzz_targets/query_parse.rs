#![no_main]

use libfuzzer_sys::fuzz_target;
use wtbc::{Mode, Query};

fuzz_target!(|text: &str| {
    let _ = text.parse::<Mode>();
    let q = Query::parse(text, Mode::And, 10);
    for (i, w) in q.words.iter().enumerate() {
        assert!(!w.is_empty());
        assert!(!q.words[..i].contains(w));
    }
});
