#![no_main]

use libfuzzer_sys::fuzz_target;
use wtbc::format::{read_index, write_index, WriteOptions};
use wtbc::retrieval::topk_dr;
use wtbc::{Mode, Query};

fuzz_target!(|data: &[u8]| {
    let Ok((idx, layout)) = read_index(data) else {
        return;
    };
    assert_eq!(layout.total(), data.len());
    idx.decode_range(1, idx.len()).unwrap();
    let words: Vec<String> = idx
        .vocab()
        .entries()
        .iter()
        .skip(1)
        .take(3)
        .map(|e| e.word.clone())
        .collect();
    topk_dr(&idx, &Query::new(words, Mode::Or, 4)).unwrap();
    let store_counters = layout.stored_counters > 0;
    let (again, _) = write_index(&idx, WriteOptions { store_counters }).unwrap();
    assert!(read_index(&again).is_ok());
});
