#![no_main]

use libfuzzer_sys::fuzz_target;
use wtbc::scdc::{decode_bytes, encode_rank, ScdcParams};

fuzz_target!(|data: &[u8]| {
    let Some((&s, mut stream)) = data.split_first() else {
        return;
    };
    let Ok(p) = ScdcParams::with_stoppers(s as u32) else {
        return;
    };
    while !stream.is_empty() {
        let before = stream;
        let Ok(rank) = decode_bytes(&mut stream, p) else {
            break;
        };
        let used = before.len() - stream.len();
        if let Ok(code) = encode_rank(rank, p) {
            assert_eq!(code.as_bytes(), &before[..used]);
        }
    }
});
