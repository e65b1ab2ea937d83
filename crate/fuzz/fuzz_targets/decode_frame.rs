#![no_main]
use libfuzzer_sys::fuzz_target;
use rateless_coop::codec::presets;
use rateless_coop::codec::wire::{decode_frame, encode_frame};

fuzz_target!(|data: &[u8]| {
    let Ok(headers) = decode_frame(data) else { return };
    assert_eq!(encode_frame(&headers), data);
    let dist = presets::raptor_point_to_point();
    for h in headers.iter().filter(|h| h.union_len <= 4096) {
        let union: Vec<u32> = (0..h.union_len).collect();
        if let Ok(neighbors) = h.expand(&union, &dist) {
            assert_eq!(neighbors.len(), h.degree as usize);
            assert!(neighbors.iter().all(|&n| n < h.union_len));
        }
    }
});
