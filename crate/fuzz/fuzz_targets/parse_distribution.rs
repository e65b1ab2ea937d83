#![no_main]
use libfuzzer_sys::fuzz_target;
use rateless_coop::codec::{parse_distribution, write_distribution};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(dist) = parse_distribution(text) {
        // whatever parses must survive a write/parse round trip
        let again = parse_distribution(&write_distribution(&dist)).expect("re-parse");
        assert_eq!(write_distribution(&dist), write_distribution(&again));
    }
});
