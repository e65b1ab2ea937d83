#![no_main]
use libfuzzer_sys::fuzz_target;
use rateless_coop::codec::PeelingDecoder;

// First byte: source count (1..=32). Then symbols as `len, ids...`.
fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let sources = usize::from(n % 32) + 1;
    let mut symbols = Vec::new();
    let mut it = rest.iter();
    while let Some(&len) = it.next() {
        let ids: Vec<u32> = it.by_ref().take(usize::from(len % 8) + 1).map(|&b| u32::from(b) % sources as u32).collect();
        let mut ids = ids;
        ids.sort_unstable();
        ids.dedup();
        symbols.push(ids);
    }
    let run = |order: &mut dyn Iterator<Item = &Vec<u32>>| {
        let mut d = PeelingDecoder::new(sources);
        for s in order {
            d.add_symbol(s, None);
            d.process();
        }
        assert_eq!(d.known_count(), d.known_mask().iter().filter(|&&k| k).count());
        d.known_mask().to_vec()
    };
    assert_eq!(run(&mut symbols.iter()), run(&mut symbols.iter().rev()));
});
