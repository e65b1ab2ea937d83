#![no_main]
use libfuzzer_sys::fuzz_target;
use rateless_coop::optimizer::DesignParams;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(params) = DesignParams::from_toml(text) {
        let grid = params.grid();
        assert!(grid.iter().all(|x| (0.0..1.0).contains(x)));
    }
});
