#![no_main]
use libfuzzer_sys::fuzz_target;
use rateless_coop::harness::Experiment;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(exp) = Experiment::from_toml(text, None) else { return };
    // keep resolution cheap: large blocks are valid but slow to build
    if exp.base.k.saturating_mul(exp.base.users) > 100_000 {
        return;
    }
    let _ = exp.points();
});
