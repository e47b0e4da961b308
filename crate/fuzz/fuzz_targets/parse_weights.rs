#![no_main]

use lacunary::weights::{format_weights, parse_weights};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if data.len() > 100_000 {
        return;
    }
    let Ok(w) = parse_weights(data) else { return };
    let again = parse_weights(&format_weights(&w)).expect("formatted weights parse");
    assert_eq!(w.values(), again.values());
    assert!(w.h() > 0.0);
});
