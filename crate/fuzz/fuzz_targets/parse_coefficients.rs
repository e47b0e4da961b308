#![no_main]

use lacunary::fourier::{format_coefficients, parse_coefficients};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if data.len() > 100_000 {
        return;
    }
    let Ok(f) = parse_coefficients(data) else { return };
    let text = format_coefficients(&f);
    let g = parse_coefficients(&text).expect("formatted coefficients parse");
    assert_eq!(format_coefficients(&g), text);
    let _ = f.sup_bound();
});
