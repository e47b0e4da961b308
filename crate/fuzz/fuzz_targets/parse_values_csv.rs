#![no_main]

use lacunary::montecarlo::parse_values_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if data.len() < 200_000 {
        let _ = parse_values_csv(data);
    }
});
