#![no_main]

use lacunary::sequences::parse_ratio;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if data.len() > 10_000 {
        return;
    }
    if let Ok(q) = parse_ratio(data) {
        assert_eq!(parse_ratio(&q.to_string()).expect("display form parses"), q);
    }
});
