#![no_main]

use lacunary::sequences::{format_sequence, parse_sequence};
use lacunary::LacunarySequence;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if data.len() > 100_000 {
        return;
    }
    let Ok(terms) = parse_sequence(data) else { return };
    let seq = LacunarySequence::from_terms(terms.clone(), "fuzz").expect("parsed terms are valid");
    let again = parse_sequence(&format_sequence(&seq)).expect("formatted sequence parses");
    assert_eq!(terms, again);
});
