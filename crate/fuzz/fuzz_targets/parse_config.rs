#![no_main]

use lacunary_cli::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if data.len() > 50_000 {
        return;
    }
    let Ok(cfg) = ExperimentConfig::from_json(data) else { return };
    let text = serde_json::to_string(&cfg).expect("config serializes");
    let again = ExperimentConfig::from_json(&text).expect("serialized config parses");
    assert_eq!(serde_json::to_string(&again).expect("config serializes"), text);
});
