#![no_main]

use libfuzzer_sys::fuzz_target;
use vecbench::kernels::{parse_scenario_list, ScenarioId};

fuzz_target!(|s: &str| {
    if let Ok(ids) = parse_scenario_list(s) {
        assert!(!ids.is_empty());
        assert!(ids.windows(2).all(|w| w[0] < w[1]));
    }
    if let Ok(id) = s.parse::<ScenarioId>() {
        assert_eq!(id.spec().id(), id);
    }
});
