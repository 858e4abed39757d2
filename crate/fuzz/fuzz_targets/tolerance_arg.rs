#![no_main]

use libfuzzer_sys::fuzz_target;
use vecbench::harness::{ToleranceOverride, Tolerances};

fuzz_target!(|s: &str| {
    if let Ok(o) = s.parse::<ToleranceOverride>() {
        assert!(o.tolerance.is_finite() && o.tolerance >= 0.0);
        let mut t = Tolerances::default();
        t.apply(&o);
    }
});
