#![no_main]

use libfuzzer_sys::fuzz_target;
use vecbench::report::read_table;

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_table(data) {
        for row in rows {
            assert!((1..=8).contains(&row.scenario.get()));
        }
    }
});
