#![no_main]

use libfuzzer_sys::fuzz_target;
use vecbench::report::Report;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(report) = Report::from_json(text) else {
        return;
    };
    // anything accepted must survive a second trip unchanged
    let once = report.to_json().expect("accepted report serialises");
    let again = Report::from_json(&once).expect("serialised report parses");
    assert_eq!(once, again.to_json().unwrap());
});
