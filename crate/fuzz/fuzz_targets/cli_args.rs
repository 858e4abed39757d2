#![no_main]

use libfuzzer_sys::fuzz_target;

// One argument per line. Parse only; a successful parse is never executed.
fuzz_target!(|s: &str| {
    let argv = std::iter::once("vecbench").chain(s.split('\n').take(16));
    let _ = vecbench::cli::parse(argv);
});
