#![no_main]

use libfuzzer_sys::fuzz_target;
use vecbench::advisor::{advise, parse_toolchains, DeviceClass};
use vecbench::configmeta::OptLevel;
use vecbench::harness::SchemeKind;
use vecbench::kernels::Backend;

// Line 1: device name. Line 2: toolchain list. Both lines also feed the
// other name-like parsers.
fuzz_target!(|s: &str| {
    let mut lines = s.splitn(2, '\n');
    let device = lines.next().unwrap_or_default();
    let toolchains = lines.next().unwrap_or_default();
    if let (Ok(d), Ok(set)) = (device.parse::<DeviceClass>(), parse_toolchains(toolchains)) {
        let r = advise(d, &set);
        assert_eq!(r.toolchain.is_none(), r.is_unknown());
        if let Some(t) = r.toolchain {
            assert!(set.contains(&t));
        }
    }
    for name in [device, toolchains] {
        let Ok(level) = name.parse::<OptLevel>();
        assert_eq!(level.to_string().parse::<OptLevel>(), Ok(level));
        let _ = name.parse::<Backend>();
        let _ = name.parse::<SchemeKind>();
    }
});
