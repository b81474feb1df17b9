#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    eulersim_harness::roundtrip::check_config(data);
});
