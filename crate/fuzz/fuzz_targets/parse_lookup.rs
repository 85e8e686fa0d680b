#![no_main]

use aspexplain::io::parse_lookup;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = parse_lookup(data);
});
