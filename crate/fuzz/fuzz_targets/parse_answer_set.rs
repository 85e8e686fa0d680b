#![no_main]

use aspexplain::io::parse_answer_set;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = parse_answer_set(data);
});
