#![no_main]

use aspexplain::io::{parse_atom, parse_ground_atom};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = parse_atom(data);
    if let Ok(a) = parse_ground_atom(data) {
        assert_eq!(parse_ground_atom(&a.to_string()).expect("printed atom parses"), a);
    }
});
