#![no_main]

use aspexplain::io::parse_program;
use libfuzzer_sys::fuzz_target;

// Whatever parses must print to text that parses to the same rules.
fuzz_target!(|data: &str| {
    if let Ok(p) = parse_program(data) {
        let again = parse_program(&p.to_string()).expect("printed program parses");
        assert_eq!(again.rules, p.rules);
    }
});
