#![no_main]

use aspexplain::io::json::{parse_tree_json, tree_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(t) = parse_tree_json(data) {
        assert_eq!(parse_tree_json(&tree_to_json(&t)).expect("emitted tree parses"), t);
    }
});
