#![no_main]

use aspexplain::io::json::{egraph_to_json, parse_egraph_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok((g, root)) = parse_egraph_json(data) {
        let back = parse_egraph_json(&egraph_to_json(&g, root.as_ref())).expect("emitted e-graph parses");
        assert_eq!(back, (g, root));
    }
});
