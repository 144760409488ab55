// SPDX-License-Identifier: Apache-2.0
#![no_main]
use libfuzzer_sys::fuzz_target;

use pbitsim::spice::{extract_output_voltages, format_marker_lines};

fuzz_target!(|data: &[u8]| {
    let raw = String::from_utf8_lossy(data);
    if let Ok(points) = extract_output_voltages(&raw, "VOUT") {
        let again = extract_output_voltages(&format_marker_lines(&points, "VOUT"), "VOUT").unwrap();
        assert_eq!(points, again);
    }
});
