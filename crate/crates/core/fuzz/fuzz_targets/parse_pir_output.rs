// SPDX-License-Identifier: Apache-2.0
#![no_main]
use libfuzzer_sys::fuzz_target;

use pbitsim::analyzer::{format_pir_output, parse_pir_output};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cases) = parse_pir_output(text) {
            assert_eq!(parse_pir_output(&format_pir_output(&cases)).unwrap(), cases);
        }
    }
});
