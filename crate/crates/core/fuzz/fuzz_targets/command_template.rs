// SPDX-License-Identifier: Apache-2.0
#![no_main]
use libfuzzer_sys::fuzz_target;

use pbitsim::spice::{CommandTemplate, NETLIST_PLACEHOLDER};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(t) = CommandTemplate::parse(text) {
            let n: usize = t
                .args()
                .iter()
                .map(|a| a.matches(NETLIST_PLACEHOLDER).count())
                .sum();
            assert_eq!(n, 1);
        }
    }
});
