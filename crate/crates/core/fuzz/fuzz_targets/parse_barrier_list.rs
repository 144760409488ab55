// SPDX-License-Identifier: Apache-2.0
#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(barriers) = pbitsim::sweep::parse_barrier_list(text, 300.0) {
            let again = pbitsim::sweep::parse_barrier_list(
                &pbitsim::sweep::format_barrier_list(&barriers),
                300.0,
            )
            .expect("formatted list parses");
            assert_eq!(barriers, again);
        }
    }
});
