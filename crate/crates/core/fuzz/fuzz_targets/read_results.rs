// SPDX-License-Identifier: Apache-2.0
#![no_main]
use libfuzzer_sys::fuzz_target;

use pbitsim::sweep::{read_results, results_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(rows) = read_results(text) {
            if let Ok(csv) = results_csv(&rows, "") {
                assert_eq!(read_results(&csv).unwrap(), rows);
            }
        }
    }
});
