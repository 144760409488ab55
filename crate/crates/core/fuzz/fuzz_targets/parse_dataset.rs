// SPDX-License-Identifier: Apache-2.0
#![no_main]
use libfuzzer_sys::fuzz_target;

use pbitsim::rbm::{format_dataset, parse_dataset};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(images) = parse_dataset(text) {
            assert_eq!(parse_dataset(&format_dataset(&images)).unwrap(), images);
            let _ = pbitsim::analyzer::read_dataset_labels(text).unwrap();
        }
    }
});
