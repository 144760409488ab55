// SPDX-License-Identifier: Apache-2.0
#![no_main]
use libfuzzer_sys::fuzz_target;

use pbitsim::rbm::RbmModel;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(model) = RbmModel::from_text(text) {
            assert_eq!(RbmModel::from_text(&model.to_text()).unwrap(), model);
        }
    }
});
