// SPDX-License-Identifier: Apache-2.0
#![no_main]
use libfuzzer_sys::fuzz_target;

use pbitsim::spice::{patch_anisotropy, NetlistText};

fuzz_target!(|data: &[u8]| {
    let Some((head, deck)) = data.split_first_chunk::<8>() else {
        return;
    };
    let h_k = f64::from_le_bytes(*head);
    if let Ok(once) = patch_anisotropy(&NetlistText::new(deck), h_k) {
        // Idempotent once every field holds the new value.
        assert_eq!(patch_anisotropy(&once, h_k).unwrap(), once);
    }
});
