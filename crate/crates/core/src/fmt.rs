// SPDX-License-Identifier: Apache-2.0
//! Decimal rendering shared by every text format the tool writes.

/// Renders `x` with the shortest digit string that parses back to the same
/// `f64`. Plain notation is used for ordinary magnitudes and exponent
/// notation outside of them, so SPICE decks and CSV readers both accept it.
pub fn decimal(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plain_and_exponent_forms() {
        assert_eq!(decimal(1065.6), "1065.6");
        assert_eq!(decimal(0.5), "0.5");
        assert_eq!(decimal(0.0), "0");
        assert_eq!(decimal(2.827e-18), "2.827e-18");
        assert_eq!(decimal(-3.5e20), "-3.5e20");
    }

    proptest! {
        #[test]
        fn parses_back_exactly(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
            let back: f64 = decimal(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
