// SPDX-License-Identifier: Apache-2.0
//! Labeled binary images: the `label,pix0,...,pixN` CSV format and a
//! generator for small synthetic pattern sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::RbmError;

/// Gray values at or above this level become 1 (half of 255, rounded up).
pub const BINARY_THRESHOLD: u8 = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledImage {
    pub label: u8,
    /// Gray levels 0..=255.
    pub pixels: Vec<u8>,
}

impl LabeledImage {
    pub fn binary(&self) -> Vec<u8> {
        self.pixels
            .iter()
            .map(|&p| u8::from(p >= BINARY_THRESHOLD))
            .collect()
    }
}

pub fn parse_dataset(text: &str) -> Result<Vec<LabeledImage>, RbmError> {
    let mut out: Vec<LabeledImage> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| RbmError::Dataset { line: idx + 1, msg };
        let mut fields = line.split(',').map(str::trim);
        let label = fields
            .next()
            .and_then(|f| f.parse::<u8>().ok())
            .filter(|&l| l <= 9)
            .ok_or_else(|| bad("label must be a digit 0-9".into()))?;
        let pixels = fields
            .map(|f| f.parse::<u8>())
            .collect::<Result<Vec<u8>, _>>()
            .map_err(|_| bad("pixels must be integers in 0..=255".into()))?;
        if pixels.is_empty() {
            return Err(bad("no pixel columns".into()));
        }
        if let Some(first) = out.first() {
            if first.pixels.len() != pixels.len() {
                return Err(bad(format!(
                    "{} pixels, expected {}",
                    pixels.len(),
                    first.pixels.len()
                )));
            }
        }
        out.push(LabeledImage { label, pixels });
    }
    Ok(out)
}

pub fn format_dataset(images: &[LabeledImage]) -> String {
    let mut out = String::new();
    for img in images {
        out.push_str(&img.label.to_string());
        for p in &img.pixels {
            out.push(',');
            out.push_str(&p.to_string());
        }
        out.push('\n');
    }
    out
}

/// Side length of the generated square images.
pub const PATTERN_SIDE: usize = 8;

/// Line families used by [`generate_patterns`], one per class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stroke {
    Horizontal,
    Vertical,
    Diagonal,
}

impl Stroke {
    fn of_class(class: usize) -> Self {
        [Stroke::Horizontal, Stroke::Vertical, Stroke::Diagonal][class]
    }

    fn covers(self, offset: usize, r: usize, c: usize) -> bool {
        const S: usize = PATTERN_SIDE;
        match self {
            Stroke::Horizontal => r == offset,
            Stroke::Vertical => c == offset,
            Stroke::Diagonal => (c + S - r) % S == offset,
        }
    }
}

/// Synthetic 8×8 patterns. Class 0 draws horizontal lines, class 1
/// vertical lines and class 2 wrapped diagonals. Each image has a pair of
/// its own lines, four apart at one of three offsets, plus one distractor
/// line of another class anywhere, so most images have a definite
/// runner-up class. Pixels are flipped with
/// probability `flip_noise` and gray levels are jittered on both sides of
/// the binarization threshold. Labels cycle through the classes.
pub fn generate_patterns(
    n: usize,
    n_classes: usize,
    flip_noise: f64,
    seed: u64,
) -> Result<Vec<LabeledImage>, RbmError> {
    if !(2..=3).contains(&n_classes) {
        return Err(RbmError::Shape(format!(
            "pattern classes must be 2 or 3, got {n_classes}"
        )));
    }
    if !(0.0..0.5).contains(&flip_noise) {
        return Err(RbmError::Shape(format!(
            "flip noise must lie in [0, 0.5), got {flip_noise}"
        )));
    }
    const S: usize = PATTERN_SIDE;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let class = k % n_classes;
        let own = Stroke::of_class(class);
        let other = Stroke::of_class((class + rng.random_range(1..n_classes)) % n_classes);
        let a = 1 + rng.random_range(0..3);
        let b = a + S / 2;
        let d = rng.random_range(0..S);
        let pixels = (0..S * S)
            .map(|p| {
                let (r, c) = (p / S, p % S);
                let bit = own.covers(a, r, c) || own.covers(b, r, c) || other.covers(d, r, c);
                let bit = bit ^ rng.random_bool(flip_noise);
                let jitter = rng.random_range(0..64u8);
                if bit {
                    255 - jitter
                } else {
                    jitter
                }
            })
            .collect();
        out.push(LabeledImage {
            label: class as u8,
            pixels,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_binarize() {
        let d = parse_dataset("3,0,127,128,255\n\n1,10,200,0,0\n").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].label, 3);
        assert_eq!(d[0].binary(), vec![0, 0, 1, 1]);
    }

    #[test]
    fn parse_errors() {
        let line = |t: &str| match parse_dataset(t).unwrap_err() {
            RbmError::Dataset { line, .. } => line,
            e => panic!("{e:?}"),
        };
        assert_eq!(line("x,1,2\n"), 1);
        assert_eq!(line("1,1,2\n2,1\n"), 2);
        assert_eq!(line("1,1,256\n"), 1);
        assert_eq!(line("12,0\n"), 1);
        assert_eq!(line("1\n"), 1);
    }

    #[test]
    fn format_roundtrip() {
        let d = generate_patterns(12, 3, 0.05, 1).unwrap();
        assert_eq!(parse_dataset(&format_dataset(&d)).unwrap(), d);
    }

    #[test]
    fn patterns_have_expected_structure() {
        let d = generate_patterns(60, 3, 0.0, 2).unwrap();
        for img in &d {
            let bits = img.binary();
            let ones: usize = bits.iter().map(|&b| b as usize).sum();
            // Two own lines and one crossing distractor line.
            assert_eq!(ones, 22, "label {}", img.label);
            if img.label == 0 {
                let full_rows = (0..8)
                    .filter(|r| bits[r * 8..r * 8 + 8].iter().all(|&b| b == 1))
                    .count();
                assert!(full_rows >= 2);
            }
        }
        assert_eq!(d.iter().filter(|i| i.label == 2).count(), 20);
        assert_eq!(
            generate_patterns(9, 3, 0.1, 5).unwrap(),
            generate_patterns(9, 3, 0.1, 5).unwrap()
        );
        assert!(generate_patterns(9, 4, 0.1, 5).is_err());
        assert!(generate_patterns(9, 3, 0.5, 5).is_err());
    }
}
