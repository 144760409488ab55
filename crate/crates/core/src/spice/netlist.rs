// SPDX-License-Identifier: Apache-2.0
//! Anisotropy-field patching of SPICE decks.
//!
//! Only the literal token `HK= ` (trailing space included) is interpreted.
//! The value field is the run of non-whitespace bytes that follows it and
//! must parse as a finite decimal number. Every other byte is preserved.

use std::ops::Range;

use super::SpiceError;
use crate::fmt::decimal;

pub const ANISOTROPY_TOKEN: &[u8] = b"HK= ";

/// Byte-exact text of a SPICE deck.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetlistText(Vec<u8>);

impl NetlistText {
    pub fn new(raw: impl Into<Vec<u8>>) -> Self {
        Self(raw.into())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }
}

impl From<&str> for NetlistText {
    fn from(s: &str) -> Self {
        Self(s.as_bytes().to_vec())
    }
}

fn line_of(raw: &[u8], pos: usize) -> usize {
    1 + raw[..pos].iter().filter(|&&b| b == b'\n').count()
}

/// Locates the value field after every `HK= ` token.
pub fn anisotropy_fields(netlist: &NetlistText) -> Result<Vec<Range<usize>>, SpiceError> {
    let raw = netlist.as_bytes();
    let mut fields = Vec::new();
    let mut at = 0;
    while let Some(off) = find(&raw[at..], ANISOTROPY_TOKEN) {
        let start = at + off + ANISOTROPY_TOKEN.len();
        let len = raw[start..]
            .iter()
            .position(|b| b.is_ascii_whitespace())
            .unwrap_or(raw.len() - start);
        let end = start + len;
        let valid = std::str::from_utf8(&raw[start..end])
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
            .is_some_and(f64::is_finite);
        if !valid {
            return Err(SpiceError::MalformedValue {
                line: line_of(raw, start),
                text: String::from_utf8_lossy(&raw[start..end]).into_owned(),
            });
        }
        fields.push(start..end);
        at = end;
    }
    if fields.is_empty() {
        return Err(SpiceError::TokenAbsent);
    }
    Ok(fields)
}

fn find(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack.windows(needle.len()).position(|w| w == needle)
}

/// Replaces the value after every `HK= ` token with `h_k`.
pub fn patch_anisotropy(netlist: &NetlistText, h_k: f64) -> Result<NetlistText, SpiceError> {
    if !h_k.is_finite() {
        return Err(SpiceError::NonFiniteValue(h_k));
    }
    let fields = anisotropy_fields(netlist)?;
    let raw = netlist.as_bytes();
    let value = decimal(h_k);
    let mut out = Vec::with_capacity(raw.len() + fields.len() * value.len());
    let mut copied = 0;
    for field in fields {
        out.extend_from_slice(&raw[copied..field.start]);
        out.extend_from_slice(value.as_bytes());
        copied = field.end;
    }
    out.extend_from_slice(&raw[copied..]);
    Ok(NetlistText(out))
}
