// SPDX-License-Identifier: Apache-2.0
//! RBM parameters and their text file format.
//!
//! ```text
//! pbitsim-rbm 1
//! visible <n_visible> hidden <n_hidden> labels <n_labels>
//! weights
//! <n_hidden values>            (n_visible lines, row-major)
//! visible_bias
//! <n_visible values>
//! hidden_bias
//! <n_hidden values>
//! ```
//!
//! Values are single-space separated decimals, lines end in LF, and `#`
//! lines are ignored. The last `n_labels` visible units are the one-hot
//! class units.

use super::RbmError;
use crate::fmt::decimal;

pub const MODEL_MAGIC: &str = "pbitsim-rbm";
pub const MODEL_VERSION: u32 = 1;
/// Class outputs are written as single decimal digits.
pub const MAX_LABELS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct RbmModel {
    n_visible: usize,
    n_hidden: usize,
    n_labels: usize,
    /// Row-major `n_visible × n_hidden`.
    weights: Vec<f64>,
    visible_bias: Vec<f64>,
    hidden_bias: Vec<f64>,
}

impl RbmModel {
    pub fn new(
        n_visible: usize,
        n_hidden: usize,
        n_labels: usize,
        weights: Vec<f64>,
        visible_bias: Vec<f64>,
        hidden_bias: Vec<f64>,
    ) -> Result<Self, RbmError> {
        if n_hidden == 0 || n_labels == 0 || n_labels > MAX_LABELS || n_labels >= n_visible {
            return Err(RbmError::Shape(format!(
                "need 1 ≤ labels ≤ {MAX_LABELS}, labels < visible and hidden ≥ 1 \
                 (visible {n_visible}, hidden {n_hidden}, labels {n_labels})"
            )));
        }
        if weights.len() != n_visible * n_hidden
            || visible_bias.len() != n_visible
            || hidden_bias.len() != n_hidden
        {
            return Err(RbmError::Shape(
                "parameter lengths disagree with dimensions".into(),
            ));
        }
        if weights
            .iter()
            .chain(&visible_bias)
            .chain(&hidden_bias)
            .any(|v| !v.is_finite())
        {
            return Err(RbmError::Shape("non-finite parameter".into()));
        }
        Ok(Self {
            n_visible,
            n_hidden,
            n_labels,
            weights,
            visible_bias,
            hidden_bias,
        })
    }

    pub fn zeros(n_visible: usize, n_hidden: usize, n_labels: usize) -> Result<Self, RbmError> {
        Self::new(
            n_visible,
            n_hidden,
            n_labels,
            vec![0.0; n_visible * n_hidden],
            vec![0.0; n_visible],
            vec![0.0; n_hidden],
        )
    }

    pub fn n_visible(&self) -> usize {
        self.n_visible
    }

    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    pub fn n_pixels(&self) -> usize {
        self.n_visible - self.n_labels
    }

    pub fn weight(&self, v: usize, h: usize) -> f64 {
        self.weights[v * self.n_hidden + h]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn visible_bias(&self) -> &[f64] {
        &self.visible_bias
    }

    pub fn hidden_bias(&self) -> &[f64] {
        &self.hidden_bias
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [f64], &mut [f64], &mut [f64]) {
        (
            &mut self.weights,
            &mut self.visible_bias,
            &mut self.hidden_bias,
        )
    }

    /// Largest absolute weight or bias.
    pub fn abs_max(&self) -> f64 {
        self.weights
            .iter()
            .chain(&self.visible_bias)
            .chain(&self.hidden_bias)
            .fold(0.0, |m, w| m.max(w.abs()))
    }

    pub fn to_text(&self) -> String {
        let row = |vals: &[f64]| {
            let mut s = vals
                .iter()
                .map(|&v| decimal(v))
                .collect::<Vec<_>>()
                .join(" ");
            s.push('\n');
            s
        };
        let mut out = format!(
            "{MODEL_MAGIC} {MODEL_VERSION}\nvisible {} hidden {} labels {}\nweights\n",
            self.n_visible, self.n_hidden, self.n_labels
        );
        for chunk in self.weights.chunks(self.n_hidden) {
            out.push_str(&row(chunk));
        }
        out.push_str("visible_bias\n");
        out.push_str(&row(&self.visible_bias));
        out.push_str("hidden_bias\n");
        out.push_str(&row(&self.hidden_bias));
        out
    }

    pub fn from_text(text: &str) -> Result<Self, RbmError> {
        let mut cur = Cursor::new(text);
        let (n, magic) = cur.next("header")?;
        if magic != format!("{MODEL_MAGIC} {MODEL_VERSION}") {
            return Err(bad(
                n,
                format!("expected `{MODEL_MAGIC} {MODEL_VERSION}`, got {magic:?}"),
            ));
        }
        let (n, dims) = cur.next("dimensions")?;
        let f: Vec<&str> = dims.split(' ').collect();
        let (nv, nh, nl): (usize, usize, usize) = match f.as_slice() {
            ["visible", a, "hidden", b, "labels", c] => match (a.parse(), b.parse(), c.parse()) {
                (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                _ => return Err(bad(n, "non-numeric dimension".into())),
            },
            _ => return Err(bad(n, format!("malformed dimension line {dims:?}"))),
        };
        // Refuse absurd headers before allocating.
        if nv.checked_mul(nh).is_none_or(|p: usize| p > 1 << 24) {
            return Err(bad(n, "model too large".into()));
        }
        cur.section("weights")?;
        let mut weights = Vec::new();
        for _ in 0..nv {
            weights.extend(cur.row(nh)?);
        }
        cur.section("visible_bias")?;
        let visible_bias = cur.row(nv)?;
        cur.section("hidden_bias")?;
        let hidden_bias = cur.row(nh)?;
        if let Some((n, l)) = cur.lines.next() {
            return Err(bad(n, format!("trailing content {l:?}")));
        }
        Self::new(nv, nh, nl, weights, visible_bias, hidden_bias)
    }
}

fn bad(line: usize, msg: String) -> RbmError {
    RbmError::ModelFile { line, msg }
}

struct Cursor<'a> {
    lines: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: Box::new(
                text.split('\n')
                    .enumerate()
                    .map(|(i, l)| (i + 1, l))
                    .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
            ),
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str), RbmError> {
        self.lines
            .next()
            .ok_or_else(|| bad(0, format!("unexpected end of file, missing {what}")))
    }

    fn section(&mut self, name: &str) -> Result<(), RbmError> {
        let (n, l) = self.next(name)?;
        if l == name {
            Ok(())
        } else {
            Err(bad(n, format!("expected section `{name}`, got {l:?}")))
        }
    }

    fn row(&mut self, len: usize) -> Result<Vec<f64>, RbmError> {
        let (n, l) = self.next("values")?;
        let vals = l
            .split(' ')
            .map(|v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| bad(n, "malformed value".into()))?;
        if vals.len() != len {
            return Err(bad(n, format!("expected {len} values, got {}", vals.len())));
        }
        Ok(vals)
    }
}
