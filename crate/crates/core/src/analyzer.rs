// SPDX-License-Identifier: Apache-2.0
//! Top-two accuracy analysis of PIR (probabilistic inference recorder)
//! outputs against the expected labels of a dataset.
//!
//! A testcase passes when the expected digit is among the two most probable
//! neurons and no neuron ranked below them shares the second-ranked
//! probability. A tie across that boundary means the recorder could not
//! separate the top two from the rest, so it counts as a failure even when
//! the expected digit made the cut.
//!
//! PIR output grammar (LF line endings, single spaces):
//!
//! ```text
//! testcase <id>
//! <digit> <probability>
//! ...
//! ```
//!
//! Lines starting with `#` and blank lines are ignored.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::fmt::decimal;
use crate::rbm::PirConfig;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyzerError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(
        "testcase id mismatch at position {index}: dataset has {dataset:?}, PIR output has {pir:?}"
    )]
    Mismatch {
        index: usize,
        dataset: String,
        pir: String,
    },
    #[error("no energy entry for {0}-bit precision")]
    MissingEnergy(u32),
}

fn parse_err(line: usize, msg: impl Into<String>) -> AnalyzerError {
    AnalyzerError::Parse {
        line,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PirNeuron {
    pub digit: u8,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PirTestcase {
    pub case_id: String,
    pub neurons: Vec<PirNeuron>,
}

pub fn parse_pir_output(text: &str) -> Result<Vec<PirTestcase>, AnalyzerError> {
    let mut cases: Vec<PirTestcase> = Vec::new();
    for (idx, line) in text.split('\n').enumerate() {
        let n = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(id) = line.strip_prefix("testcase ") {
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(parse_err(n, format!("invalid testcase id {id:?}")));
            }
            cases.push(PirTestcase {
                case_id: id.to_string(),
                neurons: Vec::new(),
            });
            continue;
        }
        let case = cases
            .last_mut()
            .ok_or_else(|| parse_err(n, "neuron line before any testcase header"))?;
        let (d, p) = line.split_once(' ').ok_or_else(|| {
            parse_err(n, format!("expected `<digit> <probability>`, got {line:?}"))
        })?;
        let digit = match d.as_bytes() {
            [c @ b'0'..=b'9'] => c - b'0',
            _ => return Err(parse_err(n, format!("invalid digit {d:?}"))),
        };
        let probability: f64 = p
            .parse()
            .map_err(|_| parse_err(n, format!("invalid probability {p:?}")))?;
        if !(0.0..=1.0).contains(&probability) {
            return Err(parse_err(n, format!("probability {p} outside [0, 1]")));
        }
        if case.neurons.iter().any(|x| x.digit == digit) {
            return Err(parse_err(
                n,
                format!("digit {digit} repeated in testcase {}", case.case_id),
            ));
        }
        case.neurons.push(PirNeuron { digit, probability });
    }
    Ok(cases)
}

pub fn format_pir_output(cases: &[PirTestcase]) -> String {
    let mut out = String::new();
    for case in cases {
        out.push_str("testcase ");
        out.push_str(&case.case_id);
        out.push('\n');
        for n in &case.neurons {
            out.push_str(&format!("{} {}\n", n.digit, decimal(n.probability)));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    Pass,
    NotInTopTwo,
    /// Expected digit has no neuron line at all; a not-in-top-two failure.
    ExpectedAbsent,
    TieBeyondTopTwo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Judgment {
    pub case_id: String,
    pub expected_digit: u8,
    pub verdict: Verdict,
    pub reason: Reason,
}

/// Neurons ordered by probability, highest first; equal probabilities keep
/// ascending digit order.
pub fn rank_neurons(neurons: &[PirNeuron]) -> Vec<PirNeuron> {
    let mut sorted = neurons.to_vec();
    sorted.sort_by(|a, b| {
        b.probability
            .partial_cmp(&a.probability)
            .unwrap_or(Ordering::Equal)
            .then(a.digit.cmp(&b.digit))
    });
    sorted
}

pub fn judge_testcase(expected: u8, case: &PirTestcase) -> Judgment {
    let ranked = rank_neurons(&case.neurons);
    let reason = match ranked.iter().position(|n| n.digit == expected) {
        None => Reason::ExpectedAbsent,
        Some(_) if ranked.len() < 2 => Reason::NotInTopTwo,
        Some(rank) if rank > 1 => Reason::NotInTopTwo,
        Some(_)
            if ranked[2..]
                .iter()
                .any(|n| n.probability == ranked[1].probability) =>
        {
            Reason::TieBeyondTopTwo
        }
        Some(_) => Reason::Pass,
    };
    Judgment {
        case_id: case.case_id.clone(),
        expected_digit: expected,
        verdict: if reason == Reason::Pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        reason,
    }
}

/// Expected output of one dataset row; the id is the zero-based row index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedCase {
    pub case_id: String,
    pub expected: u8,
}

/// Reads the label column of a `label,pix0,...` dataset CSV.
pub fn read_dataset_labels(text: &str) -> Result<Vec<ExpectedCase>, AnalyzerError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.split(',').next().unwrap_or("").trim();
        let expected = field
            .parse::<u8>()
            .ok()
            .filter(|&d| d <= 9)
            .ok_or_else(|| parse_err(idx + 1, format!("invalid label {field:?}")))?;
        out.push(ExpectedCase {
            case_id: out.len().to_string(),
            expected,
        });
    }
    Ok(out)
}

/// Reads `<bits> <femtojoules>` lines; `#` comments and blank lines skipped.
pub fn parse_energy_table(text: &str) -> Result<BTreeMap<u32, f64>, AnalyzerError> {
    let mut table = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || {
            parse_err(
                idx + 1,
                format!("expected `<bits> <femtojoules>`, got {line:?}"),
            )
        };
        let mut f = line.split_whitespace();
        let bits = f
            .next()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(bad)?;
        let fj = f
            .next()
            .and_then(|s| s.parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v >= 0.0)
            .ok_or_else(bad)?;
        if f.next().is_some() || bits == 0 {
            return Err(bad());
        }
        table.insert(bits, fj);
    }
    if table.is_empty() {
        return Err(parse_err(0, "energy table has no entries"));
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub n_cases: usize,
    pub n_pass: usize,
    pub n_fail: usize,
    pub error_rate_percent: f64,
    pub energy_total_fj: f64,
    pub per_case: Vec<Judgment>,
}

impl AnalysisReport {
    pub fn pass_rate_percent(&self) -> f64 {
        if self.n_cases == 0 {
            0.0
        } else {
            100.0 * self.n_pass as f64 / self.n_cases as f64
        }
    }
}

/// Judges paired testcases in order, stopping at the end of the shorter input.
pub fn analyze(
    dataset: &[ExpectedCase],
    pir: &[PirTestcase],
    config: &PirConfig,
) -> Result<AnalysisReport, AnalyzerError> {
    let per_testcase = config
        .energy_per_testcase()
        .ok_or(AnalyzerError::MissingEnergy(config.bits()))?;
    let mut per_case = Vec::with_capacity(dataset.len().min(pir.len()));
    for (index, (want, case)) in dataset.iter().zip(pir).enumerate() {
        if want.case_id != case.case_id {
            return Err(AnalyzerError::Mismatch {
                index,
                dataset: want.case_id.clone(),
                pir: case.case_id.clone(),
            });
        }
        per_case.push(judge_testcase(want.expected, case));
    }
    let n_cases = per_case.len();
    let n_pass = per_case
        .iter()
        .filter(|j| j.verdict == Verdict::Pass)
        .count();
    let n_fail = n_cases - n_pass;
    Ok(AnalysisReport {
        n_cases,
        n_pass,
        n_fail,
        error_rate_percent: if n_cases == 0 {
            0.0
        } else {
            100.0 * n_fail as f64 / n_cases as f64
        },
        energy_total_fj: n_cases as f64 * per_testcase,
        per_case,
    })
}
