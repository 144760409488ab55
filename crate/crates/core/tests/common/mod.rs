// SPDX-License-Identifier: Apache-2.0
#![allow(dead_code)]

use std::path::Path;
use std::process::Output;

pub fn pbitsim(dir: &Path, args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_pbitsim"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn pbitsim")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Runs pbitsim and panics with its stderr unless it exits 0.
pub fn pbitsim_ok(dir: &Path, args: &[&str]) -> Output {
    let out = pbitsim(dir, args);
    assert_eq!(code(&out), 0, "pbitsim {args:?} failed: {}", stderr(&out));
    out
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values[values.len() / 2]
}
