// SPDX-License-Identifier: Apache-2.0
pub mod analyzer;
pub mod device;
pub mod fmt;
pub mod io;
pub mod rbm;
pub mod spice;
pub mod sweep;
