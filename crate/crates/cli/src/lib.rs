//! File formats shared by the `locc` binary and its tests.

pub mod format;
