//! Acceptance checks for `ahp-core`. The crate has no library code; the
//! suite lives in `tests/acceptance.rs` and prints one verdict per check.
