//! Acceptance suite for teichlab; the checks live in `tests/acceptance.rs`.
