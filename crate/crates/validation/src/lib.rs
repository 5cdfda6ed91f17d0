//! Acceptance suite for the pre-log toolkit; see `tests/acceptance.rs`.
