//! Acceptance checks for `tfim-fidelity` live in `tests/acceptance.rs`;
//! run them with `cargo test -p tfim-validation --test acceptance`.
