//! Acceptance suite for `sr1` and `sr1-cli`; run with `cargo test -p sr1-verify --test acceptance`.
