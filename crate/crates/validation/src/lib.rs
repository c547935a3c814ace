//! Holds the `acceptance` test target; run it with
//! `cargo test -p greyfail-validation --test acceptance`.
