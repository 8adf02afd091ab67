//! Core algorithms for token-level code clone measurement.
//!
//! This crate is `no_std` (with `alloc`) and has no IO. It provides:
//!
//! * a tolerant Python-flavoured tokenizer that never fails ([`lexer`]),
//! * interned token sequences with notebook cell boundaries ([`token`]),
//! * exact counting of repeated token subsequences per size, both a
//!   suffix-array fast path and a brute-force oracle ([`cloneindex`]),
//! * clone-size distributions with exact rational quantile arithmetic and
//!   threshold transfer between corpora ([`distribution`]),
//! * density and quantile-quantile series plus deterministic CSV and SVG
//!   rendering ([`report`]).
//!
//! File discovery, notebook JSON parsing, serialization formats, and the
//! command line live in the companion `clonequant` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cloneindex;
pub mod distribution;
pub mod lexer;
pub mod rational;
pub mod report;
pub mod token;

pub use cloneindex::{
    clone_groups_oracle, count_duplicates, count_duplicates_oracle, find_clone_groups, CloneGroup,
    CountingMode, DuplicateProfile, OracleError, ScanConfig, ORACLE_MAX_TOKENS,
};
pub use distribution::{
    aggregate_profiles, merge_distributions, transfer_threshold, CloneSizeDistribution,
    DistributionError, Provenance, TransferResult,
};
pub use lexer::{tokenize_cells, tokenize_source, CellBoundary, LexProfile};
pub use rational::Rational;
pub use token::{Token, TokenKind, TokenSequence};
