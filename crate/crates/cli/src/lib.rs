//! Command-line companion to `clonequant-core`: corpus discovery,
//! notebook extraction, persistent file formats, the parallel scan
//! pipeline, and oracle verification.

pub mod commands;
pub mod corpus;
pub mod error;
pub mod formats;
pub mod notebook;
pub mod scan;
pub mod verify;
