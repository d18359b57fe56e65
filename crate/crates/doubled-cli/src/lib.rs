//! Library surface of the CLI: the file formats, shared with tests.

pub mod format;
