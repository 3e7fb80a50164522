//! Input and output formats of the polyvol command-line tool, split out so
//! the integration tests can exercise parsing and canonical serialization
//! directly.

pub mod input;
pub mod output;
