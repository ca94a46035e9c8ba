//! Single-edge flips on plane almost-perfect matchings of odd point sets.
pub mod altpath;
pub mod flipgraph;
pub mod flipseq;
pub mod generate;
pub mod geometry;
pub mod io;
pub mod matching;
pub mod svg;
pub mod visibility;
