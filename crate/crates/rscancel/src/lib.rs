pub mod dehn;
pub mod error;
pub mod genericity;
pub mod graph;
pub mod pieces;
pub mod rational;
pub mod rips_segev;
pub mod word;

pub use error::{Error, ParseError, Result};
pub use graph::{Dart, Edge, EdgeId, GraphPath, LabeledGraph, VertexId, WordEdge, WordGraph};
pub use pieces::{check_gr, max_piece_syllable, PieceLength, PieceReport};
pub use rational::{parse_rational, Rational};
pub use word::{Gen, Syllable, Word};
