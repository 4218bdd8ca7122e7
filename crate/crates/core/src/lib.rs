//! Parity calculus for free and virtual links given by Gauss codes.

pub mod atoms;
pub mod code;
pub mod corpus;
pub mod cycles;
pub mod gf2;
pub mod graph;
pub mod moves;
pub mod parity;
pub mod projection;
pub mod search;
pub mod sequence;
pub mod suites;

pub use code::{parse_code, parse_code_auto, serialize_code, CodeError, CodeKind, LinkCode, Passage, Pos, Sign, Token};
pub use graph::{intersection_graph, unicursal_components, ComponentPartition, FramedGraph, IntersectionGraph};
