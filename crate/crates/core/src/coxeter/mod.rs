//! Coxeter data, element tables, reduced words and regions.

mod datum;
mod group;
mod region;
mod words;

pub use datum::CoxeterDatum;
pub use group::{CoxeterGroup, Element, Word, MAX_ELEMENTS};
pub use region::{region_up_to_length, validate_realization, w_circle, RealizationReport};
pub use words::{braid_moves, gre_graph, BraidMove, CanonicalWord, GreGraph, WordCache, PATH_RULE_VERSION};
