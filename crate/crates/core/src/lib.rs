//! Finite connectivity spaces and the Grothendieck topology of covering
//! sieves on their connected sets.
//!
//! A connectivity structure on a finite set is a family of "connected"
//! subsets containing `∅` and closed under unions of members sharing a point.
//! Ordered by inclusion it is a category; a sieve on a connected `A` covers
//! `A` when the structure it generates is all of `K|_A`. The crate
//! enumerates those covering sieves, checks the topology axioms, relates
//! irreducible connected sets to trivial covers, checks the sheaf condition
//! for finite presheaves, and builds chain certificates showing that short
//! closed rational intervals cover a longer one.

pub mod corpus;
pub mod error;
pub mod interval;
pub mod io;
pub mod mask;
pub mod sheaf;
pub mod site;
pub mod structure;

pub use error::{Error, Result};
pub use interval::{build_witness, verify_witness, ChainWitness, Rational, RationalInterval};
pub use mask::{GroundSet, SubsetMask};
pub use sheaf::{amalgamations, is_sheaf, matching_families, validate_presheaf, MatchingFamily, Presheaf};
pub use site::{
    covering_sieves, covering_table, enumerate_sieves, is_covering, is_irreducible_via_j, is_sieve, maximal_sieve,
    verify_axioms, AxiomReport, CoveringTable, SamplingMode, Sieve, DEFAULT_CAP,
};
pub use structure::{closure, generate_structure, validate_structure, ConnectivityStructure, GeneratorFamily};
