//! Classification of families of abelian Galois covers of the projective line.
//!
//! A family is given by a finite abelian group G and a monodromy vector
//! Θ = (θ₁,…,θ_s). From it the crate computes the genus, the eigenspace
//! multiplicities of G on holomorphic 1-forms, the noncompact factors of the
//! PEL symmetric space S(G) with their dimensions, and decides whether the
//! family's image in A_g is a special subvariety. Data can be enumerated up
//! to relabelling of branch points and automorphisms of G, and whole ranges
//! of groups scanned in parallel.

pub mod classify;
pub mod group;
pub mod hodge;
pub mod monodromy;
pub mod paper;
pub mod scan;

pub use classify::{
    classify, classify_with, Assertion, ClassificationReport, ClassifierConfig, Rule, SfVsSg,
    Verdict,
};
pub use group::{AbelianGroup, AutBounds, Automorphism, Character, GroupElement, GroupError, GroupTables};
pub use hodge::{eigenspace_multiplicities, EigenspaceProfile, FactorLabel, FactorMultiset, LabelEquality};
pub use monodromy::{enumerate_data, MonodromyDatum, MonodromyError, ValidatedDatum};
