//! Character decomposition of holomorphic 1-forms and the noncompact factors
//! of the G-centralizer in the symplectic group.
//!
//! For a nontrivial character χ of G the multiplicity of χ on H⁰(C, K_C) is
//!
//! ```text
//! m_χ = −1 + Σᵢ ⟨χ(θᵢ)⟩
//! ```
//!
//! where ⟨·⟩ is the fractional part of the exponent (χ(θ) = e^{2πi⟨χ(θ)⟩}).
//! A pair χ ≠ χ̄ with m_χ·m_χ̄ ≠ 0 contributes a factor SU(m_χ, m_χ̄); a
//! self-conjugate χ with m_χ ≥ 1 contributes Sp(2m_χ, R).

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::Serialize;
use thiserror::Error;

use crate::group::{AbelianGroup, Character};
use crate::monodromy::ValidatedDatum;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HodgeError {
    #[error("InternalNonIntegerMultiplicity: character {character} gives {numerator}/{denominator} − 1")]
    InternalNonIntegerMultiplicity {
        character: Character,
        numerator: u64,
        denominator: u64,
    },
}

/// Multiplicities m_χ of every character on holomorphic 1-forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenspaceProfile {
    group: AbelianGroup,
    mult: Vec<u32>,
    genus: u64,
}

impl EigenspaceProfile {
    /// Builds a profile from explicit multiplicities, listed in character
    /// order (see [`AbelianGroup::characters`]). The genus is their sum.
    pub fn from_multiplicities(group: AbelianGroup, mult: Vec<u32>) -> Self {
        assert_eq!(mult.len(), group.order(), "one multiplicity per character");
        let genus = mult.iter().map(|&m| m as u64).sum();
        EigenspaceProfile { group, mult, genus }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn genus(&self) -> u64 {
        self.genus
    }

    pub fn multiplicity(&self, chi: &Character) -> u32 {
        self.mult[self.group.encode(&chi.0)]
    }

    /// (χ, m_χ) in character order.
    pub fn iter(&self) -> impl Iterator<Item = (Character, u32)> + '_ {
        self.mult
            .iter()
            .enumerate()
            .map(|(i, &m)| (Character(self.group.decode(i)), m))
    }

    pub fn total(&self) -> u64 {
        self.mult.iter().map(|&m| m as u64).sum()
    }

    /// m_χ + m_χ̄.
    pub fn conjugation_pair_sum(&self, chi: &Character) -> u32 {
        let i = self.group.encode(&chi.0);
        let j = self.group.neg_index(i);
        self.mult[i] + self.mult[j]
    }

    pub fn to_json(&self) -> Vec<MultiplicityJson> {
        self.iter()
            .map(|(chi, m)| MultiplicityJson { chr: chi.0, m })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicityJson {
    #[serde(rename = "char")]
    pub chr: Vec<u32>,
    pub m: u32,
}

/// Chevalley–Weil multiplicities of the datum's G-action on H⁰(C, K_C).
pub fn eigenspace_multiplicities(datum: &ValidatedDatum) -> Result<EigenspaceProfile, HodgeError> {
    let group = datum.group();
    let exponent = group.exponent() as u64;
    let theta: Vec<&[u32]> = datum.theta().iter().map(|x| x.0.as_slice()).collect();
    let mut mult = vec![0u32; group.order()];
    for (c, slot) in mult.iter_mut().enumerate().skip(1) {
        let chi = group.decode(c);
        let total: u64 = theta
            .iter()
            .map(|x| group.char_numerator(&chi, x) as u64)
            .sum();
        if !total.is_multiple_of(exponent) || total < exponent {
            return Err(HodgeError::InternalNonIntegerMultiplicity {
                character: Character(chi),
                numerator: total,
                denominator: exponent,
            });
        }
        *slot = (total / exponent - 1) as u32;
    }
    Ok(EigenspaceProfile {
        group: group.clone(),
        mult,
        genus: datum.genus(),
    })
}

/// Number of branch points where χ(θᵢ) ≠ 1.
pub fn ramified_count(datum: &ValidatedDatum, chi: &Character) -> u32 {
    let group = datum.group();
    datum
        .theta()
        .iter()
        .filter(|x| group.char_numerator(&chi.0, &x.0) != 0)
        .count() as u32
}

/// Label of a noncompact simple factor.
///
/// `ComplexPair{p, q}` is SU(p, q) with p ≤ q; `Symplectic{m}` is Sp(2m, R).
/// Equality follows isomorphism of the real groups: Sp(2, R) ≅ SU(1, 1), and
/// Sp(2m, R) for m ≥ 2 differs from every SU(p, q).
#[derive(Debug, Clone, Copy)]
pub enum FactorLabel {
    ComplexPair { p: u32, q: u32 },
    Symplectic { m: u32 },
}

/// How factor labels are compared when testing pairwise distinctness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelEquality {
    /// Identify labels exactly when the real groups are isomorphic.
    #[default]
    Isomorphism,
    /// Also identify Sp(2m, R) with SU(m, m) for every m.
    SymplecticAsUnitary,
}

impl FactorLabel {
    pub fn complex_pair(a: u32, b: u32) -> Self {
        FactorLabel::ComplexPair {
            p: a.min(b),
            q: a.max(b),
        }
    }

    pub fn symplectic(m: u32) -> Self {
        FactorLabel::Symplectic { m }
    }

    /// Dimension of the associated Hermitian symmetric space.
    pub fn delta(&self) -> u64 {
        match *self {
            FactorLabel::ComplexPair { p, q } => p as u64 * q as u64,
            FactorLabel::Symplectic { m } => m as u64 * (m as u64 + 1) / 2,
        }
    }

    /// Normalized comparison key: (kind, p, q) with Sp(2, R) folded into SU(1, 1).
    fn key(&self, mode: LabelEquality) -> (u8, u32, u32) {
        match *self {
            FactorLabel::ComplexPair { p, q } => (0, p, q),
            FactorLabel::Symplectic { m: 1 } => (0, 1, 1),
            FactorLabel::Symplectic { m } => match mode {
                LabelEquality::Isomorphism => (1, m, m),
                LabelEquality::SymplecticAsUnitary => (0, m, m),
            },
        }
    }

    pub fn equals(&self, other: &FactorLabel, mode: LabelEquality) -> bool {
        self.key(mode) == other.key(mode)
    }

    /// True for SU(1, 1) in either of its two guises.
    pub fn is_su11(&self) -> bool {
        self.key(LabelEquality::Isomorphism) == (0, 1, 1)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FactorLabel::ComplexPair { .. } => "su",
            FactorLabel::Symplectic { .. } => "sp",
        }
    }

    /// (p, q) as written in the report; Sp(2m) is reported as (m, m).
    pub fn signature(&self) -> (u32, u32) {
        match *self {
            FactorLabel::ComplexPair { p, q } => (p, q),
            FactorLabel::Symplectic { m } => (m, m),
        }
    }
}

impl PartialEq for FactorLabel {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other, LabelEquality::Isomorphism)
    }
}

impl Eq for FactorLabel {}

impl Hash for FactorLabel {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key(LabelEquality::Isomorphism).hash(state);
    }
}

impl PartialOrd for FactorLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FactorLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key(LabelEquality::Isomorphism)
            .cmp(&other.key(LabelEquality::Isomorphism))
    }
}

impl fmt::Display for FactorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FactorLabel::ComplexPair { p, q } => write!(f, "SU({p},{q})"),
            FactorLabel::Symplectic { m: 1 } => write!(f, "SU(1,1)"),
            FactorLabel::Symplectic { m } => write!(f, "Sp{}", 2 * m),
        }
    }
}

/// One noncompact factor together with the character pair it comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub label: FactorLabel,
    pub character: Character,
    pub conjugate: Character,
}

/// A character pair whose factor U(m_χ, m_χ̄) is compact but nontrivial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactPair {
    pub character: Character,
    pub conjugate: Character,
    pub m: u32,
    pub m_conjugate: u32,
}

/// Noncompact factors, one per real character class (χ, χ̄).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactorMultiset {
    factors: Vec<Factor>,
}

impl FactorMultiset {
    pub fn from_labels(labels: impl IntoIterator<Item = FactorLabel>) -> Self {
        FactorMultiset {
            factors: labels
                .into_iter()
                .map(|label| Factor {
                    label,
                    character: Character(Vec::new()),
                    conjugate: Character(Vec::new()),
                })
                .collect(),
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn labels(&self) -> impl Iterator<Item = FactorLabel> + '_ {
        self.factors.iter().map(|f| f.label)
    }

    /// Labels in sorted order, for multiset comparison.
    pub fn sorted_labels(&self) -> Vec<FactorLabel> {
        let mut v: Vec<_> = self.labels().collect();
        v.sort();
        v
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// "SU(1,2)+SU(1,1)"; "trivial" when empty.
    pub fn summary(&self) -> String {
        if self.factors.is_empty() {
            return "trivial".to_string();
        }
        self.labels()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Noncompact factors of Sp(H¹, R)^G in character order.
pub fn factors(profile: &EigenspaceProfile) -> FactorMultiset {
    let group = profile.group();
    let mut out = Vec::new();
    for i in 1..group.order() {
        let j = group.neg_index(i);
        let (m, mb) = (profile.mult[i], profile.mult[j]);
        let label = if i == j {
            (m >= 1).then(|| FactorLabel::symplectic(m))
        } else if i < j && m > 0 && mb > 0 {
            Some(FactorLabel::complex_pair(m, mb))
        } else {
            None
        };
        if let Some(label) = label {
            out.push(Factor {
                label,
                character: Character(group.decode(i)),
                conjugate: Character(group.decode(j)),
            });
        }
    }
    FactorMultiset { factors: out }
}

/// The factor attached to the real class of χ, or `None` when it is compact
/// or trivial.
pub fn factor_at(profile: &EigenspaceProfile, chi: &Character) -> Option<FactorLabel> {
    let group = profile.group();
    let i = group.encode(&chi.0);
    let j = group.neg_index(i);
    let (m, mb) = (profile.mult[i], profile.mult[j]);
    if i == 0 {
        None
    } else if i == j {
        (m >= 1).then(|| FactorLabel::symplectic(m))
    } else {
        (m > 0 && mb > 0).then(|| FactorLabel::complex_pair(m, mb))
    }
}

/// Pairs χ ≠ χ̄ with exactly one of m_χ, m_χ̄ nonzero.
pub fn compact_pairs(profile: &EigenspaceProfile) -> Vec<CompactPair> {
    let group = profile.group();
    (1..group.order())
        .filter_map(|i| {
            let j = group.neg_index(i);
            let (m, mb) = (profile.mult[i], profile.mult[j]);
            (i < j && (m == 0) != (mb == 0)).then(|| CompactPair {
                character: Character(group.decode(i)),
                conjugate: Character(group.decode(j)),
                m,
                m_conjugate: mb,
            })
        })
        .collect()
}

/// dim S(G) = Σ δ over the noncompact factors.
pub fn dim_sg(fm: &FactorMultiset) -> u64 {
    fm.labels().map(|l| l.delta()).sum()
}

/// dim (S²H⁰(C, K_C))^G computed directly from the multiplicities:
/// Σ_{χ=χ̄} m_χ(m_χ+1)/2 + Σ_{χ≠χ̄ unordered} m_χ·m_χ̄.
pub fn dim_sym_square_invariants(profile: &EigenspaceProfile) -> u64 {
    let group = profile.group();
    let mut total = 0u64;
    for i in 0..group.order() {
        let j = group.neg_index(i);
        let m = profile.mult[i] as u64;
        if i == j {
            total += m * (m + 1) / 2;
        } else if i < j {
            total += m * profile.mult[j] as u64;
        }
    }
    total
}

pub fn delta(label: &FactorLabel) -> u64 {
    label.delta()
}
