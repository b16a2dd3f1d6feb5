//! Special / not special / inconclusive decisions for a family of abelian
//! covers of the line.
//!
//! The family's locus Z sits inside the smallest special subvariety S_f,
//! which sits inside the PEL subvariety S(G); Z is special iff Z = S_f.
//! The noncompact factors of S(G) are known from the eigenspace
//! multiplicities, and S_f is obtained from S(G) by identifying isomorphic
//! factors along graphs of isometries. Rules, first match wins:
//!
//! * R1: dim Z = dim S(G) (condition ★) ⇒ special.
//! * R2: all factors pairwise non-isomorphic ⇒ S_f = S(G), so not special.
//! * R3: dim Z is not a dimension S_f can have ⇒ not special.
//! * R4: totally decomposable (asserted) with every factor SU(1,1) ⇒ ★ decides.
//! * R5: otherwise inconclusive.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::group::GroupElement;
use crate::hodge::{
    compact_pairs, eigenspace_multiplicities, factors, CompactPair, EigenspaceProfile,
    FactorLabel, FactorMultiset, HodgeError, LabelEquality, MultiplicityJson,
};
use crate::monodromy::ValidatedDatum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Special,
    NotSpecial,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Special => "SPECIAL",
            Verdict::NotSpecial => "NOT_SPECIAL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// What is known about S_f ⊆ S(G).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SfVsSg {
    Equal,
    StrictlySmallerPossible,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    #[serde(rename = "R1_star")]
    Star,
    #[serde(rename = "R2_tutti_diversi")]
    TuttiDiversi,
    #[serde(rename = "R3_dimension_exclusion")]
    DimensionExclusion,
    #[serde(rename = "R4_totally_decomposable")]
    TotallyDecomposable,
    #[serde(rename = "R5_fallthrough")]
    Fallthrough,
}

impl Rule {
    pub fn short(&self) -> &'static str {
        match self {
            Rule::Star => "R1",
            Rule::TuttiDiversi => "R2",
            Rule::DimensionExclusion => "R3",
            Rule::TotallyDecomposable => "R4",
            Rule::Fallthrough => "R5",
        }
    }
}

/// External facts about the family that the multiplicities cannot detect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Assertion {
    /// The generic Jacobian is isogenous to a product of elliptic curves.
    TotallyDecomposable,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifierConfig {
    /// Comparison used by the pairwise-distinctness test (R2).
    pub equality: LabelEquality,
    /// Symmetric-space dimension of a factor.
    pub delta: fn(&FactorLabel) -> u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            equality: LabelEquality::Isomorphism,
            delta: FactorLabel::delta,
        }
    }
}

/// An isomorphism class of factors: k copies of a label, merged into b blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassBlocks {
    #[serde(serialize_with = "serialize_label")]
    pub factor: FactorLabel,
    pub count: u32,
    pub blocks: u32,
}

fn serialize_label<S: serde::Serializer>(label: &FactorLabel, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(label)
}

/// Dimensions S_f can take, with one identification pattern per dimension.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PossibleDims {
    pub all: BTreeSet<u64>,
    pub feasible: BTreeSet<u64>,
    /// For each dimension in `all`, the block count of every class.
    pub witnesses: BTreeMap<u64, Vec<ClassBlocks>>,
}

/// Groups factors into isomorphism classes, sorted by label so that
/// equivalent data give identical class lists.
pub fn label_classes(fm: &FactorMultiset) -> Vec<(FactorLabel, u32)> {
    let mut classes: Vec<(FactorLabel, u32)> = Vec::new();
    for label in fm.labels() {
        match classes.iter_mut().find(|(l, _)| *l == label) {
            Some((_, k)) => *k += 1,
            None => classes.push((label, 1)),
        }
    }
    classes.sort_by_key(|&(l, _)| l);
    classes
}

/// { Σ_c b_c·δ_c : 1 ≤ b_c ≤ k_c } over the isomorphism classes c of factors,
/// plus the subset that is at least `dim_z`.
pub fn possible_sf_dims(fm: &FactorMultiset, dim_z: u64, config: &ClassifierConfig) -> PossibleDims {
    let classes = label_classes(fm);
    // sum → block counts; larger block counts are tried first so every sum
    // keeps its least-identified witness.
    let mut table: BTreeMap<u64, Vec<u32>> = BTreeMap::from([(0, Vec::new())]);
    for &(label, k) in &classes {
        let d = (config.delta)(&label);
        let mut next: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for (sum, blocks) in &table {
            for b in (1..=k).rev() {
                next.entry(sum + b as u64 * d).or_insert_with(|| {
                    let mut w = blocks.clone();
                    w.push(b);
                    w
                });
            }
        }
        table = next;
    }
    let witnesses: BTreeMap<u64, Vec<ClassBlocks>> = table
        .into_iter()
        .map(|(sum, blocks)| {
            let w = classes
                .iter()
                .zip(blocks)
                .map(|(&(factor, count), blocks)| ClassBlocks {
                    factor,
                    count,
                    blocks,
                })
                .collect();
            (sum, w)
        })
        .collect();
    let all: BTreeSet<u64> = witnesses.keys().copied().collect();
    let feasible = all.iter().copied().filter(|&d| d >= dim_z).collect();
    PossibleDims {
        all,
        feasible,
        witnesses,
    }
}

/// True iff the factors are pairwise distinct under `mode`.
pub fn tutti_diversi(fm: &FactorMultiset, mode: LabelEquality) -> bool {
    let labels: Vec<FactorLabel> = fm.labels().collect();
    labels
        .iter()
        .enumerate()
        .all(|(i, a)| labels[i + 1..].iter().all(|b| !a.equals(b, mode)))
}

/// Every factor is SU(1,1): the shape a special totally decomposable family must have.
pub fn decomposable_structure_check(fm: &FactorMultiset) -> bool {
    fm.labels().all(|l| l.is_su11())
}

/// Dimension of the symmetric space uniformizing a special totally
/// decomposable family with `moving` non-isogenous moving elliptic factors
/// and `cm_factors` fixed CM factors: each moving factor sweeps a copy of
/// the upper half plane, each CM factor is a point.
pub fn expected_special_dim_decomposable(moving: u64, cm_factors: u64) -> u64 {
    let _ = cm_factors;
    moving
}

/// Condition ★: dim Z = s − 3 equals dim S(G).
pub fn star_condition(datum: &ValidatedDatum) -> Result<bool, HodgeError> {
    let profile = eigenspace_multiplicities(datum)?;
    Ok(datum.dim_family() == crate::hodge::dim_sg(&factors(&profile)))
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub datum: ValidatedDatum,
    pub profile: EigenspaceProfile,
    pub dim_z: u64,
    pub dim_sg: u64,
    pub star_holds: bool,
    pub factors: FactorMultiset,
    pub compact: Vec<CompactPair>,
    pub possible: PossibleDims,
    pub verdict: Verdict,
    pub sf_vs_sg: SfVsSg,
    /// Rules evaluated, in order; the last one decided the verdict.
    pub rules: Vec<Rule>,
    pub assertions: BTreeSet<Assertion>,
    pub warnings: Vec<String>,
}

impl ClassificationReport {
    pub fn decided_by(&self) -> Rule {
        *self.rules.last().expect("at least one rule is always evaluated")
    }

    pub fn to_json(&self) -> ReportJson {
        ReportJson {
            dim_z: self.dim_z,
            dim_sg: self.dim_sg,
            star: self.star_holds,
            factors: self
                .factors
                .factors()
                .iter()
                .map(|f| {
                    let (p, q) = f.label.signature();
                    FactorJson {
                        kind: f.label.kind(),
                        p,
                        q,
                        chr: f.character.0.clone(),
                        delta: f.label.delta(),
                    }
                })
                .collect(),
            possible_sf_dims: PossibleDimsJson {
                all: self.possible.all.iter().copied().collect(),
                feasible: self.possible.feasible.iter().copied().collect(),
            },
            verdict: self.verdict,
            sf_vs_sg: self.sf_vs_sg,
            rules: self.rules.clone(),
            assertions: self.assertions.iter().copied().collect(),
            decided_by: self.decided_by(),
            group: self.datum.group().cyclic_orders().to_vec(),
            theta: self.datum.theta().to_vec(),
            genus: self.datum.genus(),
            multiplicities: self.profile.to_json(),
            compact: self
                .compact
                .iter()
                .map(|c| CompactJson {
                    chr: c.character.0.clone(),
                    conj: c.conjugate.0.clone(),
                    m: c.m,
                    m_conj: c.m_conjugate,
                })
                .collect(),
            witnesses: self
                .possible
                .feasible
                .iter()
                .map(|d| WitnessJson {
                    dim: *d,
                    identifications: self.possible.witnesses[d]
                        .iter()
                        .copied()
                        .filter(|c| c.blocks < c.count)
                        .collect(),
                })
                .collect(),
            warnings: self.warnings.clone(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let d = &self.datum;
        let _ = writeln!(out, "## {d}");
        let _ = writeln!(out);
        let _ = writeln!(out, "| quantity | value |");
        let _ = writeln!(out, "|---|---|");
        let _ = writeln!(out, "| genus | {} |", d.genus());
        let _ = writeln!(out, "| local orders | {:?} |", d.local_orders());
        let _ = writeln!(out, "| dim Z | {} |", self.dim_z);
        let _ = writeln!(out, "| dim S(G) | {} |", self.dim_sg);
        let _ = writeln!(out, "| ★ | {} |", self.star_holds);
        let _ = writeln!(out, "| factors | {} |", self.factors.summary());
        let _ = writeln!(out, "| possible dim S_f | {} |", join(&self.possible.all));
        let _ = writeln!(out, "| feasible dim S_f | {} |", join(&self.possible.feasible));
        let _ = writeln!(out, "| verdict | {} ({}) |", self.verdict.as_str(), self.decided_by().short());
        let _ = writeln!(out, "| S_f vs S(G) | {:?} |", self.sf_vs_sg);
        let nonzero: Vec<String> = self
            .profile
            .iter()
            .filter(|(_, m)| *m > 0)
            .map(|(c, m)| format!("m({c})={m}"))
            .collect();
        let _ = writeln!(out, "| multiplicities | {} |", nonzero.join(", "));
        if self.verdict == Verdict::Inconclusive {
            let _ = writeln!(out);
            for (dim, w) in &self.possible.witnesses {
                if !self.possible.feasible.contains(dim) {
                    continue;
                }
                let merged: Vec<String> = w
                    .iter()
                    .filter(|c| c.blocks < c.count)
                    .map(|c| format!("{} ×{} → {} block(s)", c.factor, c.count, c.blocks))
                    .collect();
                let how = if merged.is_empty() {
                    "no identification".to_string()
                } else {
                    merged.join("; ")
                };
                let _ = writeln!(out, "- dim S_f = {dim}: {how}");
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "\n> warning: {w}");
        }
        out
    }
}

fn join(set: &BTreeSet<u64>) -> String {
    let v: Vec<String> = set.iter().map(|d| d.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportJson {
    #[serde(rename = "dim_Z")]
    pub dim_z: u64,
    #[serde(rename = "dim_SG")]
    pub dim_sg: u64,
    pub star: bool,
    pub factors: Vec<FactorJson>,
    pub possible_sf_dims: PossibleDimsJson,
    pub verdict: Verdict,
    pub sf_vs_sg: SfVsSg,
    pub rules: Vec<Rule>,
    pub assertions: Vec<Assertion>,
    pub decided_by: Rule,
    pub group: Vec<u32>,
    pub theta: Vec<GroupElement>,
    pub genus: u64,
    pub multiplicities: Vec<MultiplicityJson>,
    pub compact: Vec<CompactJson>,
    pub witnesses: Vec<WitnessJson>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorJson {
    pub kind: &'static str,
    pub p: u32,
    pub q: u32,
    #[serde(rename = "char")]
    pub chr: Vec<u32>,
    pub delta: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PossibleDimsJson {
    pub all: Vec<u64>,
    pub feasible: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompactJson {
    #[serde(rename = "char")]
    pub chr: Vec<u32>,
    pub conj: Vec<u32>,
    pub m: u32,
    pub m_conj: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessJson {
    pub dim: u64,
    pub identifications: Vec<ClassBlocks>,
}

pub fn classify(
    datum: &ValidatedDatum,
    assertions: &BTreeSet<Assertion>,
) -> Result<ClassificationReport, HodgeError> {
    classify_with(datum, assertions, &ClassifierConfig::default())
}

pub fn classify_with(
    datum: &ValidatedDatum,
    assertions: &BTreeSet<Assertion>,
    config: &ClassifierConfig,
) -> Result<ClassificationReport, HodgeError> {
    let profile = eigenspace_multiplicities(datum)?;
    let fm = factors(&profile);
    let compact = compact_pairs(&profile);
    let dim_z = datum.dim_family();
    let dim_sg: u64 = fm.labels().map(|l| (config.delta)(&l)).sum();
    let star_holds = dim_z == dim_sg;
    let possible = possible_sf_dims(&fm, dim_z, config);
    let mut rules = Vec::new();
    let mut warnings = Vec::new();

    let decision = 'rules: {
        rules.push(Rule::Star);
        if star_holds {
            break 'rules (Verdict::Special, SfVsSg::Equal);
        }
        rules.push(Rule::TuttiDiversi);
        if tutti_diversi(&fm, config.equality) {
            break 'rules (Verdict::NotSpecial, SfVsSg::Equal);
        }
        rules.push(Rule::DimensionExclusion);
        if !possible.all.contains(&dim_z) {
            let only_full = possible.feasible.len() == 1 && possible.feasible.contains(&dim_sg);
            let rel = if only_full { SfVsSg::Equal } else { SfVsSg::Unknown };
            break 'rules (Verdict::NotSpecial, rel);
        }
        if assertions.contains(&Assertion::TotallyDecomposable) {
            rules.push(Rule::TotallyDecomposable);
            if decomposable_structure_check(&fm) {
                break 'rules (Verdict::NotSpecial, SfVsSg::Equal);
            }
            warnings.push(format!(
                "InvalidAssertion: totally_decomposable was asserted but the factors {} are not all SU(1,1)",
                fm.summary()
            ));
        }
        rules.push(Rule::Fallthrough);
        let rel = if possible.feasible.contains(&dim_z) && dim_z < dim_sg {
            SfVsSg::StrictlySmallerPossible
        } else {
            SfVsSg::Unknown
        };
        (Verdict::Inconclusive, rel)
    };

    if assertions.contains(&Assertion::TotallyDecomposable)
        && !decomposable_structure_check(&fm)
        && !rules.contains(&Rule::TotallyDecomposable)
    {
        warnings.push(format!(
            "InvalidAssertion: totally_decomposable was asserted but the factors {} are not all SU(1,1)",
            fm.summary()
        ));
    }

    Ok(ClassificationReport {
        datum: datum.clone(),
        profile,
        dim_z,
        dim_sg,
        star_holds,
        factors: fm,
        compact,
        possible,
        verdict: decision.0,
        sf_vs_sg: decision.1,
        rules,
        assertions: assertions.clone(),
        warnings,
    })
}
