//! Built-in regression vectors: four worked families with every published
//! quantity, checked end to end against the classifier.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use crate::classify::{classify_with, ClassificationReport, ClassifierConfig, Rule, SfVsSg, Verdict};
use crate::group::Character;
use crate::hodge::{factor_at, FactorLabel};
use crate::monodromy::{MonodromyDatum, ValidatedDatum};
use crate::scan::ScanRow;

const SU11: FactorLabel = FactorLabel::ComplexPair { p: 1, q: 1 };
const SU12: FactorLabel = FactorLabel::ComplexPair { p: 1, q: 2 };
const SP4: FactorLabel = FactorLabel::Symplectic { m: 2 };

/// A worked family with its expected invariants.
#[derive(Debug, Clone)]
pub struct PaperExample {
    pub name: &'static str,
    pub orders: &'static [u32],
    pub theta: &'static [&'static [u32]],
    pub genus: u64,
    pub local_orders: &'static [u32],
    /// Factor attached to χ_g for the listed g; `None` is a compact or trivial factor.
    pub mon: &'static [(&'static [u32], Option<FactorLabel>)],
    pub factors: &'static [FactorLabel],
    pub dim_z: u64,
    pub dim_sg: u64,
    /// Smallest dimension S_f can have.
    pub min_sf_dim: Option<u64>,
    pub possible_all: Option<&'static [u64]>,
    pub feasible: Option<&'static [u64]>,
    pub verdict: Verdict,
    pub sf_vs_sg: SfVsSg,
    pub decided_by: Rule,
    /// Class that the identification witnessing dim Z must merge.
    pub witness_class: Option<FactorLabel>,
}

pub fn paper_examples() -> Vec<PaperExample> {
    vec![
        PaperExample {
            name: "example-1",
            orders: &[6],
            theta: &[&[3], &[3], &[3], &[4], &[5]],
            genus: 4,
            local_orders: &[2, 2, 2, 3, 6],
            mon: &[(&[1], Some(SU12)), (&[2], None), (&[3], Some(SU11))],
            factors: &[SU12, SU11],
            dim_z: 2,
            dim_sg: 3,
            min_sf_dim: None,
            possible_all: None,
            feasible: None,
            verdict: Verdict::NotSpecial,
            sf_vs_sg: SfVsSg::Equal,
            decided_by: Rule::TuttiDiversi,
            witness_class: None,
        },
        PaperExample {
            name: "example-2",
            orders: &[2, 2, 2],
            theta: &[&[0, 1, 0], &[0, 1, 0], &[0, 1, 0], &[1, 1, 0], &[1, 1, 1], &[0, 1, 1]],
            genus: 5,
            local_orders: &[2, 2, 2, 2, 2, 2],
            mon: &[
                (&[1, 0, 0], None),
                (&[0, 1, 0], Some(SP4)),
                (&[0, 0, 1], None),
                (&[1, 1, 0], Some(SU11)),
                (&[1, 0, 1], None),
                (&[0, 1, 1], Some(SU11)),
                (&[1, 1, 1], Some(SU11)),
            ],
            factors: &[SP4, SU11, SU11, SU11],
            dim_z: 3,
            dim_sg: 6,
            min_sf_dim: Some(4),
            possible_all: None,
            feasible: Some(&[4, 5, 6]),
            verdict: Verdict::NotSpecial,
            sf_vs_sg: SfVsSg::Unknown,
            decided_by: Rule::DimensionExclusion,
            witness_class: None,
        },
        PaperExample {
            name: "example-3",
            orders: &[2, 2],
            theta: &[&[0, 1], &[1, 0], &[1, 0], &[1, 0], &[1, 1], &[1, 0], &[1, 0]],
            genus: 4,
            local_orders: &[2, 2, 2, 2, 2, 2, 2],
            mon: &[(&[1, 0], Some(SP4)), (&[0, 1], None), (&[1, 1], Some(SP4))],
            factors: &[SP4, SP4],
            dim_z: 4,
            dim_sg: 6,
            min_sf_dim: Some(3),
            possible_all: Some(&[3, 6]),
            feasible: Some(&[6]),
            verdict: Verdict::NotSpecial,
            sf_vs_sg: SfVsSg::Equal,
            decided_by: Rule::DimensionExclusion,
            witness_class: None,
        },
        PaperExample {
            name: "example-4",
            orders: &[2, 2],
            theta: &[&[0, 1], &[1, 0], &[0, 1], &[1, 0], &[1, 1], &[1, 0], &[0, 1]],
            genus: 4,
            local_orders: &[2, 2, 2, 2, 2, 2, 2],
            mon: &[(&[1, 0], Some(SU11)), (&[0, 1], Some(SU11)), (&[1, 1], Some(SP4))],
            factors: &[SU11, SU11, SP4],
            dim_z: 4,
            dim_sg: 5,
            min_sf_dim: None,
            possible_all: None,
            feasible: Some(&[4, 5]),
            verdict: Verdict::Inconclusive,
            sf_vs_sg: SfVsSg::StrictlySmallerPossible,
            decided_by: Rule::Fallthrough,
            witness_class: Some(SU11),
        },
    ]
}

impl PaperExample {
    pub fn datum(&self) -> MonodromyDatum {
        MonodromyDatum::from_parts(self.orders, self.theta).expect("built-in datum is well formed")
    }

    pub fn validated(&self) -> ValidatedDatum {
        self.datum().validate().expect("built-in datum is valid")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub example: &'static str,
    pub quantity: String,
    pub expected: String,
    pub actual: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn examples(&self) -> Vec<&'static str> {
        let mut names: Vec<&'static str> = Vec::new();
        for c in &self.checks {
            if !names.contains(&c.example) {
                names.push(c.example);
            }
        }
        names
    }

    pub fn example_passed(&self, name: &str) -> bool {
        self.checks.iter().filter(|c| c.example == name).all(Check::passed)
    }

    pub fn failed_examples(&self) -> Vec<&'static str> {
        self.examples().into_iter().filter(|n| !self.example_passed(n)).collect()
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.examples();
        for name in &names {
            let ok = self.example_passed(name);
            writeln!(f, "{} {name}", if ok { "PASS" } else { "FAIL" })?;
            for c in self.checks.iter().filter(|c| c.example == *name && !c.passed()) {
                writeln!(f, "  {}: expected {}, got {}", c.quantity, c.expected, c.actual)?;
            }
        }
        let passed = names.iter().filter(|n| self.example_passed(n)).count();
        writeln!(f, "{passed}/{} examples pass", names.len())
    }
}

fn fmt_set(v: impl IntoIterator<Item = u64>) -> String {
    let parts: Vec<String> = v.into_iter().map(|d| d.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn fmt_labels(mut v: Vec<FactorLabel>) -> String {
    v.sort();
    let parts: Vec<String> = v.iter().map(|l| l.to_string()).collect();
    parts.join("+")
}

fn fmt_factor(l: Option<FactorLabel>) -> String {
    l.map_or_else(|| "{1}".to_string(), |l| l.to_string())
}

fn check_example(ex: &PaperExample, config: &ClassifierConfig, out: &mut Vec<Check>) {
    let mut push = |quantity: &str, expected: String, actual: String| {
        out.push(Check {
            example: ex.name,
            quantity: quantity.to_string(),
            expected,
            actual,
        })
    };
    let datum = match ex.datum().validate() {
        Ok(d) => d,
        Err(e) => {
            push("validation", "valid".into(), e.to_string());
            return;
        }
    };
    let report: ClassificationReport = match classify_with(&datum, &BTreeSet::new(), config) {
        Ok(r) => r,
        Err(e) => {
            push("classification", "ok".into(), e.to_string());
            return;
        }
    };

    push("genus", ex.genus.to_string(), datum.genus().to_string());
    push("s", ex.theta.len().to_string(), datum.s().to_string());
    push("local orders", format!("{:?}", ex.local_orders), format!("{:?}", datum.local_orders()));
    for (g, expected) in ex.mon {
        let chi = Character(g.to_vec());
        push(
            &format!("factor at χ{g:?}"),
            fmt_factor(*expected),
            fmt_factor(factor_at(&report.profile, &chi)),
        );
    }
    push("factors", fmt_labels(ex.factors.to_vec()), fmt_labels(report.factors.labels().collect()));
    push("dim_Z", ex.dim_z.to_string(), report.dim_z.to_string());
    push("dim_SG", ex.dim_sg.to_string(), report.dim_sg.to_string());
    push("star", (ex.dim_z == ex.dim_sg).to_string(), report.star_holds.to_string());
    if let Some(min) = ex.min_sf_dim {
        let actual = report.possible.all.first().copied().unwrap_or(0);
        push("min dim S_f", min.to_string(), actual.to_string());
        push("dim_Z < min dim S_f", (ex.dim_z < min).to_string(), (report.dim_z < actual).to_string());
    }
    if let Some(all) = ex.possible_all {
        push("possible S_f dims", fmt_set(all.iter().copied()), fmt_set(report.possible.all.iter().copied()));
    }
    if let Some(feasible) = ex.feasible {
        push(
            "feasible S_f dims",
            fmt_set(feasible.iter().copied()),
            fmt_set(report.possible.feasible.iter().copied()),
        );
    }
    push("verdict", ex.verdict.as_str().into(), report.verdict.as_str().into());
    push("sf_vs_sg", format!("{:?}", ex.sf_vs_sg), format!("{:?}", report.sf_vs_sg));
    push("decided by", ex.decided_by.short().into(), report.decided_by().short().into());
    if let Some(class) = ex.witness_class {
        let merged: Vec<String> = report
            .possible
            .witnesses
            .get(&report.dim_z)
            .map(|w| {
                w.iter()
                    .filter(|c| c.blocks < c.count)
                    .map(|c| c.factor.to_string())
                    .collect()
            })
            .unwrap_or_default();
        push("witness identifies", class.to_string(), merged.join("+"));
    }
}

/// Runs every built-in example through `config` and records each comparison.
pub fn verify_paper(config: &ClassifierConfig) -> Verification {
    let mut checks = Vec::new();
    for ex in paper_examples() {
        check_example(&ex, config, &mut checks);
    }
    Verification { checks }
}

/// The four examples as scan rows, in their published order.
pub fn paper_rows() -> Vec<ScanRow> {
    paper_examples()
        .iter()
        .map(|ex| {
            let report = classify_with(&ex.validated(), &BTreeSet::new(), &ClassifierConfig::default())
                .expect("built-in datum classifies");
            ScanRow::from_report(&report)
        })
        .collect()
}

/// Plain-text listing used by `verify-paper --verbose`.
pub fn render_all_checks(v: &Verification) -> String {
    let mut s = String::new();
    for c in &v.checks {
        let mark = if c.passed() { "ok " } else { "BAD" };
        let _ = writeln!(s, "{mark} {} {}: {}", c.example, c.quantity, c.actual);
    }
    s
}
