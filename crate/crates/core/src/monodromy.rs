//! Monodromy data (G, Θ) of abelian covers of the projective line.
//!
//! A datum is a tuple θ₁,…,θ_s of nonzero elements summing to zero and
//! generating G. Two data describe the same family when they differ by a
//! permutation of the branch points and an automorphism of G; the canonical
//! representative of a class is the lexicographically least tuple in its
//! orbit.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{AbelianGroup, Automorphism, GroupElement, GroupError, GroupTables};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonodromyError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("IdentityBranchElement: θ_{index} is the identity")]
    IdentityBranchElement { index: usize },
    #[error("MonodromySumNonzero: Σθᵢ = {sum}, expected the identity")]
    MonodromySumNonzero { sum: GroupElement },
    #[error("NotGenerating: Θ generates a subgroup of order {generated} in a group of order {order}")]
    NotGenerating { generated: usize, order: usize },
    #[error("TooFewBranchPoints: s = {s}, at least 4 branch points are needed")]
    TooFewBranchPoints { s: usize },
    #[error("GenusBelowTwo: the cover has genus {genus}")]
    GenusBelowTwo { genus: i64 },
    #[error("MalformedDatum: {0}")]
    Malformed(String),
}

/// JSON interchange form: `{"group": [n1,...], "theta": [[x1,...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumJson {
    pub group: Vec<u32>,
    pub theta: Vec<Vec<u32>>,
}

/// Unchecked monodromy datum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonodromyDatum {
    pub group: AbelianGroup,
    pub theta: Vec<GroupElement>,
}

impl MonodromyDatum {
    pub fn new(group: AbelianGroup, theta: Vec<GroupElement>) -> Self {
        MonodromyDatum { group, theta }
    }

    /// Convenience constructor from raw orders and residue vectors.
    pub fn from_parts(orders: &[u32], theta: &[&[u32]]) -> Result<Self, MonodromyError> {
        let group = AbelianGroup::new(orders)?;
        let theta = theta.iter().map(|x| GroupElement(x.to_vec())).collect();
        Ok(MonodromyDatum { group, theta })
    }

    pub fn from_json_value(json: &DatumJson) -> Result<Self, MonodromyError> {
        let group = AbelianGroup::new(&json.group)?;
        let theta = json.theta.iter().cloned().map(GroupElement).collect();
        Ok(MonodromyDatum { group, theta })
    }

    pub fn from_json(text: &str) -> Result<Self, MonodromyError> {
        let json: DatumJson =
            serde_json::from_str(text).map_err(|e| MonodromyError::Malformed(e.to_string()))?;
        Self::from_json_value(&json)
    }

    pub fn to_json_value(&self) -> DatumJson {
        DatumJson {
            group: self.group.cyclic_orders().to_vec(),
            theta: self.theta.iter().map(|x| x.0.clone()).collect(),
        }
    }

    pub fn s(&self) -> usize {
        self.theta.len()
    }

    /// Checks everything except the genus bound and returns the local orders
    /// together with the Riemann–Hurwitz genus.
    pub fn check_structure(&self) -> Result<(Vec<u32>, i64), MonodromyError> {
        let g = &self.group;
        let mut idx = Vec::with_capacity(self.s());
        for x in &self.theta {
            idx.push(g.index_of(x)?);
        }
        if let Some(index) = idx.iter().position(|&i| i == 0) {
            return Err(MonodromyError::IdentityBranchElement { index: index + 1 });
        }
        let sum = idx.iter().fold(0, |acc, &i| g.add_index(acc, i));
        if sum != 0 {
            return Err(MonodromyError::MonodromySumNonzero { sum: g.element(sum) });
        }
        let generated = g.subgroup_closure(&idx).iter().filter(|&&m| m).count();
        if generated != g.order() {
            return Err(MonodromyError::NotGenerating {
                generated,
                order: g.order(),
            });
        }
        if self.s() < 4 {
            return Err(MonodromyError::TooFewBranchPoints { s: self.s() });
        }
        let local_orders: Vec<u32> = idx.iter().map(|&i| g.order_of_index(i)).collect();
        let genus = riemann_hurwitz_genus(g.order(), &local_orders);
        Ok((local_orders, genus))
    }

    pub fn validate(&self) -> Result<ValidatedDatum, MonodromyError> {
        let (local_orders, genus) = self.check_structure()?;
        if genus < 2 {
            return Err(MonodromyError::GenusBelowTwo { genus });
        }
        Ok(ValidatedDatum {
            group: self.group.clone(),
            theta: self.theta.clone(),
            local_orders,
            genus: genus as u64,
        })
    }
}

/// Genus of a G-cover of the line with the given local monodromy orders:
/// 2g − 2 = −2|G| + Σᵢ (|G|/mᵢ)(mᵢ − 1).
pub fn riemann_hurwitz_genus(group_order: usize, local_orders: &[u32]) -> i64 {
    let n = group_order as i64;
    let ramification: i64 = local_orders
        .iter()
        .map(|&m| (n / m as i64) * (m as i64 - 1))
        .sum();
    let twice = -2 * n + ramification + 2;
    debug_assert!(twice % 2 == 0, "Riemann–Hurwitz gave an odd 2g");
    twice / 2
}

/// A datum satisfying every invariant, with genus ≥ 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValidatedDatum {
    group: AbelianGroup,
    theta: Vec<GroupElement>,
    local_orders: Vec<u32>,
    genus: u64,
}

impl ValidatedDatum {
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn theta(&self) -> &[GroupElement] {
        &self.theta
    }

    /// Orders of the θᵢ.
    pub fn local_orders(&self) -> &[u32] {
        &self.local_orders
    }

    pub fn genus(&self) -> u64 {
        self.genus
    }

    pub fn s(&self) -> usize {
        self.theta.len()
    }

    /// Dimension of the family, s − 3.
    pub fn dim_family(&self) -> u64 {
        self.s() as u64 - 3
    }

    pub fn to_datum(&self) -> MonodromyDatum {
        MonodromyDatum::new(self.group.clone(), self.theta.clone())
    }

    pub fn to_json_value(&self) -> DatumJson {
        self.to_datum().to_json_value()
    }

    pub(crate) fn theta_indices(&self) -> Vec<usize> {
        self.theta.iter().map(|x| self.group.encode(&x.0)).collect()
    }

    /// The same datum with Θ permuted; `perm[i]` is the source position of
    /// the new i-th entry.
    pub fn permuted(&self, perm: &[usize]) -> ValidatedDatum {
        let theta: Vec<_> = perm.iter().map(|&i| self.theta[i].clone()).collect();
        let local_orders = perm.iter().map(|&i| self.local_orders[i]).collect();
        ValidatedDatum {
            group: self.group.clone(),
            theta,
            local_orders,
            genus: self.genus,
        }
    }

    /// Image of the datum under a group automorphism.
    pub fn mapped(&self, aut: &Automorphism) -> ValidatedDatum {
        let theta = self
            .theta_indices()
            .into_iter()
            .map(|i| self.group.element(aut.apply_index(i)))
            .collect();
        ValidatedDatum {
            group: self.group.clone(),
            theta,
            local_orders: self.local_orders.clone(),
            genus: self.genus,
        }
    }

    /// Lexicographically least representative of the S_s × Aut(G) orbit.
    /// `automorphisms` must be the full automorphism group of the datum's group.
    pub fn canonical_form(&self, automorphisms: &[Automorphism]) -> ValidatedDatum {
        let key = canonical_key(&self.theta_indices(), automorphisms);
        from_indices(&self.group, &key, self.genus)
    }

    /// Like [`ValidatedDatum::canonical_form`], enumerating Aut(G) itself.
    pub fn canonical_form_with_bounds(
        &self,
        bounds: &crate::group::AutBounds,
    ) -> Result<ValidatedDatum, MonodromyError> {
        let auts = crate::group::automorphisms(&self.group, bounds)?;
        Ok(self.canonical_form(&auts))
    }
}

impl fmt::Display for ValidatedDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}; Θ=(", self.group)?;
        for (i, x) in self.theta.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

fn from_indices(group: &AbelianGroup, idx: &[usize], genus: u64) -> ValidatedDatum {
    ValidatedDatum {
        group: group.clone(),
        theta: idx.iter().map(|&i| group.element(i)).collect(),
        local_orders: idx.iter().map(|&i| group.order_of_index(i)).collect(),
        genus,
    }
}

/// min over α ∈ Aut(G) of sort(α(Θ)), on element indices.
pub(crate) fn canonical_key(theta: &[usize], automorphisms: &[Automorphism]) -> Vec<usize> {
    let mut best: Option<Vec<usize>> = None;
    let mut buf = vec![0usize; theta.len()];
    for aut in automorphisms {
        for (b, &t) in buf.iter_mut().zip(theta) {
            *b = aut.apply_index(t);
        }
        buf.sort_unstable();
        if best.as_ref().is_none_or(|cur| buf < *cur) {
            best = Some(buf.clone());
        }
    }
    best.unwrap_or_else(|| {
        let mut v = theta.to_vec();
        v.sort_unstable();
        v
    })
}

/// One representative per equivalence class of data on `s` branch points
/// whose cover has genus ≥ 2, in increasing canonical order.
pub fn enumerate_data(
    tables: &GroupTables,
    s: usize,
) -> Result<impl Iterator<Item = ValidatedDatum> + '_, MonodromyError> {
    let iter = ClassIter::new(tables, s)?;
    let group = tables.group();
    Ok(iter.filter_map(move |idx| {
        let orders: Vec<u32> = idx.iter().map(|&i| group.order_of_index(i)).collect();
        let genus = riemann_hurwitz_genus(group.order(), &orders);
        (genus >= 2).then(|| from_indices(group, &idx, genus as u64))
    }))
}

/// Like [`enumerate_data`] but without the genus bound: every class of data
/// satisfying the structural invariants, paired with its genus (which may be 1).
pub fn enumerate_structural(
    tables: &GroupTables,
    s: usize,
) -> Result<impl Iterator<Item = (MonodromyDatum, i64)> + '_, MonodromyError> {
    let iter = ClassIter::new(tables, s)?;
    let group = tables.group();
    Ok(iter.map(move |idx| {
        let orders: Vec<u32> = idx.iter().map(|&i| group.order_of_index(i)).collect();
        let genus = riemann_hurwitz_genus(group.order(), &orders);
        let theta = idx.iter().map(|&i| group.element(i)).collect();
        (MonodromyDatum::new(group.clone(), theta), genus)
    }))
}

/// Depth-first search over nondecreasing tuples of nonzero elements.
///
/// A prefix P is abandoned when some automorphism α has sort(α(P)) < P (no
/// extension can then be canonical), or when the elements still to be chosen
/// cannot complete P to a generating set. The last entry is forced by the
/// zero-sum condition.
struct ClassIter<'a> {
    tables: &'a GroupTables,
    s: usize,
    prefix: Vec<usize>,
    sums: Vec<usize>,
    cursor: Vec<usize>,
    scratch: Vec<usize>,
    finished: bool,
}

impl<'a> ClassIter<'a> {
    fn new(tables: &'a GroupTables, s: usize) -> Result<Self, MonodromyError> {
        if s < 4 {
            return Err(MonodromyError::TooFewBranchPoints { s });
        }
        Ok(ClassIter {
            tables,
            s,
            prefix: Vec::with_capacity(s),
            sums: vec![0],
            cursor: vec![1],
            scratch: Vec::with_capacity(s),
            finished: false,
        })
    }

    fn backtrack(&mut self) {
        self.cursor.pop();
        if self.prefix.pop().is_none() {
            self.finished = true;
        } else {
            self.sums.pop();
        }
    }

    /// True iff no automorphism maps `tuple` (sorted) to a smaller sorted tuple.
    fn is_minimal(&mut self, tuple: &[usize]) -> bool {
        let buf = &mut self.scratch;
        for aut in self.tables.automorphisms().iter().skip(1) {
            buf.clear();
            let mut below = false;
            for &t in tuple {
                let img = aut.apply_index(t);
                if img < tuple[0] {
                    below = true;
                    break;
                }
                buf.push(img);
            }
            if below {
                return false;
            }
            buf.sort_unstable();
            if buf.as_slice() < tuple {
                return false;
            }
        }
        true
    }

    fn can_still_generate(&self, tuple: &[usize], free_slots: usize) -> bool {
        if free_slots >= self.tables.min_generators() as usize {
            return true;
        }
        let group = self.tables.group();
        let member = group.subgroup_closure(tuple);
        group.quotient_generator_count(&member) as usize <= free_slots
    }
}

impl Iterator for ClassIter<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let tables = self.tables;
        let group = tables.group();
        let order = group.order();
        loop {
            if self.finished {
                return None;
            }
            let k = self.prefix.len();
            if k + 1 == self.s {
                let last = group.neg_index(self.sums[k]);
                let mut found = None;
                if last != 0 && last >= self.prefix[k - 1] {
                    let mut full = self.prefix.clone();
                    full.push(last);
                    if self.can_still_generate(&full, 0) && self.is_minimal(&full) {
                        found = Some(full);
                    }
                }
                self.backtrack();
                if found.is_some() {
                    return found;
                }
                continue;
            }
            // Choose slot k; after it, s − k − 1 slots remain, the last forced.
            let free = self.s - k - 2;
            let mut chosen = None;
            let mut candidate = self.prefix.clone();
            candidate.push(0);
            for c in self.cursor[k]..order {
                candidate[k] = c;
                if self.can_still_generate(&candidate, free) && self.is_minimal(&candidate) {
                    chosen = Some(c);
                    break;
                }
            }
            match chosen {
                Some(c) => {
                    self.cursor[k] = c + 1;
                    self.prefix.push(c);
                    self.sums.push(group.add_index(self.sums[k], c));
                    self.cursor.push(c);
                }
                None => self.backtrack(),
            }
        }
    }
}
