//! Finite abelian groups presented as products of cyclic factors, together
//! with their elements, characters and automorphisms.
//!
//! Elements are residue vectors. Internally every element also has an
//! integer index: the mixed-radix number whose most significant digit is the
//! first residue, so index order coincides with lexicographic order on
//! residue vectors.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest group order for which automorphisms are enumerated by default.
pub const DEFAULT_MAX_AUT_GROUP_ORDER: usize = 512;

/// Largest automorphism group that will be materialized by default.
pub const DEFAULT_MAX_AUTOMORPHISMS: usize = 250_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("EmptyGroupSpec: a group needs at least one cyclic factor")]
    EmptyGroupSpec,
    #[error("OrderLessThanTwo: cyclic factor {index} has order {order}")]
    OrderLessThanTwo { index: usize, order: u32 },
    #[error("ElementShapeMismatch: expected {expected} residues, found {found}")]
    ElementShapeMismatch { expected: usize, found: usize },
    #[error("ResidueOutOfRange: residue {residue} in coordinate {index} is not reduced mod {modulus}")]
    ResidueOutOfRange { index: usize, residue: u32, modulus: u32 },
    #[error("GroupTooLargeForAutEnumeration: {reason}")]
    GroupTooLargeForAutEnumeration { reason: String },
}

/// Limits for brute-force automorphism enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AutBounds {
    pub max_group_order: usize,
    pub max_automorphisms: usize,
}

impl Default for AutBounds {
    fn default() -> Self {
        AutBounds {
            max_group_order: DEFAULT_MAX_AUT_GROUP_ORDER,
            max_automorphisms: DEFAULT_MAX_AUTOMORPHISMS,
        }
    }
}

impl AutBounds {
    /// Defaults, with `SCANNER_MAX_GROUP_ORDER` and `SCANNER_MAX_AUTOMORPHISMS`
    /// taken from the environment when set.
    pub fn from_env() -> Self {
        let mut bounds = AutBounds::default();
        if let Some(v) = read_env_usize("SCANNER_MAX_GROUP_ORDER") {
            bounds.max_group_order = v;
        }
        if let Some(v) = read_env_usize("SCANNER_MAX_AUTOMORPHISMS") {
            bounds.max_automorphisms = v;
        }
        bounds
    }
}

fn read_env_usize(key: &str) -> Option<usize> {
    std::env::var(key).ok().and_then(|v| v.trim().parse().ok())
}

/// The group Z/n₁ × … × Z/n_k, stored exactly as presented.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    orders: Vec<u32>,
    strides: Vec<usize>,
    order: usize,
    exponent: u32,
}

/// Residue vector (x₁,…,x_k) with 0 ≤ xᵢ < nᵢ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub Vec<u32>);

/// Character of an abelian group, given by its exponent vector. It sends x
/// to exp(2πi · Σ aᵢxᵢ/nᵢ).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Character(pub Vec<u32>);

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_vector(f, &self.0)
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "χ")?;
        write_vector(f, &self.0)
    }
}

fn write_vector(f: &mut fmt::Formatter<'_>, v: &[u32]) -> fmt::Result {
    write!(f, "[")?;
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, "]")
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.orders.iter().enumerate() {
            if i > 0 {
                write!(f, "×")?;
            }
            write!(f, "Z/{n}")?;
        }
        Ok(())
    }
}

impl AbelianGroup {
    pub fn new(cyclic_orders: &[u32]) -> Result<Self, GroupError> {
        if cyclic_orders.is_empty() {
            return Err(GroupError::EmptyGroupSpec);
        }
        if let Some((index, &order)) = cyclic_orders.iter().enumerate().find(|(_, &n)| n < 2) {
            return Err(GroupError::OrderLessThanTwo { index, order });
        }
        let mut strides = vec![1usize; cyclic_orders.len()];
        for i in (0..cyclic_orders.len() - 1).rev() {
            strides[i] = strides[i + 1] * cyclic_orders[i + 1] as usize;
        }
        let order = strides[0] * cyclic_orders[0] as usize;
        let exponent = cyclic_orders.iter().fold(1u32, |acc, &n| acc.lcm(&n));
        Ok(AbelianGroup {
            orders: cyclic_orders.to_vec(),
            strides,
            order,
            exponent,
        })
    }

    pub fn cyclic_orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Least common multiple of the cyclic orders.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    pub fn check_element(&self, x: &GroupElement) -> Result<(), GroupError> {
        self.check_vector(&x.0)
    }

    pub fn check_character(&self, chi: &Character) -> Result<(), GroupError> {
        self.check_vector(&chi.0)
    }

    fn check_vector(&self, v: &[u32]) -> Result<(), GroupError> {
        if v.len() != self.rank() {
            return Err(GroupError::ElementShapeMismatch {
                expected: self.rank(),
                found: v.len(),
            });
        }
        for (index, (&residue, &modulus)) in v.iter().zip(&self.orders).enumerate() {
            if residue >= modulus {
                return Err(GroupError::ResidueOutOfRange {
                    index,
                    residue,
                    modulus,
                });
            }
        }
        Ok(())
    }

    /// Reduces an arbitrary integer vector componentwise.
    pub fn reduce(&self, v: &[i64]) -> Result<GroupElement, GroupError> {
        if v.len() != self.rank() {
            return Err(GroupError::ElementShapeMismatch {
                expected: self.rank(),
                found: v.len(),
            });
        }
        Ok(GroupElement(
            v.iter()
                .zip(&self.orders)
                .map(|(&x, &n)| x.rem_euclid(n as i64) as u32)
                .collect(),
        ))
    }

    // Index-level arithmetic. Callers guarantee indices are < order.

    pub(crate) fn encode(&self, v: &[u32]) -> usize {
        v.iter()
            .zip(&self.strides)
            .map(|(&x, &s)| x as usize * s)
            .sum()
    }

    pub(crate) fn decode(&self, index: usize) -> Vec<u32> {
        self.strides
            .iter()
            .zip(&self.orders)
            .map(|(&s, &n)| ((index / s) % n as usize) as u32)
            .collect()
    }

    pub(crate) fn coordinate(&self, index: usize, i: usize) -> u32 {
        ((index / self.strides[i]) % self.orders[i] as usize) as u32
    }

    pub(crate) fn add_index(&self, a: usize, b: usize) -> usize {
        let mut out = 0;
        for i in 0..self.rank() {
            let n = self.orders[i];
            let x = (self.coordinate(a, i) + self.coordinate(b, i)) % n;
            out += x as usize * self.strides[i];
        }
        out
    }

    pub(crate) fn neg_index(&self, a: usize) -> usize {
        let mut out = 0;
        for i in 0..self.rank() {
            let n = self.orders[i];
            let x = (n - self.coordinate(a, i)) % n;
            out += x as usize * self.strides[i];
        }
        out
    }

    pub(crate) fn scale_index(&self, a: usize, k: u64) -> usize {
        let mut out = 0;
        for i in 0..self.rank() {
            let n = self.orders[i] as u64;
            let x = (self.coordinate(a, i) as u64 * (k % n)) % n;
            out += x as usize * self.strides[i];
        }
        out
    }

    pub(crate) fn order_of_index(&self, a: usize) -> u32 {
        (0..self.rank()).fold(1u32, |acc, i| {
            let n = self.orders[i];
            acc.lcm(&(n / n.gcd(&self.coordinate(a, i))))
        })
    }

    /// Index of the i-th standard generator.
    pub(crate) fn generator_index(&self, i: usize) -> usize {
        self.strides[i]
    }

    pub fn element(&self, index: usize) -> GroupElement {
        GroupElement(self.decode(index))
    }

    pub fn index_of(&self, x: &GroupElement) -> Result<usize, GroupError> {
        self.check_element(x)?;
        Ok(self.encode(&x.0))
    }

    /// All elements in lexicographic order, identity first.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(move |i| self.element(i))
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement, GroupError> {
        let a = self.index_of(x)?;
        let b = self.index_of(y)?;
        Ok(self.element(self.add_index(a, b)))
    }

    pub fn neg(&self, x: &GroupElement) -> Result<GroupElement, GroupError> {
        Ok(self.element(self.neg_index(self.index_of(x)?)))
    }

    /// Least d ≥ 1 with d·x = 0.
    pub fn element_order(&self, x: &GroupElement) -> Result<u32, GroupError> {
        Ok(self.order_of_index(self.index_of(x)?))
    }

    /// All characters, enumerated like elements (trivial character first).
    pub fn characters(&self) -> Vec<Character> {
        (0..self.order).map(|i| Character(self.decode(i))).collect()
    }

    pub fn trivial_character(&self) -> Character {
        Character(vec![0; self.rank()])
    }

    /// χ(x) written as e^{2πi·r}; returns the exact r ∈ [0, 1).
    pub fn char_fraction(&self, chi: &Character, x: &GroupElement) -> Result<Ratio<u64>, GroupError> {
        self.check_character(chi)?;
        self.check_element(x)?;
        let num = self.char_numerator(&chi.0, &x.0);
        Ok(Ratio::new(num as u64, self.exponent as u64))
    }

    /// Numerator of χ(x) over the group exponent, in [0, exponent).
    pub(crate) fn char_numerator(&self, chi: &[u32], x: &[u32]) -> u32 {
        let e = self.exponent as u64;
        let mut acc = 0u64;
        for ((&a, &xi), &n) in chi.iter().zip(x).zip(&self.orders) {
            let scale = e / n as u64;
            acc = (acc + (a as u64 * xi as u64 % n as u64) * scale) % e;
        }
        acc as u32
    }

    pub fn conjugate(&self, chi: &Character) -> Character {
        Character(
            chi.0
                .iter()
                .zip(&self.orders)
                .map(|(&a, &n)| (n - a % n) % n)
                .collect(),
        )
    }

    pub fn is_self_conjugate(&self, chi: &Character) -> bool {
        self.conjugate(chi) == *chi
    }

    /// Product χ·χ′ in the dual group.
    pub fn char_product(&self, chi: &Character, psi: &Character) -> Character {
        Character(
            chi.0
                .iter()
                .zip(&psi.0)
                .zip(&self.orders)
                .map(|((&a, &b), &n)| (a + b) % n)
                .collect(),
        )
    }

    /// Membership table of the subgroup generated by `gens` (indices).
    pub(crate) fn subgroup_closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut member = vec![false; self.order];
        member[0] = true;
        let mut elems = vec![0usize];
        for &g in gens {
            if member[g] {
                continue;
            }
            // H + <g> = union of cosets H + t·g.
            let base = elems.clone();
            let mut step = g;
            while !member[step] {
                for &h in &base {
                    let y = self.add_index(h, step);
                    if !member[y] {
                        member[y] = true;
                        elems.push(y);
                    }
                }
                step = self.add_index(step, g);
            }
        }
        member
    }

    /// True iff the given elements generate the whole group.
    pub fn generated_by(&self, xs: &[GroupElement]) -> Result<bool, GroupError> {
        let idx = xs
            .iter()
            .map(|x| self.index_of(x))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.subgroup_closure(&idx).iter().all(|&m| m))
    }

    /// Primes dividing the group order, ascending.
    pub(crate) fn prime_divisors(&self) -> Vec<u32> {
        let mut n = self.order as u32;
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                out.push(p);
                while n.is_multiple_of(p) {
                    n /= p;
                }
            }
            p += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    /// Minimal number of generators of G/H, where H is given by membership.
    ///
    /// This is the largest p-rank of the quotient, computed as
    /// log_p |G / (H + pG)| over the primes p dividing |G|.
    pub(crate) fn quotient_generator_count(&self, subgroup: &[bool]) -> u32 {
        let h: Vec<usize> = (0..self.order).filter(|&i| subgroup[i]).collect();
        let mut best = 0;
        for p in self.prime_divisors() {
            let mut gens = h.clone();
            gens.extend((0..self.rank()).map(|i| self.scale_index(self.generator_index(i), p as u64)));
            let size = self.subgroup_closure(&gens).iter().filter(|&&m| m).count();
            let mut index = self.order / size;
            let mut rank = 0;
            while index > 1 {
                index /= p as usize;
                rank += 1;
            }
            best = best.max(rank);
        }
        best
    }

    /// Minimal number of generators of G.
    pub fn min_generators(&self) -> u32 {
        let mut trivial = vec![false; self.order];
        trivial[0] = true;
        self.quotient_generator_count(&trivial)
    }
}

/// An automorphism, stored as the images of the standard generators plus a
/// lookup table on element indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Automorphism {
    images: Vec<GroupElement>,
    table: Vec<u32>,
}

impl Automorphism {
    pub fn generator_images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn apply(&self, group: &AbelianGroup, x: &GroupElement) -> Result<GroupElement, GroupError> {
        Ok(group.element(self.table[group.index_of(x)?] as usize))
    }

    pub(crate) fn apply_index(&self, i: usize) -> usize {
        self.table[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &t)| t as usize == i)
    }
}

/// The full automorphism group with the identity first.
///
/// Generator images are searched exhaustively: the image of the j-th
/// generator must have order nⱼ and meet the subgroup generated by the
/// earlier images trivially, which is exactly injectivity.
pub fn automorphisms(group: &AbelianGroup, bounds: &AutBounds) -> Result<Vec<Automorphism>, GroupError> {
    if group.order() > bounds.max_group_order {
        return Err(GroupError::GroupTooLargeForAutEnumeration {
            reason: format!(
                "|G| = {} exceeds the bound {}",
                group.order(),
                bounds.max_group_order
            ),
        });
    }
    let by_order: Vec<Vec<usize>> = group
        .cyclic_orders()
        .iter()
        .map(|&n| (0..group.order()).filter(|&i| group.order_of_index(i) == n).collect())
        .collect();
    let mut found = Vec::new();
    let mut images = Vec::with_capacity(group.rank());
    let mut member = vec![false; group.order()];
    member[0] = true;
    search_images(group, &by_order, &mut images, &member, &mut found, bounds)?;

    if let Some(pos) = found.iter().position(|a: &Automorphism| a.is_identity()) {
        let id = found.remove(pos);
        found.insert(0, id);
    }
    Ok(found)
}

fn search_images(
    group: &AbelianGroup,
    by_order: &[Vec<usize>],
    images: &mut Vec<usize>,
    member: &[bool],
    found: &mut Vec<Automorphism>,
    bounds: &AutBounds,
) -> Result<(), GroupError> {
    let j = images.len();
    if j == group.rank() {
        if found.len() >= bounds.max_automorphisms {
            return Err(GroupError::GroupTooLargeForAutEnumeration {
                reason: format!(
                    "more than {} automorphisms for {}",
                    bounds.max_automorphisms, group
                ),
            });
        }
        found.push(build_automorphism(group, images));
        return Ok(());
    }
    let n = group.cyclic_orders()[j];
    for &c in &by_order[j] {
        // <c> ∩ H must be trivial.
        let mut step = c;
        let mut clash = false;
        for _ in 1..n {
            if member[step] {
                clash = true;
                break;
            }
            step = group.add_index(step, c);
        }
        if clash {
            continue;
        }
        let mut next = member.to_vec();
        let base: Vec<usize> = (0..group.order()).filter(|&i| member[i]).collect();
        let mut mult = c;
        for _ in 1..n {
            for &h in &base {
                next[group.add_index(h, mult)] = true;
            }
            mult = group.add_index(mult, c);
        }
        images.push(c);
        search_images(group, by_order, images, &next, found, bounds)?;
        images.pop();
    }
    Ok(())
}

fn build_automorphism(group: &AbelianGroup, images: &[usize]) -> Automorphism {
    let table = (0..group.order())
        .map(|i| {
            let mut out = 0usize;
            for (j, &img) in images.iter().enumerate() {
                let coeff = group.coordinate(i, j) as u64;
                if coeff != 0 {
                    out = group.add_index(out, group.scale_index(img, coeff));
                }
            }
            out as u32
        })
        .collect();
    Automorphism {
        images: images.iter().map(|&i| group.element(i)).collect(),
        table,
    }
}

/// A group together with its character list and automorphism group, built
/// once and shared read-only by every search over that group.
#[derive(Clone, Debug)]
pub struct GroupTables {
    group: AbelianGroup,
    characters: Vec<Character>,
    automorphisms: Vec<Automorphism>,
    min_generators: u32,
}

impl GroupTables {
    pub fn new(group: AbelianGroup, bounds: &AutBounds) -> Result<Self, GroupError> {
        let automorphisms = automorphisms(&group, bounds)?;
        Ok(GroupTables {
            characters: group.characters(),
            min_generators: group.min_generators(),
            group,
            automorphisms,
        })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn characters(&self) -> &[Character] {
        &self.characters
    }

    pub fn automorphisms(&self) -> &[Automorphism] {
        &self.automorphisms
    }

    pub fn min_generators(&self) -> u32 {
        self.min_generators
    }
}
