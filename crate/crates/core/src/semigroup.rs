//! Finite semigroups given by Cayley tables.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Largest order accepted by [`FiniteSemigroup`]; subsets are `u64` bitmasks
/// and ideal searches are exhaustive over subsets.
pub const MAX_ORDER: usize = 16;

/// Largest order [`enumerate_small`] will walk.
pub const MAX_ENUMERATION_ORDER: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemigroupError {
    #[error("operation is not associative: ({x}·{y})·{z} ≠ {x}·({y}·{z})")]
    NonAssociative { x: usize, y: usize, z: usize },
    #[error("table entry at row {row}, column {col} is {value}, outside 0..{order}")]
    IndexOutOfRange { row: usize, col: usize, value: usize, order: usize },
    #[error("table must be square and non-empty (row {row} has {len} entries, expected {order})")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("declared order {declared} does not match table size {actual}")]
    OrderMismatch { declared: usize, actual: usize },
    #[error("invalid semigroup JSON: {0}")]
    Json(String),
}

/// A subset of a carrier `{0, …, n-1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet(u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub fn full(n: usize) -> Self {
        if n == 64 {
            ElementSet(u64::MAX)
        } else {
            ElementSet((1u64 << n) - 1)
        }
    }

    pub fn from_mask(mask: u64) -> Self {
        ElementSet(mask)
    }

    pub fn singleton(x: usize) -> Self {
        ElementSet(1 << x)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn contains(self, x: usize) -> bool {
        self.0 >> x & 1 == 1
    }

    pub fn insert(&mut self, x: usize) {
        self.0 |= 1 << x;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: ElementSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: ElementSet) -> Self {
        ElementSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ElementSet) -> Self {
        ElementSet(self.0 & other.0)
    }

    pub fn difference(self, other: ElementSet) -> Self {
        ElementSet(self.0 & !other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ElementSet::EMPTY;
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl Serialize for ElementSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ElementSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if let Some(&bad) = v.iter().find(|&&x| x >= 64) {
            return Err(serde::de::Error::custom(format!("element index {bad} out of range")));
        }
        Ok(v.into_iter().collect())
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// A semigroup on `{0, …, n-1}`; `table[x·n + y]` holds `xy`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteSemigroup {
    order: usize,
    table: Vec<usize>,
    name: Option<String>,
    labels: Option<Vec<String>>,
}

/// On-disk form: `{"name": ..., "order": n, "table": [[...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemigroupFile {
    #[serde(default)]
    pub name: Option<String>,
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl FiniteSemigroup {
    /// Validates shape, range and associativity (all `n³` triples).
    pub fn new_from_table(rows: Vec<Vec<usize>>) -> Result<Self, SemigroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(SemigroupError::NotSquare { row: 0, len: 0, order: 0 });
        }
        if n > MAX_ORDER {
            return Err(SemigroupError::OrderTooLarge { order: n, max: MAX_ORDER });
        }
        let mut table = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(SemigroupError::NotSquare { row: r, len: row.len(), order: n });
            }
            for (c, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(SemigroupError::IndexOutOfRange { row: r, col: c, value: v, order: n });
                }
                table.push(v);
            }
        }
        let s = FiniteSemigroup { order: n, table, name: None, labels: None };
        if let Some((x, y, z)) = s.associativity_witness() {
            return Err(SemigroupError::NonAssociative { x, y, z });
        }
        Ok(s)
    }

    pub(crate) fn from_flat_unchecked(order: usize, table: Vec<usize>) -> Self {
        FiniteSemigroup { order, table, name: None, labels: None }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        if labels.len() == self.order {
            self.labels = Some(labels);
        }
        self
    }

    pub fn from_file(file: SemigroupFile) -> Result<Self, SemigroupError> {
        if file.order != file.table.len() {
            return Err(SemigroupError::OrderMismatch { declared: file.order, actual: file.table.len() });
        }
        let mut s = Self::new_from_table(file.table)?;
        s.name = file.name;
        if let Some(l) = file.labels {
            s = s.with_labels(l);
        }
        Ok(s)
    }

    pub fn from_json_str(text: &str) -> Result<Self, SemigroupError> {
        let file: SemigroupFile =
            serde_json::from_str(text).map_err(|e| SemigroupError::Json(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn to_file(&self) -> SemigroupFile {
        SemigroupFile {
            name: self.name.clone(),
            order: self.order,
            table: self.rows(),
            labels: self.labels.clone(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn flat_table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.order + y]
    }

    pub fn mul3(&self, x: usize, y: usize, z: usize) -> usize {
        self.mul(self.mul(x, y), z)
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn all(&self) -> ElementSet {
        ElementSet::full(self.order)
    }

    fn associativity_witness(&self) -> Option<(usize, usize, usize)> {
        for x in self.elements() {
            for y in self.elements() {
                let xy = self.mul(x, y);
                for z in self.elements() {
                    if self.mul(xy, z) != self.mul(x, self.mul(y, z)) {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn is_commutative(&self) -> bool {
        self.elements().all(|x| self.elements().all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    /// `{t1·t2 : t1 ∈ a, t2 ∈ b}`.
    pub fn product_set(&self, a: ElementSet, b: ElementSet) -> ElementSet {
        let mut out = ElementSet::EMPTY;
        for x in a.iter() {
            for y in b.iter() {
                out.insert(self.mul(x, y));
            }
        }
        out
    }

    /// `S²`.
    pub fn square(&self) -> ElementSet {
        self.product_set(self.all(), self.all())
    }

    pub fn is_subsemigroup(&self, t: ElementSet) -> bool {
        self.product_set(t, t).is_subset(t)
    }

    /// Two-sided ideal: `SI ⊆ I` and `IS ⊆ I`.
    pub fn is_ideal(&self, i: ElementSet) -> bool {
        let s = self.all();
        self.product_set(s, i).is_subset(i) && self.product_set(i, s).is_subset(i)
    }

    /// Proper nonempty ideal whose complement is closed under the product.
    pub fn is_prime_ideal(&self, i: ElementSet) -> bool {
        let s = self.all();
        !i.is_empty() && i != s && i.is_subset(s) && self.is_ideal(i) && self.is_subsemigroup(s.difference(i))
    }

    /// All prime ideals, found by exhaustive subset search.
    pub fn prime_ideals(&self) -> Vec<ElementSet> {
        let full = self.all().mask();
        (1..full).map(ElementSet::from_mask).filter(|&i| self.is_prime_ideal(i)).collect()
    }

    /// `f(xy) = f(yx)` for all pairs.
    pub fn is_central(&self, f: &[Scalar]) -> bool {
        self.elements()
            .all(|x| self.elements().all(|y| f[self.mul(x, y)] == f[self.mul(y, x)]))
    }

    /// Central and `f(xyz) = f(xzy)` for all triples.
    pub fn is_abelian_fn(&self, f: &[Scalar]) -> bool {
        self.is_central(f)
            && self.elements().all(|x| {
                self.elements().all(|y| {
                    self.elements().all(|z| f[self.mul3(x, y, z)] == f[self.mul3(x, z, y)])
                })
            })
    }

    /// Index `k` and period `m` of `x`: least `k, m ≥ 1` with `x^k = x^{k+m}`.
    pub fn index_period(&self, x: usize) -> (usize, usize) {
        let mut seen = vec![usize::MAX; self.order];
        let mut p = x;
        let mut k = 1;
        loop {
            if seen[p] != usize::MAX {
                return (seen[p], k - seen[p]);
            }
            seen[p] = k;
            p = self.mul(p, x);
            k += 1;
        }
    }

    /// The table relabelled by `perm` (element `x` becomes `perm[x]`).
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.order;
        let mut table = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                table[perm[x] * n + perm[y]] = perm[self.mul(x, y)];
            }
        }
        FiniteSemigroup::from_flat_unchecked(n, table)
    }

    /// The opposite semigroup (`x ∘ y = yx`).
    pub fn opposite(&self) -> Self {
        let n = self.order;
        let mut table = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                table[x * n + y] = self.mul(y, x);
            }
        }
        FiniteSemigroup::from_flat_unchecked(n, table)
    }
}

impl fmt::Display for FiniteSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            write!(f, "{name} ")?;
        }
        write!(f, "{:?}", self.rows())
    }
}

/// Every permutation of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Deduplication applied by [`enumerate_small`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Canonical {
    /// Every associative table.
    #[default]
    Raw,
    /// One representative per isomorphism class.
    Isomorphism,
    /// One representative per class under isomorphism and anti-isomorphism.
    IsomorphismOrAnti,
}

/// All associative `n × n` tables, found by backtracking over cells in
/// row-major order with incremental associativity pruning.
pub fn enumerate_small(n: usize, canonical: Canonical) -> Result<Vec<FiniteSemigroup>, SemigroupError> {
    if n > MAX_ENUMERATION_ORDER {
        return Err(SemigroupError::OrderTooLarge { order: n, max: MAX_ENUMERATION_ORDER });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    const UNSET: usize = usize::MAX;
    let mut table = vec![UNSET; n * n];
    let mut raw = Vec::new();
    fill(n, 0, &mut table, &mut raw);

    fn consistent(n: usize, t: &[usize]) -> bool {
        for x in 0..n {
            for y in 0..n {
                let xy = t[x * n + y];
                if xy == UNSET {
                    continue;
                }
                for z in 0..n {
                    let yz = t[y * n + z];
                    if yz == UNSET {
                        continue;
                    }
                    let l = t[xy * n + z];
                    let r = t[x * n + yz];
                    if l != UNSET && r != UNSET && l != r {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn fill(n: usize, cell: usize, t: &mut Vec<usize>, out: &mut Vec<FiniteSemigroup>) {
        if cell == n * n {
            out.push(FiniteSemigroup::from_flat_unchecked(n, t.clone()));
            return;
        }
        for v in 0..n {
            t[cell] = v;
            if consistent(n, t) {
                fill(n, cell + 1, t, out);
            }
        }
        t[cell] = UNSET;
    }

    if canonical == Canonical::Raw {
        return Ok(raw);
    }
    let perms = permutations(n);
    let key = |s: &FiniteSemigroup| -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        let mut consider = |t: &FiniteSemigroup| {
            for p in &perms {
                let r = t.relabel(p);
                if best.as_ref().is_none_or(|b| r.table < *b) {
                    best = Some(r.table);
                }
            }
        };
        consider(s);
        if canonical == Canonical::IsomorphismOrAnti {
            consider(&s.opposite());
        }
        best.expect("at least one permutation")
    };
    Ok(raw.into_iter().filter(|s| key(s) == s.table).collect())
}

/// Small named semigroups used throughout tests, docs and the CLI.
pub mod catalog {
    use super::FiniteSemigroup;

    fn labelled(rows: Vec<Vec<usize>>, name: &str, labels: &[&str]) -> FiniteSemigroup {
        FiniteSemigroup::new_from_table(rows)
            .expect("catalog tables are associative")
            .with_name(name)
            .with_labels(labels.iter().map(|s| s.to_string()).collect())
    }

    /// `ℤ_n` under addition; element `x` is the residue `x`.
    pub fn cyclic_group(n: usize) -> FiniteSemigroup {
        let rows = (0..n).map(|x| (0..n).map(|y| (x + y) % n).collect()).collect();
        FiniteSemigroup::new_from_table(rows).expect("cyclic group").with_name(format!("Z{n}"))
    }

    /// Null semigroup on `n` elements: every product is the last element.
    pub fn null_semigroup(n: usize) -> FiniteSemigroup {
        let rows = vec![vec![n - 1; n]; n];
        FiniteSemigroup::new_from_table(rows).expect("null semigroup").with_name(format!("null{n}"))
    }

    /// Null semigroup `{a, b, z}` with `xy = z`.
    pub fn null_abz() -> FiniteSemigroup {
        labelled(vec![vec![2; 3]; 3], "null{a,b,z}", &["a", "b", "z"])
    }

    /// Monoid `{1, p, 0}` with `p² = 0` and `0` absorbing.
    pub fn monoid_1p0() -> FiniteSemigroup {
        labelled(vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 2, 2]], "{1,p,0}", &["1", "p", "0"])
    }

    /// Monoid `{1, p, q, 0}` with every product of `p, q` equal to `0`.
    pub fn monoid_1pq0() -> FiniteSemigroup {
        labelled(
            vec![vec![0, 1, 2, 3], vec![1, 3, 3, 3], vec![2, 3, 3, 3], vec![3, 3, 3, 3]],
            "{1,p,q,0}",
            &["1", "p", "q", "0"],
        )
    }

    /// Left-zero semigroup: `xy = x`.
    pub fn left_zero(n: usize) -> FiniteSemigroup {
        let rows = (0..n).map(|x| vec![x; n]).collect();
        FiniteSemigroup::new_from_table(rows).expect("left zero").with_name(format!("leftzero{n}"))
    }

    /// Trivial semigroup `{e}`.
    pub fn trivial() -> FiniteSemigroup {
        labelled(vec![vec![0]], "trivial", &["e"])
    }
}

#[cfg(test)]
mod tests {
    use super::catalog::*;
    use super::*;

    #[test]
    fn trivial_and_z2_tables() {
        assert!(FiniteSemigroup::new_from_table(vec![vec![0]]).is_ok());
        assert!(FiniteSemigroup::new_from_table(vec![vec![0, 1], vec![1, 0]]).is_ok());
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            FiniteSemigroup::new_from_table(vec![vec![0, 2], vec![1, 0]]),
            Err(SemigroupError::IndexOutOfRange { row: 0, col: 1, value: 2, order: 2 })
        ));
        assert!(matches!(
            FiniteSemigroup::new_from_table(vec![vec![0, 1], vec![1]]),
            Err(SemigroupError::NotSquare { .. })
        ));
    }

    #[test]
    fn two_by_two_non_associative_witness() {
        // Exhaustive check of the 8 triples, written out independently.
        let t = [[0usize, 0], [1, 0]];
        let mut witness = None;
        'outer: for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    if t[t[x][y]][z] != t[x][t[y][z]] {
                        witness = Some((x, y, z));
                        break 'outer;
                    }
                }
            }
        }
        // (1·0)·1 = 1·1 = 0 but 1·(0·1) = 1·0 = 1
        assert_eq!(witness, Some((1, 0, 1)));
        let err = FiniteSemigroup::new_from_table(vec![vec![0, 0], vec![1, 0]]).unwrap_err();
        assert_eq!(err, SemigroupError::NonAssociative { x: 1, y: 0, z: 1 });
    }

    #[test]
    fn product_sets() {
        let s = null_abz();
        assert_eq!(s.square(), ElementSet::singleton(2));
        assert_eq!(cyclic_group(3).square(), ElementSet::full(3));
        let m = monoid_1p0();
        let i: ElementSet = [1, 2].into_iter().collect();
        assert_eq!(m.product_set(i, i), ElementSet::singleton(2));
    }

    #[test]
    fn prime_ideal_examples() {
        assert!(cyclic_group(3).prime_ideals().is_empty());
        let m = monoid_1p0();
        assert_eq!(m.prime_ideals(), vec![[1, 2].into_iter().collect::<ElementSet>()]);
        assert!(m.is_ideal(ElementSet::singleton(2)));
        assert!(!m.is_prime_ideal(ElementSet::singleton(2)));
        // null{a,b,z}: {z} is an ideal, but ab = z so {a,b} is not closed.
        let n = null_abz();
        assert!(n.is_ideal(ElementSet::singleton(2)));
        assert!(!n.is_prime_ideal(ElementSet::singleton(2)));
        // {a,z}: complement {b} with bb = z ∉ {b}.
        assert!(!n.is_prime_ideal([0, 2].into_iter().collect()));
        assert!(n.prime_ideals().is_empty());
    }

    #[test]
    fn central_and_abelian() {
        let z3 = cyclic_group(3);
        let f: Vec<Scalar> = (0..3).map(|x| Scalar::from_int(x as i64 * 7 - 2)).collect();
        assert!(z3.is_central(&f) && z3.is_abelian_fn(&f));
        let lz = left_zero(2);
        let constant = vec![Scalar::from_int(5); 2];
        assert!(lz.is_abelian_fn(&constant));
        // indicator of 0 on left-zero: f(0·1)=f(0)=1 but f(1·0)=f(1)=0
        let ind = vec![Scalar::one(), Scalar::zero()];
        assert!(!lz.is_central(&ind));
    }

    #[test]
    fn index_and_period() {
        let z3 = cyclic_group(3);
        assert_eq!(z3.index_period(1), (1, 3));
        let m = monoid_1p0();
        assert_eq!(m.index_period(1), (2, 1));
        assert_eq!(m.index_period(0), (1, 1));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_small(1, Canonical::Raw).unwrap().len(), 1);
        assert!(matches!(enumerate_small(5, Canonical::Raw), Err(SemigroupError::OrderTooLarge { .. })));
    }

    #[test]
    fn json_reader_reports_witness() {
        let err = FiniteSemigroup::from_json_str(r#"{"name":"bad","order":2,"table":[[0,0],[1,0]]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("(1·0)·1"), "{err}");
        let ok = FiniteSemigroup::from_json_str(r#"{"name":"Z2","order":2,"table":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(ok.name(), Some("Z2"));
    }
}
