//! Construction, validation, and transformation of finite topological
//! spaces in both open-family and specialization-preorder form.
//!
//! Convention: `rel(x, y)` holds iff every open set containing `y` contains
//! `x`, i.e. `x ∈ U_y` where `U_y` is the intersection of all opens
//! containing `y`. Open sets are exactly the down-closed subsets of `rel`,
//! so passing to a subspace is passing to the induced relation.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashSet;

use crate::{Error, Result};

/// A subset of `{0..n-1}` encoded as a bit-set (bit `i` = point `i`).
pub type PointSet = u32;

/// Hard cap on point counts so subsets fit comfortably in one word.
pub const MAX_POINTS: usize = 16;

fn check_point_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_POINTS {
        return Err(Error::ScaleUnsupported {
            n,
            min: 1,
            max: MAX_POINTS,
        });
    }
    Ok(())
}

/// Sort key used for all normalized open-set listings.
fn open_order(set: PointSet) -> (u32, PointSet) {
    (set.count_ones(), set)
}

fn set_to_points(set: PointSet) -> Vec<usize> {
    (0..MAX_POINTS).filter(|p| set & (1 << p) != 0).collect()
}

fn points_to_set(points: &[usize], n: usize) -> Result<PointSet> {
    let mut set = 0;
    for &p in points {
        if p >= n {
            return Err(Error::PointOutOfRange { point: p, n });
        }
        set |= 1 << p;
    }
    Ok(set)
}

/// A topology on `{0..n-1}` given by its full family of open sets.
///
/// Invariants: contains the empty and the full set, is closed under pairwise
/// union and intersection, holds no duplicates, and is sorted by
/// `(popcount, numeric value)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenFamily {
    n: usize,
    opens: Vec<PointSet>,
}

impl OpenFamily {
    /// Normalizes and checks a raw list of subsets against the topology
    /// axioms (the finite case only needs pairwise closure).
    ///
    /// Closure violations win over a missing empty/full set so that the
    /// reported witness pair names the actual defect.
    pub fn validate(n: usize, subsets: &[PointSet]) -> Result<Self> {
        check_point_count(n)?;
        let full: PointSet = ((1u64 << n) - 1) as PointSet;
        for &s in subsets {
            if s & !full != 0 {
                let bad = (s & !full).trailing_zeros() as usize;
                return Err(Error::PointOutOfRange { point: bad, n });
            }
        }
        let mut opens: Vec<PointSet> = subsets.to_vec();
        opens.sort_unstable_by_key(|&s| open_order(s));
        opens.dedup();

        // The power set is trivially closed.
        if opens.len() != (1usize << n) {
            let members: HashSet<PointSet> = opens.iter().copied().collect();
            for i in 0..opens.len() {
                for j in (i + 1)..opens.len() {
                    if !members.contains(&(opens[i] | opens[j])) {
                        return Err(Error::NotUnionClosed(opens[i], opens[j]));
                    }
                }
            }
            for i in 0..opens.len() {
                for j in (i + 1)..opens.len() {
                    if !members.contains(&(opens[i] & opens[j])) {
                        return Err(Error::NotIntersectionClosed(opens[i], opens[j]));
                    }
                }
            }
        }
        if opens.first() != Some(&0) || opens.last() != Some(&full) {
            return Err(Error::MissingEmptyOrFull);
        }
        Ok(OpenFamily { n, opens })
    }

    /// Internal constructor for families already known to be topologies
    /// (e.g. the down-sets of a preorder). Input must be sorted/deduped.
    fn from_normalized(n: usize, opens: Vec<PointSet>) -> Self {
        debug_assert!(opens.windows(2).all(|w| open_order(w[0]) < open_order(w[1])));
        OpenFamily { n, opens }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    /// Converts to the preorder form: `U_x` = intersection of all opens
    /// containing `x`.
    pub fn to_space(&self) -> FiniteSpace {
        let full: PointSet = ((1u64 << self.n) - 1) as PointSet;
        let min_open = (0..self.n)
            .map(|x| {
                self.opens
                    .iter()
                    .filter(|&&o| o & (1 << x) != 0)
                    .fold(full, |acc, &o| acc & o)
            })
            .collect();
        FiniteSpace { min_open }
    }
}

/// A finite space in specialization-preorder form: `min_open[x]` is the
/// smallest open set containing `x`; `rel(x, y) ⇔ x ∈ min_open[y]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteSpace {
    min_open: Vec<PointSet>,
}

impl FiniteSpace {
    /// Builds a space from its minimal-open-set table, checking that the
    /// induced relation is a preorder on `1..=16` points.
    pub fn from_min_open(min_open: Vec<PointSet>) -> Result<Self> {
        let n = min_open.len();
        check_point_count(n)?;
        let full: PointSet = ((1u64 << n) - 1) as PointSet;
        for (x, &u) in min_open.iter().enumerate() {
            if u & !full != 0 {
                let bad = (u & !full).trailing_zeros() as usize;
                return Err(Error::PointOutOfRange { point: bad, n });
            }
            if u & (1 << x) == 0 {
                return Err(Error::InvalidPreorder(format!(
                    "relation not reflexive at point {x}"
                )));
            }
        }
        for (x, &u) in min_open.iter().enumerate() {
            for z in 0..n {
                if u & (1 << z) != 0 && min_open[z] & !u != 0 {
                    return Err(Error::InvalidPreorder(format!(
                        "relation not transitive: {z} below {x} but the minimal \
                         open set of {z} is not contained in that of {x}"
                    )));
                }
            }
        }
        Ok(FiniteSpace { min_open })
    }

    /// Builds a space from an explicit relation predicate
    /// (`rel(x, y)` = "every open containing `y` contains `x`").
    pub fn from_relation(n: usize, rel: impl Fn(usize, usize) -> bool) -> Result<Self> {
        check_point_count(n)?;
        let min_open = (0..n)
            .map(|y| {
                let mut u = 0;
                for x in 0..n {
                    if rel(x, y) {
                        u |= 1 << x;
                    }
                }
                u
            })
            .collect();
        Self::from_min_open(min_open)
    }

    pub fn n(&self) -> usize {
        self.min_open.len()
    }

    /// Bit-set of all points.
    pub fn full_set(&self) -> PointSet {
        ((1u64 << self.n()) - 1) as PointSet
    }

    /// Smallest open set containing `x`.
    pub fn min_open(&self, x: usize) -> PointSet {
        self.min_open[x]
    }

    pub fn min_open_table(&self) -> &[PointSet] {
        &self.min_open
    }

    /// `rel(x, y)`: every open set containing `y` contains `x`.
    pub fn rel(&self, x: usize, y: usize) -> bool {
        self.min_open[y] & (1 << x) != 0
    }

    /// Closure of the singleton `{x}`: the points `y` with `rel(x, y)`.
    pub fn closure_of(&self, x: usize) -> PointSet {
        let mut cl = 0;
        for y in 0..self.n() {
            if self.rel(x, y) {
                cl |= 1 << y;
            }
        }
        cl
    }

    /// Closure of an arbitrary subset.
    pub fn closure(&self, set: PointSet) -> PointSet {
        let mut cl = 0;
        for x in 0..self.n() {
            if set & (1 << x) != 0 {
                cl |= self.closure_of(x);
            }
        }
        cl
    }

    /// Smallest open superset of `set` (union of the member `U_x`).
    pub fn open_hull(&self, set: PointSet) -> PointSet {
        let mut hull = 0;
        for x in 0..self.n() {
            if set & (1 << x) != 0 {
                hull |= self.min_open[x];
            }
        }
        hull
    }

    /// A set is open iff it is down-closed under the preorder.
    pub fn is_open(&self, set: PointSet) -> bool {
        self.open_hull(set) == set
    }

    pub fn is_closed(&self, set: PointSet) -> bool {
        self.is_open(self.full_set() & !set)
    }

    /// Recovers the full open family: all down-closed subsets.
    pub fn open_family(&self) -> OpenFamily {
        let n = self.n();
        let mut opens: Vec<PointSet> = (0..(1u64 << n) as PointSet)
            .filter(|&mask| self.is_open(mask))
            .collect();
        opens.sort_unstable_by_key(|&s| open_order(s));
        OpenFamily::from_normalized(n, opens)
    }

    /// The subspace on the points of `mask`, relabeled to `{0..k-1}` by
    /// order-preserving collapse. Subspace minimal open sets are the traces
    /// `U_x ∩ mask`, i.e. the induced sub-preorder.
    pub fn induce(&self, mask: PointSet) -> Result<FiniteSpace> {
        let mask = mask & self.full_set();
        if mask == 0 {
            return Err(Error::SpaceTooSmall { n: 0, min: 1 });
        }
        let points = set_to_points(mask);
        let min_open = points
            .iter()
            .map(|&old| {
                let trace = self.min_open[old] & mask;
                let mut new_set = 0;
                for (new_idx, &p) in points.iter().enumerate() {
                    if trace & (1 << p) != 0 {
                        new_set |= 1 << new_idx;
                    }
                }
                new_set
            })
            .collect();
        Ok(FiniteSpace { min_open })
    }

    /// The card-by-index operation: the subspace on everything but `x`.
    pub fn delete_point(&self, x: usize) -> Result<FiniteSpace> {
        let n = self.n();
        if n < 2 {
            return Err(Error::SpaceTooSmall { n, min: 2 });
        }
        if x >= n {
            return Err(Error::PointOutOfRange { point: x, n });
        }
        self.induce(self.full_set() & !(1 << x))
    }

    /// Block-diagonal sum: opens are unions of an open of `self` and an
    /// open of `other`.
    pub fn disjoint_sum(&self, other: &FiniteSpace) -> Result<FiniteSpace> {
        let n = self.n() + other.n();
        if n > MAX_POINTS {
            return Err(Error::SpaceTooLarge { n, max: MAX_POINTS });
        }
        let mut min_open = self.min_open.clone();
        min_open.extend(other.min_open.iter().map(|&u| u << self.n()));
        Ok(FiniteSpace { min_open })
    }

    /// Relabels points by `perm` (point `x` becomes `perm[x]`).
    /// `perm` must be a permutation of `0..n`.
    pub fn relabel(&self, perm: &[usize]) -> FiniteSpace {
        let n = self.n();
        assert_eq!(perm.len(), n, "permutation length mismatch");
        let mut min_open = vec![0; n];
        for x in 0..n {
            let mut image = 0;
            for z in 0..n {
                if self.min_open[x] & (1 << z) != 0 {
                    image |= 1 << perm[z];
                }
            }
            min_open[perm[x]] = image;
        }
        debug_assert!(min_open.iter().enumerate().all(|(x, &u)| u & (1 << x) != 0));
        FiniteSpace { min_open }
    }
}

/// The stock spaces used throughout examples and tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedSpace {
    Point,
    Discrete(usize),
    Indiscrete(usize),
    Sierpinski,
    Chain(usize),
}

impl NamedSpace {
    /// Panics if the size parameter is outside `1..=16`.
    pub fn build(self) -> FiniteSpace {
        match self {
            NamedSpace::Point => point(),
            NamedSpace::Discrete(k) => discrete(k),
            NamedSpace::Indiscrete(k) => indiscrete(k),
            NamedSpace::Sierpinski => sierpinski(),
            NamedSpace::Chain(k) => chain(k),
        }
    }
}

fn assert_size(k: usize) {
    assert!(
        (1..=MAX_POINTS).contains(&k),
        "size {k} outside 1..={MAX_POINTS}"
    );
}

/// The one-point space.
pub fn point() -> FiniteSpace {
    FiniteSpace { min_open: vec![1] }
}

/// All `2^k` subsets open.
pub fn discrete(k: usize) -> FiniteSpace {
    assert_size(k);
    FiniteSpace {
        min_open: (0..k).map(|x| 1 << x).collect(),
    }
}

/// Exactly two opens: the empty and the full set.
pub fn indiscrete(k: usize) -> FiniteSpace {
    assert_size(k);
    let full = ((1u64 << k) - 1) as PointSet;
    FiniteSpace {
        min_open: vec![full; k],
    }
}

/// Two points with opens `∅, {0}, {0,1}`.
pub fn sierpinski() -> FiniteSpace {
    FiniteSpace {
        min_open: vec![0b01, 0b11],
    }
}

/// `k` points with the `k + 1` nested opens `∅ ⊂ {0} ⊂ {0,1} ⊂ …`.
pub fn chain(k: usize) -> FiniteSpace {
    assert_size(k);
    FiniteSpace {
        min_open: (0..k).map(|x| ((1u64 << (x + 1)) - 1) as PointSet).collect(),
    }
}

// --- JSON form -----------------------------------------------------------
//
// Writers always emit {"n": .., "opens": [[..], ..]} with opens normalized;
// readers also accept {"n": .., "preorder": [<n rows of 0/1>]}.

#[derive(Serialize)]
struct SpaceOut {
    n: usize,
    opens: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceIn {
    n: usize,
    #[serde(default)]
    opens: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    preorder: Option<Vec<Vec<u8>>>,
}

impl Serialize for FiniteSpace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let family = self.open_family();
        SpaceOut {
            n: family.n(),
            opens: family.opens().iter().map(|&o| set_to_points(o)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteSpace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SpaceIn::deserialize(deserializer)?;
        space_from_repr(raw).map_err(D::Error::custom)
    }
}

fn space_from_repr(raw: SpaceIn) -> Result<FiniteSpace> {
    match (raw.opens, raw.preorder) {
        (Some(opens), None) => {
            let sets = opens
                .iter()
                .map(|points| points_to_set(points, raw.n))
                .collect::<Result<Vec<_>>>()?;
            Ok(OpenFamily::validate(raw.n, &sets)?.to_space())
        }
        (None, Some(rows)) => {
            if rows.len() != raw.n || rows.iter().any(|r| r.len() != raw.n) {
                return Err(Error::InvalidPreorder(format!(
                    "preorder matrix must be {0}x{0}",
                    raw.n
                )));
            }
            FiniteSpace::from_relation(raw.n, |x, y| rows[x][y] != 0)
        }
        _ => Err(Error::InvalidPreorder(
            "space json needs exactly one of \"opens\" or \"preorder\"".into(),
        )),
    }
}

/// Parses the space JSON format from a string.
pub fn space_from_json(text: &str) -> Result<FiniteSpace> {
    let raw: SpaceIn = serde_json::from_str(text)?;
    space_from_repr(raw)
}
