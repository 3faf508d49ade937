//! Topological invariants of finite spaces: separation axioms, isolated
//! points, weight, density, cellularity, spread, connectivity data, and the
//! local-property operator. These are the inputs to the reconstruction
//! audit.

use serde::{Deserialize, Serialize};

use crate::space::{FiniteSpace, PointSet};
use crate::{Error, Result};

/// Cap for the exhaustive-search invariants (cellularity, spread), and
/// hence for full property vectors.
pub const MAX_PROPERTY_POINTS: usize = 8;

/// Every computed invariant of a space, in serialization order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyVector {
    pub t0: bool,
    pub t1: bool,
    pub t2: bool,
    pub regular: bool,
    pub completely_regular: bool,
    pub normal: bool,
    pub hereditarily_normal: bool,
    pub perfectly_normal: bool,
    pub isolated_count: usize,
    pub weight: usize,
    pub density: usize,
    pub cellularity: usize,
    pub spread: usize,
    pub connected: bool,
    pub component_count: usize,
    pub totally_disconnected: bool,
    pub dispersion_points: Vec<usize>,
    pub cut_points: Vec<usize>,
}

/// A single comparable invariant value, used by the audit's verdict table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum AuditValue {
    Bool(bool),
    Count(usize),
}

/// Names of the audited projections, in `audited_fields` order.
pub const AUDITED_FIELD_NAMES: [&str; 18] = [
    "t0",
    "t1",
    "t2",
    "regular",
    "completely_regular",
    "normal",
    "hereditarily_normal",
    "perfectly_normal",
    "isolated_count",
    "weight",
    "density",
    "cellularity",
    "spread",
    "connected",
    "component_count",
    "totally_disconnected",
    "dispersion_point_count",
    "cut_point_count",
];

impl PropertyVector {
    /// Relabel-invariant projections of every field. The point-set valued
    /// fields enter as cardinalities, since raw point labels cannot be
    /// compared across non-identical spaces.
    pub fn audited_fields(&self) -> Vec<(&'static str, AuditValue)> {
        use AuditValue::{Bool, Count};
        vec![
            ("t0", Bool(self.t0)),
            ("t1", Bool(self.t1)),
            ("t2", Bool(self.t2)),
            ("regular", Bool(self.regular)),
            ("completely_regular", Bool(self.completely_regular)),
            ("normal", Bool(self.normal)),
            ("hereditarily_normal", Bool(self.hereditarily_normal)),
            ("perfectly_normal", Bool(self.perfectly_normal)),
            ("isolated_count", Count(self.isolated_count)),
            ("weight", Count(self.weight)),
            ("density", Count(self.density)),
            ("cellularity", Count(self.cellularity)),
            ("spread", Count(self.spread)),
            ("connected", Bool(self.connected)),
            ("component_count", Count(self.component_count)),
            ("totally_disconnected", Bool(self.totally_disconnected)),
            ("dispersion_point_count", Count(self.dispersion_points.len())),
            ("cut_point_count", Count(self.cut_points.len())),
        ]
    }
}

/// The separation-axiom flags, each checked definitionally and without
/// assuming lower axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparationFlags {
    pub t0: bool,
    pub t1: bool,
    pub t2: bool,
    pub regular: bool,
    pub completely_regular: bool,
    pub normal: bool,
    pub hereditarily_normal: bool,
    pub perfectly_normal: bool,
}

/// Tables of closures and open hulls for every subset, built once per space.
struct SubsetTables {
    closure: Vec<PointSet>,
    hull: Vec<PointSet>,
}

impl SubsetTables {
    fn new(s: &FiniteSpace) -> Self {
        let n = s.n();
        let size = 1usize << n;
        let mut closure = vec![0; size];
        let mut hull = vec![0; size];
        for mask in 1..size {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            closure[mask] = closure[rest] | s.closure_of(low);
            hull[mask] = hull[rest] | s.min_open(low);
        }
        SubsetTables { closure, hull }
    }
}

pub fn separation_axioms(s: &FiniteSpace) -> SeparationFlags {
    let n = s.n();
    let full = s.full_set();
    let tables = SubsetTables::new(s);
    let opens = s.open_family();
    let closeds: Vec<PointSet> = opens.opens().iter().map(|&o| full & !o).collect();

    let t0 = (0..n).all(|x| (x + 1..n).all(|y| s.min_open(x) != s.min_open(y)));
    let t1 = (0..n).all(|x| s.min_open(x) == 1 << x);
    let t2 = (0..n).all(|x| (x + 1..n).all(|y| s.min_open(x) & s.min_open(y) == 0));

    // A point and a disjoint closed set have disjoint open neighborhoods
    // iff the minimal candidates U_x and hull(C) are already disjoint.
    let regular = closeds.iter().all(|&c| {
        let hull_c = tables.hull[c as usize];
        (0..n).all(|x| c & (1 << x) != 0 || s.min_open(x) & hull_c == 0)
    });

    // The minimal open sets form a partition exactly when indicator maps
    // separate points from closed sets.
    let completely_regular = (0..n).all(|x| {
        (0..n).all(|y| {
            let (ux, uy) = (s.min_open(x), s.min_open(y));
            ux == uy || ux & uy == 0
        })
    });

    let normal = closeds.iter().enumerate().all(|(i, &a)| {
        closeds[i + 1..].iter().all(|&b| {
            a & b != 0 || tables.hull[a as usize] & tables.hull[b as usize] == 0
        })
    });

    // Separated-pair criterion: every subspace is normal iff every two
    // separated sets have disjoint open neighborhoods.
    let hereditarily_normal = {
        let mut ok = true;
        'outer: for a in 0..(1usize << n) {
            let complement = full & !(a as PointSet);
            let mut b = complement;
            loop {
                let separated = tables.closure[a] & b == 0
                    && (a as PointSet) & tables.closure[b as usize] == 0;
                if separated && tables.hull[a] & tables.hull[b as usize] != 0 {
                    ok = false;
                    break 'outer;
                }
                if b == 0 {
                    break;
                }
                b = (b - 1) & complement;
            }
        }
        ok
    };

    // Finite G_δ-sets are open, so perfect normality asks every closed set
    // to be open.
    let perfectly_normal = normal && closeds.iter().all(|&c| s.is_open(c));

    SeparationFlags {
        t0,
        t1,
        t2,
        regular,
        completely_regular,
        normal,
        hereditarily_normal,
        perfectly_normal,
    }
}

/// Points whose singleton is open.
pub fn isolated_points(s: &FiniteSpace) -> PointSet {
    let mut set = 0;
    for x in 0..s.n() {
        if s.min_open(x) == 1 << x {
            set |= 1 << x;
        }
    }
    set
}

pub fn isolated_count(s: &FiniteSpace) -> usize {
    isolated_points(s).count_ones() as usize
}

fn distinct_min_opens(s: &FiniteSpace) -> Vec<PointSet> {
    let mut sets: Vec<PointSet> = s.min_open_table().to_vec();
    sets.sort_unstable();
    sets.dedup();
    sets
}

/// Size of the unique minimal base: the number of distinct minimal open
/// sets. Every `U_x` is join-irreducible, so every base contains them all,
/// and they form a base themselves.
pub fn weight(s: &FiniteSpace) -> usize {
    distinct_min_opens(s).len()
}

/// Minimum size of a dense subset: one point per inclusion-minimal distinct
/// `U_x`. Distinct inclusion-minimal sets are pairwise disjoint, so the
/// count is exact.
pub fn density(s: &FiniteSpace) -> usize {
    let distinct = distinct_min_opens(s);
    distinct
        .iter()
        .filter(|&&u| !distinct.iter().any(|&v| v != u && v & u == v))
        .count()
}

fn check_property_cap(s: &FiniteSpace) -> Result<()> {
    if s.n() > MAX_PROPERTY_POINTS {
        return Err(Error::SpaceTooLarge {
            n: s.n(),
            max: MAX_PROPERTY_POINTS,
        });
    }
    Ok(())
}

/// Maximum size of a pairwise-disjoint family of nonempty open sets, by
/// exhaustive search over the sets still available inside each mask.
pub fn cellularity(s: &FiniteSpace) -> Result<usize> {
    check_property_cap(s)?;
    let n = s.n();
    let opens: Vec<PointSet> = s
        .open_family()
        .opens()
        .iter()
        .copied()
        .filter(|&o| o != 0)
        .collect();
    let mut memo = vec![usize::MAX; 1 << n];
    fn pack(mask: PointSet, opens: &[PointSet], memo: &mut Vec<usize>) -> usize {
        if mask == 0 {
            return 0;
        }
        if memo[mask as usize] != usize::MAX {
            return memo[mask as usize];
        }
        let low = 1 << mask.trailing_zeros();
        // Either no chosen open touches the lowest point, or one contains it.
        let mut best = pack(mask & !low, opens, memo);
        for &o in opens {
            if o & low != 0 && o & !mask == 0 {
                best = best.max(1 + pack(mask & !o, opens, memo));
            }
        }
        memo[mask as usize] = best;
        best
    }
    Ok(pack(s.full_set(), &opens, &mut memo))
}

/// Maximum size of a subset whose subspace is discrete, by exhaustive
/// search: such subsets are exactly the strict antichains of the preorder.
pub fn spread(s: &FiniteSpace) -> Result<usize> {
    check_property_cap(s)?;
    let n = s.n();
    let mut best = 0;
    for mask in 1u32..(1 << n) {
        let mut ok = true;
        'pairs: for x in 0..n {
            if mask & (1 << x) == 0 {
                continue;
            }
            for y in (x + 1)..n {
                if mask & (1 << y) != 0 && (s.rel(x, y) || s.rel(y, x)) {
                    ok = false;
                    break 'pairs;
                }
            }
        }
        if ok {
            best = best.max(mask.count_ones() as usize);
        }
    }
    Ok(best)
}

/// Connected components: the components of the comparability graph, in
/// order of their smallest point. Opens are down-sets, so clopen sets are
/// exactly unions of these blocks.
pub fn components(s: &FiniteSpace) -> Vec<PointSet> {
    let n = s.n();
    let adjacency: Vec<PointSet> = (0..n).map(|x| s.min_open(x) | s.closure_of(x)).collect();
    let mut seen: PointSet = 0;
    let mut parts = Vec::new();
    for start in 0..n {
        if seen & (1 << start) != 0 {
            continue;
        }
        let mut part: PointSet = 1 << start;
        loop {
            let mut next = part;
            for x in 0..n {
                if part & (1 << x) != 0 {
                    next |= adjacency[x];
                }
            }
            if next == part {
                break;
            }
            part = next;
        }
        seen |= part;
        parts.push(part);
    }
    parts
}

pub fn connected(s: &FiniteSpace) -> bool {
    components(s).len() == 1
}

pub fn totally_disconnected(s: &FiniteSpace) -> bool {
    components(s).len() == s.n()
}

/// Points of a connected space whose deletion leaves a totally
/// disconnected card.
pub fn dispersion_points(s: &FiniteSpace) -> Result<PointSet> {
    let n = s.n();
    if n < 2 {
        return Err(Error::SpaceTooSmall { n, min: 2 });
    }
    if !connected(s) {
        return Ok(0);
    }
    let mut set = 0;
    for x in 0..n {
        if totally_disconnected(&s.delete_point(x)?) {
            set |= 1 << x;
        }
    }
    Ok(set)
}

/// Points whose deletion disconnects the space.
pub fn cut_points(s: &FiniteSpace) -> Result<PointSet> {
    let n = s.n();
    if n < 2 {
        return Err(Error::SpaceTooSmall { n, min: 2 });
    }
    let mut set = 0;
    for x in 0..n {
        if !connected(&s.delete_point(x)?) {
            set |= 1 << x;
        }
    }
    Ok(set)
}

/// `locally P`: in a finite space the minimal open set `U_x` is the
/// smallest neighborhood of `x`, so the neighborhood filter has a `P`-basis
/// iff the subspace on `U_x` satisfies `P`.
pub fn locally(s: &FiniteSpace, property: impl Fn(&FiniteSpace) -> bool) -> bool {
    (0..s.n()).all(|x| {
        let local = s.induce(s.min_open(x)).expect("U_x is nonempty");
        property(&local)
    })
}

fn set_to_sorted_points(set: PointSet) -> Vec<usize> {
    (0..32).filter(|p| set & (1 << p) != 0).collect()
}

/// Computes the full vector. Requires `n ≤ 8` (the exhaustive invariants);
/// on the one-point space the deletion-based fields are empty.
pub fn property_vector(s: &FiniteSpace) -> Result<PropertyVector> {
    check_property_cap(s)?;
    let flags = separation_axioms(s);
    let parts = components(s);
    let (dispersion, cut) = if s.n() >= 2 {
        (dispersion_points(s)?, cut_points(s)?)
    } else {
        (0, 0)
    };
    Ok(PropertyVector {
        t0: flags.t0,
        t1: flags.t1,
        t2: flags.t2,
        regular: flags.regular,
        completely_regular: flags.completely_regular,
        normal: flags.normal,
        hereditarily_normal: flags.hereditarily_normal,
        perfectly_normal: flags.perfectly_normal,
        isolated_count: isolated_count(s),
        weight: weight(s),
        density: density(s),
        cellularity: cellularity(s)?,
        spread: spread(s)?,
        connected: parts.len() == 1,
        component_count: parts.len(),
        totally_disconnected: parts.len() == s.n(),
        dispersion_points: set_to_sorted_points(dispersion),
        cut_points: set_to_sorted_points(cut),
    })
}
