//! Canonical forms for finite spaces: a relabel-invariant key whose
//! equality coincides with homeomorphism (equivalently, isomorphism of the
//! specialization preorders).
//!
//! The key is computed by iterated partition refinement on the preorder
//! digraph followed by a backtracking search over the refined cells for the
//! minimal relabeled relation matrix. Matrices are compared incrementally
//! in the order their bits become determined as points are placed; the
//! winning matrix is then encoded row-major.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::space::{FiniteSpace, MAX_POINTS};
use crate::{Error, Result};

/// Relabel-invariant fingerprint: one byte for `n`, then the `n²` bits of
/// the canonical relation matrix row-major, MSB first, zero-padded to whole
/// bytes. Rendered lowercase-hex in all text output.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Point count of the keyed space.
    pub fn point_count(&self) -> usize {
        self.0[0] as usize
    }

    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.0.len() * 2);
        for byte in &self.0 {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    pub fn from_hex(text: &str) -> Result<Self> {
        if text.is_empty() || !text.len().is_multiple_of(2) {
            return Err(Error::InvalidKey(format!("odd or empty hex: {text:?}")));
        }
        let bytes = (0..text.len() / 2)
            .map(|i| {
                u8::from_str_radix(&text[2 * i..2 * i + 2], 16)
                    .map_err(|_| Error::InvalidKey(format!("bad hex digit in {text:?}")))
            })
            .collect::<Result<Vec<u8>>>()?;
        let n = bytes[0] as usize;
        if n == 0 || n > MAX_POINTS {
            return Err(Error::InvalidKey(format!("point count {n} out of range")));
        }
        let expected = 1 + (n * n).div_ceil(8);
        if bytes.len() != expected {
            return Err(Error::InvalidKey(format!(
                "key for n={n} must be {expected} bytes, got {}",
                bytes.len()
            )));
        }
        // Padding bits past n² must be zero for byte-exact comparability.
        for bit in (n * n)..(bytes.len() - 1) * 8 {
            if bytes[1 + bit / 8] & (0x80 >> (bit % 8)) != 0 {
                return Err(Error::InvalidKey(format!("nonzero padding in {text:?}")));
            }
        }
        let key = CanonicalKey(bytes);
        // The encoded matrix must itself be a preorder.
        FiniteSpace::from_relation(n, |x, y| key.bit(x, y))
            .map_err(|e| Error::InvalidKey(format!("{text:?}: {e}")))?;
        Ok(key)
    }

    fn bit(&self, x: usize, y: usize) -> bool {
        let n = self.point_count();
        let bit = x * n + y;
        self.0[1 + bit / 8] & (0x80 >> (bit % 8)) != 0
    }

    /// Reconstructs a representative space from the key.
    pub fn to_space(&self) -> FiniteSpace {
        FiniteSpace::from_relation(self.point_count(), |x, y| self.bit(x, y))
            .expect("keys encode preorders by construction")
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for CanonicalKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for CanonicalKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        CanonicalKey::from_hex(&text).map_err(D::Error::custom)
    }
}

/// Iterated refinement: start from `(|U_x|, |cl{x}|)`, then repeatedly
/// split by the multisets of colors below and above each point until the
/// partition stabilizes. Returned colors are `0..k` in a label-independent
/// order (ties broken by numeric order of the color keys).
fn refine_colors(s: &FiniteSpace) -> Vec<u32> {
    let n = s.n();
    let closures: Vec<u32> = (0..n).map(|x| s.closure_of(x)).collect();
    let initial: Vec<(u32, u32)> = (0..n)
        .map(|x| (s.min_open(x).count_ones(), closures[x].count_ones()))
        .collect();
    let mut colors = assign_ids(&initial);

    loop {
        let keys: Vec<(u32, Vec<u32>, Vec<u32>)> = (0..n)
            .map(|x| {
                let mut below: Vec<u32> = (0..n)
                    .filter(|&z| s.min_open(x) & (1 << z) != 0)
                    .map(|z| colors[z])
                    .collect();
                let mut above: Vec<u32> = (0..n)
                    .filter(|&y| closures[x] & (1 << y) != 0)
                    .map(|y| colors[y])
                    .collect();
                below.sort_unstable();
                above.sort_unstable();
                (colors[x], below, above)
            })
            .collect();
        let next = assign_ids(&keys);
        if next == colors {
            return colors;
        }
        colors = next;
    }
}

fn assign_ids<K: Ord + Clone>(keys: &[K]) -> Vec<u32> {
    let mut ids = BTreeMap::new();
    let mut sorted: Vec<&K> = keys.iter().collect();
    sorted.sort();
    for key in sorted {
        let next = ids.len() as u32;
        ids.entry(key.clone()).or_insert(next);
    }
    keys.iter().map(|k| ids[k]).collect()
}

/// Cells of the refined partition, in color order.
pub(crate) fn refined_cells(s: &FiniteSpace) -> Vec<Vec<usize>> {
    let colors = refine_colors(s);
    let cell_count = colors.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut cells = vec![Vec::new(); cell_count];
    for (x, &c) in colors.iter().enumerate() {
        cells[c as usize].push(x);
    }
    cells
}

/// Twin classes: `x` and `y` are twins iff transposing them is an
/// automorphism. Twins are interchangeable everywhere in the matrix
/// search, so only one representative per class is ever branched on.
fn twin_classes(s: &FiniteSpace) -> Vec<u32> {
    let n = s.n();
    let mut class = vec![u32::MAX; n];
    let mut next = 0;
    for x in 0..n {
        if class[x] != u32::MAX {
            continue;
        }
        class[x] = next;
        for y in (x + 1)..n {
            if class[y] == u32::MAX && swap_is_automorphism(s, x, y) {
                class[y] = next;
            }
        }
        next += 1;
    }
    class
}

fn swap_is_automorphism(s: &FiniteSpace, x: usize, y: usize) -> bool {
    let n = s.n();
    let tau = |p: usize| {
        if p == x {
            y
        } else if p == y {
            x
        } else {
            p
        }
    };
    for a in 0..n {
        for b in 0..n {
            if s.rel(a, b) != s.rel(tau(a), tau(b)) {
                return false;
            }
        }
    }
    true
}

/// State for the minimal-matrix backtracking search.
struct Search<'a> {
    space: &'a FiniteSpace,
    n: usize,
    /// Cell index for each position of the output labeling.
    block_of_pos: Vec<usize>,
    cells: Vec<Vec<usize>>,
    twin: Vec<u32>,
    assigned: Vec<usize>,
    used: u32,
    /// Bits of the candidate matrix in placement order: when position `p`
    /// is filled, bits `M[0][p], …, M[p-1][p], M[p][0], …, M[p][p]` become
    /// determined (2p+1 bits per step).
    current: Vec<u8>,
    best: Option<Vec<u8>>,
    best_assignment: Vec<usize>,
}

/// Prefix relation of `current` to `best` along the active branch.
#[derive(Clone, Copy, PartialEq)]
enum Prefix {
    Equal,
    Smaller,
}

impl<'a> Search<'a> {
    fn segment_range(p: usize) -> (usize, usize) {
        (p * p, p * p + 2 * p + 1)
    }

    fn write_segment(&mut self, p: usize, candidate: usize) {
        let (start, _) = Self::segment_range(p);
        let mut idx = start;
        for i in 0..p {
            self.current[idx] = self.space.rel(self.assigned[i], candidate) as u8;
            idx += 1;
        }
        for j in 0..p {
            self.current[idx] = self.space.rel(candidate, self.assigned[j]) as u8;
            idx += 1;
        }
        self.current[idx] = 1; // reflexive diagonal bit
    }

    fn compare_segment(&self, p: usize) -> Ordering {
        let best = self.best.as_ref().expect("compare needs a best");
        let (start, end) = Self::segment_range(p);
        self.current[start..end].cmp(&best[start..end])
    }

    /// Returns true iff `best` was replaced somewhere in this subtree.
    fn descend(&mut self, p: usize, prefix: Prefix) -> bool {
        if p == self.n {
            if prefix == Prefix::Smaller || self.best.is_none() {
                self.best = Some(self.current.clone());
                self.best_assignment = self.assigned.clone();
                return true;
            }
            return false;
        }
        let cell = self.block_of_pos[p];
        let mut prefix = prefix;
        let mut updated_any = false;
        let mut seen_twins: u32 = 0;
        for idx in 0..self.cells[cell].len() {
            let candidate = self.cells[cell][idx];
            if self.used & (1 << candidate) != 0 {
                continue;
            }
            let twin_bit = 1 << self.twin[candidate];
            if seen_twins & twin_bit != 0 {
                continue;
            }
            seen_twins |= twin_bit;

            self.write_segment(p, candidate);
            let child_prefix = if self.best.is_none() || prefix == Prefix::Smaller {
                Prefix::Smaller
            } else {
                match self.compare_segment(p) {
                    Ordering::Greater => continue,
                    Ordering::Less => Prefix::Smaller,
                    Ordering::Equal => Prefix::Equal,
                }
            };

            self.assigned.push(candidate);
            self.used |= 1 << candidate;
            let updated = self.descend(p + 1, child_prefix);
            self.used &= !(1 << candidate);
            self.assigned.pop();

            if updated {
                // The new best runs through this node, so the prefix above
                // the segment written by the next sibling matches it.
                prefix = Prefix::Equal;
                updated_any = true;
            }
        }
        updated_any
    }
}

/// The canonical fingerprint of a space. Deterministic and invariant under
/// relabeling; two spaces yield equal keys iff some point bijection carries
/// opens to opens.
pub fn canonical_key(s: &FiniteSpace) -> CanonicalKey {
    let n = s.n();
    let cells = refined_cells(s);
    let mut block_of_pos = Vec::with_capacity(n);
    for (idx, cell) in cells.iter().enumerate() {
        block_of_pos.extend(std::iter::repeat_n(idx, cell.len()));
    }
    let mut search = Search {
        space: s,
        n,
        block_of_pos,
        twin: twin_classes(s),
        cells,
        assigned: Vec::with_capacity(n),
        used: 0,
        current: vec![0; n * n],
        best: None,
        best_assignment: Vec::new(),
    };
    search.descend(0, Prefix::Equal);

    // best_assignment[p] = original point at position p; encode row-major.
    let order = search.best_assignment;
    let mut bytes = vec![0u8; 1 + (n * n).div_ceil(8)];
    bytes[0] = n as u8;
    for i in 0..n {
        for j in 0..n {
            if s.rel(order[i], order[j]) {
                let bit = i * n + j;
                bytes[1 + bit / 8] |= 0x80 >> (bit % 8);
            }
        }
    }
    CanonicalKey(bytes)
}

/// True iff some bijection of points carries the topology of `a` onto that
/// of `b`.
pub fn are_homeomorphic(a: &FiniteSpace, b: &FiniteSpace) -> bool {
    a.n() == b.n() && canonical_key(a) == canonical_key(b)
}

/// All automorphisms of the preorder, found by cell-respecting backtracking.
/// Used to quotient multiplicity assignments during enumeration.
pub(crate) fn automorphisms(s: &FiniteSpace) -> Vec<Vec<usize>> {
    let n = s.n();
    let colors = refine_colors(s);
    let mut image = vec![usize::MAX; n];
    let mut used = 0u32;
    let mut found = Vec::new();
    fn go(
        s: &FiniteSpace,
        colors: &[u32],
        image: &mut Vec<usize>,
        used: &mut u32,
        found: &mut Vec<Vec<usize>>,
        x: usize,
    ) {
        let n = s.n();
        if x == n {
            found.push(image.clone());
            return;
        }
        for y in 0..n {
            if *used & (1 << y) != 0 || colors[y] != colors[x] {
                continue;
            }
            let ok = (0..x).all(|prev| {
                s.rel(prev, x) == s.rel(image[prev], y) && s.rel(x, prev) == s.rel(y, image[prev])
            });
            if ok {
                image[x] = y;
                *used |= 1 << y;
                go(s, colors, image, used, found, x + 1);
                *used &= !(1 << y);
                image[x] = usize::MAX;
            }
        }
    }
    go(s, &colors, &mut image, &mut used, &mut found, 0);
    found
}
