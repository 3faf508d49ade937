//! Isomorph-free exhaustive generation of all topologies on `n` points,
//! plus the independent labeled-space oracle used to validate it.
//!
//! Generation runs over posets: preorders up to isomorphism are posets with
//! a point-multiplicity (≥ 1) on each element, taken up to poset
//! automorphism. Posets are grown one maximal element at a time with
//! isomorph rejection at every level, which is vastly smaller than labeled
//! enumeration at `n = 7`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::canon::{automorphisms, canonical_key, CanonicalKey};
use crate::props::{property_vector, PropertyVector};
use crate::space::{point, FiniteSpace, PointSet};
use crate::{Error, Result};

/// Full catalogs are supported up to this size.
pub const MAX_CATALOG_POINTS: usize = 7;

/// The brute-force labeled oracle is supported up to this size.
pub const MAX_ORACLE_POINTS: usize = 5;

const METHOD: &str = "poset-augmentation/multiplicity-expansion";

/// One homeomorphism class: its key, a representative space, and the
/// representative's invariants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub key: CanonicalKey,
    pub space: FiniteSpace,
    pub props: PropertyVector,
}

/// Exactly one representative per homeomorphism class of topologies on `n`
/// points, sorted by key with no duplicates.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub n: usize,
    pub method: String,
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &CanonicalKey> {
        self.entries.iter().map(|e| &e.key)
    }
}

/// All posets on `1..=n` elements, one representative per isomorphism
/// class, grown by adding one maximal element over each down-set of each
/// parent. Children are deduplicated by canonical key per level, so levels
/// are sorted by key and deterministic.
fn posets_up_to(n: usize) -> Vec<Vec<FiniteSpace>> {
    let mut levels: Vec<Vec<FiniteSpace>> = vec![vec![point()]];
    for k in 1..n {
        let mut next: BTreeMap<CanonicalKey, FiniteSpace> = BTreeMap::new();
        for parent in &levels[k - 1] {
            for down_set in 0..(1u32 << k) {
                if !parent.is_open(down_set) {
                    continue;
                }
                let mut min_open = parent.min_open_table().to_vec();
                min_open.push(down_set | (1 << k));
                let child = FiniteSpace::from_min_open(min_open)
                    .expect("a maximal element over a down-set keeps a poset");
                next.entry(canonical_key(&child)).or_insert(child);
            }
        }
        levels.push(next.into_values().collect());
    }
    levels
}

/// All ways to write `total` as `parts` positive integers, in
/// lexicographic order.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 1..=(total - parts + 1) {
            prefix.push(first);
            go(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts >= 1 && total >= parts {
        go(total, parts, &mut Vec::new(), &mut out);
    }
    out
}

/// Multiplicity vectors are kept only if lexicographically minimal in
/// their orbit under the poset's automorphisms.
fn is_orbit_minimal(m: &[usize], automorphisms: &[Vec<usize>]) -> bool {
    automorphisms.iter().all(|sigma| {
        let permuted: Vec<usize> = sigma.iter().map(|&i| m[i]).collect();
        permuted[..] >= m[..]
    })
}

/// Blows a poset up into a preorder by replacing element `e` with a block
/// of `m[e]` mutually equivalent points.
fn blow_up(poset: &FiniteSpace, m: &[usize]) -> FiniteSpace {
    let k = poset.n();
    let mut offset = vec![0usize; k];
    for e in 1..k {
        offset[e] = offset[e - 1] + m[e - 1];
    }
    let block_mask = |e: usize| -> PointSet { (((1u64 << m[e]) - 1) as PointSet) << offset[e] };
    let mut min_open = Vec::with_capacity(m.iter().sum());
    for e in 0..k {
        let mut u = 0;
        for below in 0..k {
            if poset.rel(below, e) {
                u |= block_mask(below);
            }
        }
        for _ in 0..m[e] {
            min_open.push(u);
        }
    }
    FiniteSpace::from_min_open(min_open).expect("block expansion of a poset is a preorder")
}

/// One representative per homeomorphism class of topologies on `n` points.
pub fn enumerate_upto_homeo(n: usize) -> Result<Catalog> {
    if n == 0 || n > MAX_CATALOG_POINTS {
        return Err(Error::ScaleUnsupported {
            n,
            min: 1,
            max: MAX_CATALOG_POINTS,
        });
    }
    let levels = posets_up_to(n);
    let mut representatives = Vec::new();
    for (level, posets) in levels.iter().enumerate() {
        let k = level + 1;
        let splits = compositions(n, k);
        for poset in posets {
            let autos = automorphisms(poset);
            for m in &splits {
                if is_orbit_minimal(m, &autos) {
                    representatives.push(blow_up(poset, m));
                }
            }
        }
    }
    let mut entries = representatives
        .into_par_iter()
        .map(|space| {
            let props = property_vector(&space)?;
            Ok(CatalogEntry {
                key: canonical_key(&space),
                space,
                props,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| a.key.cmp(&b.key));
    for pair in entries.windows(2) {
        assert!(
            pair[0].key < pair[1].key,
            "duplicate class {} escaped the orbit filter",
            pair[0].key
        );
    }
    Ok(Catalog {
        n,
        method: METHOD.to_string(),
        entries,
    })
}

/// Visits every reflexive-transitive relation on `n` labeled points by
/// brute force over the `2^(n²−n)` off-diagonal bit patterns, returning
/// how many there are. This is the ground-truth generator the catalog is
/// checked against.
pub fn for_each_labeled_preorder(
    n: usize,
    mut visit: impl FnMut(&FiniteSpace),
) -> Result<u64> {
    if n == 0 || n > MAX_ORACLE_POINTS {
        return Err(Error::ScaleUnsupported {
            n,
            min: 1,
            max: MAX_ORACLE_POINTS,
        });
    }
    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y)))
        .collect();
    let mut count = 0;
    let mut rows = vec![0 as PointSet; n];
    for pattern in 0..(1u64 << cells.len()) {
        for x in 0..n {
            rows[x] = 1 << x;
        }
        for (bit, &(x, y)) in cells.iter().enumerate() {
            if pattern & (1 << bit) != 0 {
                rows[x] |= 1 << y;
            }
        }
        // rows[x] = {y : rel(x, y)}; transitivity is rows[y] ⊆ rows[x]
        // whenever y ∈ rows[x].
        let transitive = (0..n).all(|x| {
            (0..n).all(|y| rows[x] & (1 << y) == 0 || rows[y] & !rows[x] == 0)
        });
        if !transitive {
            continue;
        }
        count += 1;
        let min_open: Vec<PointSet> = (0..n)
            .map(|y| {
                let mut u = 0;
                for x in 0..n {
                    if rows[x] & (1 << y) != 0 {
                        u |= 1 << x;
                    }
                }
                u
            })
            .collect();
        let space = FiniteSpace::from_min_open(min_open).expect("checked preorder");
        visit(&space);
    }
    Ok(count)
}

/// Count of labeled preorders on `n` points.
pub fn oracle_labeled_count(n: usize) -> Result<u64> {
    for_each_labeled_preorder(n, |_| {})
}

// --- Catalog persistence ---------------------------------------------------
//
// JSON-lines: a header line {"n":..,"method":..,"count":..} followed by one
// entry per line, keys ascending.

#[derive(Serialize, Deserialize)]
struct CatalogHeader {
    n: usize,
    method: String,
    count: usize,
}

pub fn write_catalog<W: Write>(mut writer: W, catalog: &Catalog) -> Result<()> {
    let header = CatalogHeader {
        n: catalog.n,
        method: catalog.method.clone(),
        count: catalog.entries.len(),
    };
    serde_json::to_writer(&mut writer, &header)?;
    writer.write_all(b"\n")?;
    for entry in &catalog.entries {
        serde_json::to_writer(&mut writer, entry)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a catalog back, revalidating its structure: header counts, key
/// order, and that every stored key is the canonical key of its
/// representative.
pub fn read_catalog<R: BufRead>(reader: R) -> Result<Catalog> {
    let mut lines = reader.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::MalformedCatalog("empty file".into()))??;
    let header: CatalogHeader = serde_json::from_str(&header_line)
        .map_err(|e| Error::MalformedCatalog(format!("bad header: {e}")))?;
    let mut entries = Vec::with_capacity(header.count);
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: CatalogEntry = serde_json::from_str(&line)
            .map_err(|e| Error::MalformedCatalog(format!("entry {}: {e}", idx + 1)))?;
        if entry.space.n() != header.n {
            return Err(Error::MalformedCatalog(format!(
                "entry {}: space has {} points, catalog is for n={}",
                idx + 1,
                entry.space.n(),
                header.n
            )));
        }
        if canonical_key(&entry.space) != entry.key {
            return Err(Error::MalformedCatalog(format!(
                "entry {}: stored key {} is not the canonical key of its space",
                idx + 1,
                entry.key
            )));
        }
        entries.push(entry);
    }
    if entries.len() != header.count {
        return Err(Error::MalformedCatalog(format!(
            "header says {} entries, found {}",
            header.count,
            entries.len()
        )));
    }
    for pair in entries.windows(2) {
        if pair[0].key >= pair[1].key {
            return Err(Error::MalformedCatalog(format!(
                "keys out of order at {}",
                pair[1].key
            )));
        }
    }
    Ok(Catalog {
        n: header.n,
        method: header.method,
        entries,
    })
}
