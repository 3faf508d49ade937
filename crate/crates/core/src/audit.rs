//! The reconstruction analysis: group a catalog by deck, surface the
//! classes that witness non-reconstructible spaces, give per-property
//! verdicts, and verify the finitely-checkable reconstruction theorems
//! over the whole catalog.

use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::canon::CanonicalKey;
use crate::deck::{cards, multideck};
use crate::enumerate::Catalog;
use crate::props::{
    connected, locally, property_vector, totally_disconnected, AuditValue, PropertyVector,
    AUDITED_FIELD_NAMES,
};
use crate::{Error, Result};

/// Whether decks are compared as sets or as multisets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeckMode {
    Set,
    Multi,
}

impl DeckMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DeckMode::Set => "set",
            DeckMode::Multi => "multi",
        }
    }
}

impl FromStr for DeckMode {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        match text {
            "set" => Ok(DeckMode::Set),
            "multi" => Ok(DeckMode::Multi),
            other => Err(Error::MalformedCatalog(format!(
                "unknown deck mode {other:?} (expected \"set\" or \"multi\")"
            ))),
        }
    }
}

impl fmt::Display for DeckMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// All catalog members sharing one deck (or multi-deck) fingerprint.
#[derive(Debug, Clone, Serialize)]
pub struct DeckClass {
    pub fingerprint: String,
    pub members: Vec<CanonicalKey>,
}

/// Everything the audit needs about one catalog member, computed once.
struct MemberAnalysis {
    key: CanonicalKey,
    set_fingerprint: String,
    multi_fingerprint: String,
    props: PropertyVector,
    card_props: Vec<PropertyVector>,
    locally_connected: bool,
    locally_td: bool,
    card_locally_connected: Vec<bool>,
    card_locally_td: Vec<bool>,
}

fn analyze(catalog: &Catalog) -> Result<Vec<MemberAnalysis>> {
    if catalog.n < 2 {
        return Err(Error::SpaceTooSmall {
            n: catalog.n,
            min: 2,
        });
    }
    catalog
        .entries
        .par_iter()
        .map(|entry| {
            let member_cards = cards(&entry.space)?;
            let card_props = member_cards
                .iter()
                .map(property_vector)
                .collect::<Result<Vec<_>>>()?;
            let md = multideck(&entry.space)?;
            Ok(MemberAnalysis {
                key: entry.key.clone(),
                set_fingerprint: md.key_set().fingerprint(),
                multi_fingerprint: md.fingerprint(),
                props: entry.props.clone(),
                card_props,
                locally_connected: locally(&entry.space, connected),
                locally_td: locally(&entry.space, totally_disconnected),
                card_locally_connected: member_cards
                    .iter()
                    .map(|c| locally(c, connected))
                    .collect(),
                card_locally_td: member_cards
                    .iter()
                    .map(|c| locally(c, totally_disconnected))
                    .collect(),
            })
        })
        .collect()
}

fn group_from(analyses: &[MemberAnalysis], mode: DeckMode) -> Vec<DeckClass> {
    let mut groups: BTreeMap<&str, Vec<CanonicalKey>> = BTreeMap::new();
    for member in analyses {
        let fingerprint = match mode {
            DeckMode::Set => &member.set_fingerprint,
            DeckMode::Multi => &member.multi_fingerprint,
        };
        groups.entry(fingerprint).or_default().push(member.key.clone());
    }
    groups
        .into_iter()
        .map(|(fingerprint, members)| DeckClass {
            fingerprint: fingerprint.to_string(),
            members,
        })
        .collect()
}

/// Partition of the catalog by deck fingerprint, classes sorted by
/// fingerprint and members by key.
pub fn group_by_deck(catalog: &Catalog, mode: DeckMode) -> Result<Vec<DeckClass>> {
    Ok(group_from(&analyze(catalog)?, mode))
}

/// The classes with at least two members: each witnesses spaces that are
/// not reconstructible at this size (in the chosen mode). At `n = 2` this
/// is the known degenerate case, reported but not a finding.
pub fn find_collisions(catalog: &Catalog, mode: DeckMode) -> Result<Vec<DeckClass>> {
    Ok(group_by_deck(catalog, mode)?
        .into_iter()
        .filter(|class| class.members.len() >= 2)
        .collect())
}

/// Verdict for one invariant: either constant on every collision class, or
/// refuted by a witness class.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyVerdict {
    pub reconstructible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PropertyWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyWitness {
    pub fingerprint: String,
    pub members: Vec<CanonicalKey>,
    pub values: Vec<AuditValue>,
}

fn property_audit_from(
    analyses: &[MemberAnalysis],
    classes: &[DeckClass],
) -> BTreeMap<String, PropertyVerdict> {
    let by_key: BTreeMap<&CanonicalKey, &PropertyVector> =
        analyses.iter().map(|m| (&m.key, &m.props)).collect();

    let mut table: BTreeMap<String, PropertyVerdict> = AUDITED_FIELD_NAMES
        .iter()
        .map(|&name| {
            (
                name.to_string(),
                PropertyVerdict {
                    reconstructible: true,
                    witness: None,
                },
            )
        })
        .collect();
    table.insert(
        "isolated_count_t1".to_string(),
        PropertyVerdict {
            reconstructible: true,
            witness: None,
        },
    );

    for class in classes.iter().filter(|c| c.members.len() >= 2) {
        let vectors: Vec<&PropertyVector> =
            class.members.iter().map(|k| by_key[k]).collect();
        for (idx, &name) in AUDITED_FIELD_NAMES.iter().enumerate() {
            let values: Vec<AuditValue> =
                vectors.iter().map(|v| v.audited_fields()[idx].1).collect();
            if values.windows(2).any(|w| w[0] != w[1]) {
                let verdict = table.get_mut(name).expect("field present");
                if verdict.reconstructible {
                    verdict.reconstructible = false;
                    verdict.witness = Some(PropertyWitness {
                        fingerprint: class.fingerprint.clone(),
                        members: class.members.clone(),
                        values,
                    });
                }
            }
        }
        // The isolated-point count restricted to T1 members, where the
        // reconstruction theorem actually applies.
        let t1_members: Vec<&CanonicalKey> = class
            .members
            .iter()
            .filter(|k| by_key[*k].t1)
            .collect();
        if t1_members.len() >= 2 {
            let values: Vec<AuditValue> = t1_members
                .iter()
                .map(|k| AuditValue::Count(by_key[*k].isolated_count))
                .collect();
            if values.windows(2).any(|w| w[0] != w[1]) {
                let verdict = table.get_mut("isolated_count_t1").expect("present");
                if verdict.reconstructible {
                    verdict.reconstructible = false;
                    verdict.witness = Some(PropertyWitness {
                        fingerprint: class.fingerprint.clone(),
                        members: t1_members.into_iter().cloned().collect(),
                        values,
                    });
                }
            }
        }
    }
    table
}

/// Per-field reconstructibility verdicts over the deck classes of the
/// catalog.
pub fn property_audit(
    catalog: &Catalog,
    mode: DeckMode,
) -> Result<BTreeMap<String, PropertyVerdict>> {
    let analyses = analyze(catalog)?;
    let classes = group_from(&analyses, mode);
    Ok(property_audit_from(&analyses, &classes))
}

/// Result of one finite-analog check: these may legitimately record
/// counterexamples without failing the suite.
#[derive(Debug, Clone, Serialize)]
pub struct AnalogReport {
    pub holds: bool,
    pub witness_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_witness: Option<AnalogWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalogWitness {
    pub space: CanonicalKey,
    pub value: usize,
    pub card_values: Vec<usize>,
}

/// Outcome of the proved-theorem checks plus the labeled finite analogs.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremSuiteReport {
    pub theorems: BTreeMap<String, String>,
    pub analogs: BTreeMap<String, AnalogReport>,
}

impl TheoremSuiteReport {
    /// True iff every proved check passed (analogs never count).
    pub fn all_proved_pass(&self) -> bool {
        self.theorems.values().all(|v| v == "pass")
    }
}

fn outcome(failure: Option<String>) -> String {
    match failure {
        None => "pass".to_string(),
        Some(reason) => format!("fail: {reason}"),
    }
}

fn t3(p: &PropertyVector) -> bool {
    // Cumulative convention: higher separation axioms include lower ones
    // (on finite spaces t1 already forces t2).
    p.t1 && p.regular
}

fn t4(p: &PropertyVector) -> bool {
    p.t1 && p.normal
}

type Flag = fn(&PropertyVector) -> bool;

fn theorem_suite_from(n: usize, analyses: &[MemberAnalysis]) -> TheoremSuiteReport {
    let mut theorems = BTreeMap::new();
    let mut analogs = BTreeMap::new();

    // (a) For i in {0,1,2} at n >= 3: X is T_i iff every card is T_i.
    let axes: [(&str, Flag); 3] = [("t0", |p| p.t0), ("t1", |p| p.t1), ("t2", |p| p.t2)];
    let mut failure = None;
    if n >= 3 {
        'outer_a: for m in analyses {
            for (name, f) in axes {
                if f(&m.props) != m.card_props.iter().all(f) {
                    failure = Some(format!("{}: {name} not determined by cards", m.key));
                    break 'outer_a;
                }
            }
        }
    }
    theorems.insert("a".into(), outcome(failure));

    // (b) If all cards are T3 and one is T4, then X is T4.
    let mut failure = None;
    if n >= 3 {
        for m in analyses {
            if m.card_props.iter().all(t3) && m.card_props.iter().any(t4) && !t4(&m.props) {
                failure = Some(format!("{}: T3 cards with a T4 card but X not T4", m.key));
                break;
            }
        }
    }
    theorems.insert("b".into(), outcome(failure));

    // (c) Isolated-count rules on T1 spaces: every card loses at most the
    // deleted point, and the count is recoverable from the card counts.
    let mut failure = None;
    if n >= 3 {
        'outer_c: for m in analyses.iter().filter(|m| m.props.t1) {
            let ix = m.props.isolated_count;
            let card_counts: Vec<usize> =
                m.card_props.iter().map(|p| p.isolated_count).collect();
            for &iy in &card_counts {
                if iy != ix && iy + 1 != ix {
                    failure = Some(format!("{}: card count {iy} vs i(X)={ix}", m.key));
                    break 'outer_c;
                }
            }
            let all_equal = card_counts.windows(2).all(|w| w[0] == w[1]);
            let expected = if all_equal {
                let k = card_counts[0];
                if k == 0 {
                    0
                } else {
                    k + 1
                }
            } else {
                *card_counts.iter().max().expect("n >= 3 cards")
            };
            if ix != expected {
                failure = Some(format!(
                    "{}: i(X)={ix} but card counts {card_counts:?} predict {expected}",
                    m.key
                ));
                break;
            }
        }
    }
    theorems.insert("c".into(), outcome(failure));

    // (d) A T1 space with a positive (finite) number of isolated points is
    // reconstructible: no set-deck class may pair it with anything else.
    let mut failure = None;
    if n >= 3 {
        let by_key: BTreeMap<&CanonicalKey, &PropertyVector> =
            analyses.iter().map(|m| (&m.key, &m.props)).collect();
        for class in group_from(analyses, DeckMode::Set) {
            let has_t1_isolated = class
                .members
                .iter()
                .any(|k| by_key[k].t1 && by_key[k].isolated_count > 0);
            if has_t1_isolated && class.members.len() > 1 {
                failure = Some(format!(
                    "class {} holds a T1 space with isolated points plus {} others",
                    class.fingerprint,
                    class.members.len() - 1
                ));
                break;
            }
        }
    }
    theorems.insert("d".into(), outcome(failure));

    // (e)/(f) Weight and density finite analogs. The corresponding claims
    // are stated for infinite cardinal invariants, so counterexamples are
    // recorded rather than failed.
    let analog = |pick: fn(&PropertyVector) -> usize, fold_max: bool| -> AnalogReport {
        let mut witness_count = 0;
        let mut first_witness = None;
        if n >= 3 {
            for m in analyses {
                let card_values: Vec<usize> = m.card_props.iter().map(pick).collect();
                let folded = if fold_max {
                    *card_values.iter().max().expect("cards")
                } else {
                    *card_values.iter().min().expect("cards")
                };
                if pick(&m.props) != folded {
                    witness_count += 1;
                    if first_witness.is_none() {
                        first_witness = Some(AnalogWitness {
                            space: m.key.clone(),
                            value: pick(&m.props),
                            card_values,
                        });
                    }
                }
            }
        }
        AnalogReport {
            holds: witness_count == 0,
            witness_count,
            first_witness,
        }
    };
    analogs.insert("e".into(), analog(|p| p.weight, true));
    analogs.insert("f".into(), analog(|p| p.density, false));

    // (g) Kline: a connected space (n >= 3) has at most one dispersion
    // point, and one totally disconnected card forces all others connected.
    let mut failure = None;
    if n >= 3 {
        for m in analyses.iter().filter(|m| m.props.connected) {
            if m.props.dispersion_points.len() > 1 {
                failure = Some(format!(
                    "{}: {} dispersion points",
                    m.key,
                    m.props.dispersion_points.len()
                ));
                break;
            }
            let td_cards: Vec<usize> = (0..m.card_props.len())
                .filter(|&i| m.card_props[i].totally_disconnected)
                .collect();
            if !td_cards.is_empty() {
                let others_connected = (0..m.card_props.len())
                    .filter(|i| !td_cards.contains(i))
                    .all(|i| m.card_props[i].connected);
                if td_cards.len() > 1 || !others_connected {
                    failure = Some(format!(
                        "{}: totally disconnected card without all others connected",
                        m.key
                    ));
                    break;
                }
            }
        }
    }
    theorems.insert("g".into(), outcome(failure));

    // (h) Total disconnectedness deck criterion at n >= 3.
    let mut failure = None;
    if n >= 3 {
        for m in analyses {
            let all_cards_td = m.card_props.iter().all(|p| p.totally_disconnected);
            if m.props.totally_disconnected != all_cards_td {
                failure = Some(format!(
                    "{}: total disconnectedness not determined by cards",
                    m.key
                ));
                break;
            }
        }
    }
    theorems.insert("h".into(), outcome(failure));

    // (i) Folklore: with more than three points, all cards connected forces
    // X connected; with no isolated points one connected card suffices.
    let mut failure = None;
    if n >= 3 {
        for m in analyses {
            if n >= 4
                && m.card_props.iter().all(|p| p.connected)
                && !m.props.connected
            {
                failure = Some(format!("{}: all cards connected, X disconnected", m.key));
                break;
            }
            if m.props.isolated_count == 0
                && m.card_props.iter().any(|p| p.connected)
                && !m.props.connected
            {
                failure = Some(format!(
                    "{}: no isolated points, a connected card, X disconnected",
                    m.key
                ));
                break;
            }
        }
    }
    theorems.insert("i".into(), outcome(failure));

    // (j) Local properties are determined by the cards in T1 spaces,
    // instantiated with P = connected and P = totally disconnected.
    let mut failure = None;
    if n >= 3 {
        for m in analyses.iter().filter(|m| m.props.t1) {
            let conn_ok =
                m.locally_connected == m.card_locally_connected.iter().all(|&b| b);
            let td_ok = m.locally_td == m.card_locally_td.iter().all(|&b| b);
            if !conn_ok || !td_ok {
                failure = Some(format!("{}: local property mismatch", m.key));
                break;
            }
        }
    }
    theorems.insert("j".into(), outcome(failure));

    TheoremSuiteReport { theorems, analogs }
}

/// Runs every theorem check over the whole catalog. The proved checks must
/// pass on any correct implementation; failures are reported, not raised.
pub fn theorem_suite(catalog: &Catalog) -> Result<TheoremSuiteReport> {
    if catalog.n < 2 {
        // No cards exist; every check is vacuous.
        return Ok(theorem_suite_from(catalog.n, &[]));
    }
    let analyses = analyze(catalog)?;
    Ok(theorem_suite_from(catalog.n, &analyses))
}

/// The full audit document.
#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub n: usize,
    pub mode: String,
    /// True only for `n = 2`, where all three spaces share the deck
    /// `{point}`; the collision there is a known degeneracy, not a finding.
    pub degenerate: bool,
    pub classes: Vec<DeckClass>,
    pub collisions: Vec<DeckClass>,
    pub property_audit: BTreeMap<String, PropertyVerdict>,
    pub theorems: BTreeMap<String, String>,
    pub analogs: BTreeMap<String, AnalogReport>,
}

/// Groups, collides, audits properties, and runs the theorem suite in one
/// deterministic pass over the catalog.
pub fn audit_report(catalog: &Catalog, mode: DeckMode) -> Result<AuditReport> {
    let analyses = analyze(catalog)?;
    let classes = group_from(&analyses, mode);
    let collisions: Vec<DeckClass> = classes
        .iter()
        .filter(|c| c.members.len() >= 2)
        .cloned()
        .collect();
    let property_audit = property_audit_from(&analyses, &classes);
    let suite = theorem_suite_from(catalog.n, &analyses);
    Ok(AuditReport {
        n: catalog.n,
        mode: mode.as_str().to_string(),
        degenerate: catalog.n == 2,
        classes,
        collisions,
        property_audit,
        theorems: suite.theorems,
        analogs: suite.analogs,
    })
}
