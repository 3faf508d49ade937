//! Cards, decks, and multi-decks. Decks store canonical keys rather than
//! card spaces: the audit compares millions of decks, and a representative
//! card is always recoverable from its key.

use serde::{Serialize, Serializer};

use crate::canon::{canonical_key, CanonicalKey};
use crate::space::FiniteSpace;
use crate::{Error, Result};

/// The set of homeomorphism types of all one-point-deleted subspaces,
/// as a sorted, deduplicated list of keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deck {
    keys: Vec<CanonicalKey>,
}

/// The deck with multiplicities: `(key, count)` sorted by key, counts
/// summing to `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiDeck {
    entries: Vec<(CanonicalKey, usize)>,
}

impl Deck {
    pub fn keys(&self) -> &[CanonicalKey] {
        &self.keys
    }

    /// Sorted keys joined by `+`; used to group decks in the audit.
    pub fn fingerprint(&self) -> String {
        self.keys
            .iter()
            .map(CanonicalKey::to_hex)
            .collect::<Vec<_>>()
            .join("+")
    }
}

impl MultiDeck {
    pub fn entries(&self) -> &[(CanonicalKey, usize)] {
        &self.entries
    }

    /// The underlying key set, which equals the deck.
    pub fn key_set(&self) -> Deck {
        Deck {
            keys: self.entries.iter().map(|(k, _)| k.clone()).collect(),
        }
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    pub fn fingerprint(&self) -> String {
        self.entries
            .iter()
            .map(|(k, c)| format!("{}*{c}", k.to_hex()))
            .collect::<Vec<_>>()
            .join("+")
    }
}

impl Serialize for Deck {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.keys.serialize(serializer)
    }
}

impl Serialize for MultiDeck {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(serializer)
    }
}

/// All `n` cards of a space, indexed by the deleted point.
pub fn cards(s: &FiniteSpace) -> Result<Vec<FiniteSpace>> {
    if s.n() < 2 {
        return Err(Error::SpaceTooSmall { n: s.n(), min: 2 });
    }
    (0..s.n()).map(|x| s.delete_point(x)).collect()
}

/// Canonical keys of all cards, deduplicated and sorted.
pub fn deck(s: &FiniteSpace) -> Result<Deck> {
    Ok(multideck(s)?.key_set())
}

/// Canonical keys of all cards with multiplicities, sorted by key.
pub fn multideck(s: &FiniteSpace) -> Result<MultiDeck> {
    let mut keys: Vec<CanonicalKey> = cards(s)?.iter().map(canonical_key).collect();
    debug_assert!(keys.iter().all(|k| k.point_count() == s.n() - 1));
    keys.sort_unstable();
    let mut entries: Vec<(CanonicalKey, usize)> = Vec::new();
    for key in keys {
        match entries.last_mut() {
            Some((last, count)) if *last == key => *count += 1,
            _ => entries.push((key, 1)),
        }
    }
    Ok(MultiDeck { entries })
}

/// Set equality of decks. One-point spaces have no cards; they compare
/// equal to each other and to nothing else.
pub fn same_deck(a: &FiniteSpace, b: &FiniteSpace) -> bool {
    match (a.n() < 2, b.n() < 2) {
        (true, true) => true,
        (false, false) => deck(a).expect("n >= 2") == deck(b).expect("n >= 2"),
        _ => false,
    }
}

/// Multiset equality of decks; implies `same_deck`.
pub fn same_multideck(a: &FiniteSpace, b: &FiniteSpace) -> bool {
    match (a.n() < 2, b.n() < 2) {
        (true, true) => true,
        (false, false) => multideck(a).expect("n >= 2") == multideck(b).expect("n >= 2"),
        _ => false,
    }
}

/// The `{"deck": .., "multideck": ..}` document emitted by the CLI.
#[derive(Debug, Serialize)]
pub struct DeckSummary {
    pub deck: Deck,
    pub multideck: MultiDeck,
}

pub fn deck_summary(s: &FiniteSpace) -> Result<DeckSummary> {
    Ok(DeckSummary {
        deck: deck(s)?,
        multideck: multideck(s)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{chain, discrete, indiscrete, point, sierpinski};

    fn i2_plus_point() -> FiniteSpace {
        indiscrete(2).disjoint_sum(&point()).unwrap()
    }

    #[test]
    fn cards_examples() {
        let cards_s = cards(&sierpinski()).unwrap();
        assert!(cards_s.iter().all(|c| c.n() == 1));

        for card in cards(&chain(3)).unwrap() {
            assert!(crate::canon::are_homeomorphic(&card, &sierpinski()));
        }

        let cs = cards(&i2_plus_point()).unwrap();
        assert!(crate::canon::are_homeomorphic(&cs[0], &discrete(2)));
        assert!(crate::canon::are_homeomorphic(&cs[1], &discrete(2)));
        assert!(crate::canon::are_homeomorphic(&cs[2], &indiscrete(2)));
    }

    #[test]
    fn cards_require_two_points() {
        assert!(matches!(
            cards(&point()),
            Err(Error::SpaceTooSmall { n: 1, min: 2 })
        ));
    }

    #[test]
    fn deck_examples() {
        let d = deck(&discrete(3)).unwrap();
        assert_eq!(d.keys(), &[canonical_key(&discrete(2))]);
        let md = multideck(&discrete(3)).unwrap();
        assert_eq!(md.entries()[0].1, 3);

        let md = multideck(&i2_plus_point()).unwrap();
        let expected = {
            let mut pair = vec![
                (canonical_key(&discrete(2)), 2),
                (canonical_key(&indiscrete(2)), 1),
            ];
            pair.sort();
            pair
        };
        assert_eq!(md.entries(), &expected[..]);
        assert_eq!(md.key_set().keys().len(), 2);
    }

    #[test]
    fn all_two_point_spaces_share_the_point_deck() {
        // This degeneracy is why reconstruction statements start at 3 points.
        let point_key = canonical_key(&point());
        for s in [discrete(2), indiscrete(2), sierpinski()] {
            let d = deck(&s).unwrap();
            assert_eq!(d.keys(), std::slice::from_ref(&point_key));
            assert_eq!(multideck(&s).unwrap().entries(), &[(point_key.clone(), 2)]);
        }
        assert!(same_deck(&discrete(2), &sierpinski()));
        assert!(same_multideck(&discrete(2), &sierpinski()));
    }

    #[test]
    fn same_deck_examples() {
        assert!(same_deck(&chain(3), &chain(3)));
        assert!(same_multideck(&chain(3), &chain(3)));
        assert!(!same_deck(&discrete(3), &chain(3)));
        assert!(!same_deck(&point(), &sierpinski()));
        assert!(same_deck(&point(), &point()));
    }

    #[test]
    fn multideck_counts_sum_to_n() {
        for s in [chain(4), discrete(4), i2_plus_point()] {
            let md = multideck(&s).unwrap();
            assert_eq!(md.total(), s.n());
            assert_eq!(md.key_set(), deck(&s).unwrap());
        }
    }

    #[test]
    fn deck_is_relabel_invariant() {
        let s = i2_plus_point();
        for perm in [[1, 2, 0], [2, 0, 1], [0, 2, 1]] {
            assert_eq!(deck(&s.relabel(&perm)).unwrap(), deck(&s).unwrap());
            assert_eq!(multideck(&s.relabel(&perm)).unwrap(), multideck(&s).unwrap());
        }
    }

    #[test]
    fn deck_summary_serializes_as_specified() {
        let json = serde_json::to_value(deck_summary(&sierpinski()).unwrap()).unwrap();
        let point_hex = canonical_key(&point()).to_hex();
        assert_eq!(json["deck"], serde_json::json!([point_hex]));
        assert_eq!(json["multideck"], serde_json::json!([[point_hex, 2]]));
    }
}
