//! Finite topological spaces and the deck machinery built on them.
//!
//! A topology on `{0..n-1}` is stored in its specialization-preorder form:
//! `rel(x, y)` holds iff every open set containing `y` contains `x`, and the
//! open sets are exactly the down-closed subsets of that preorder. On top of
//! this sit canonical keys (relabel-invariant fingerprints whose equality is
//! homeomorphism), decks and multi-decks of one-point-deleted subspaces,
//! topological invariants, isomorph-free catalogs of all spaces on `n`
//! points, and an audit layer that groups a catalog by deck, hunts for
//! deck collisions, and verifies a battery of reconstruction theorems.
//!
//! # Example
//!
//! ```rust
//! use topodeck_core::{canon, deck, space};
//!
//! // Every card of the 3-chain is a 2-chain.
//! let chain = space::chain(3);
//! let md = deck::multideck(&chain).unwrap();
//! assert_eq!(md.entries().len(), 1);
//! assert_eq!(md.entries()[0].1, 3);
//!
//! // Canonical keys do not care about point labels.
//! let relabeled = chain.relabel(&[2, 0, 1]);
//! assert!(canon::are_homeomorphic(&chain, &relabeled));
//!
//! // The two-point spaces all share the deck {point}: the reason
//! // reconstruction statements start at three points.
//! assert!(deck::same_deck(&space::sierpinski(), &space::discrete(2)));
//! ```

// Loop indices here are point labels of the space under examination;
// iterator rewrites obscure the bit arithmetic.
#![allow(clippy::needless_range_loop)]

pub mod audit;
pub mod canon;
pub mod deck;
pub mod enumerate;
mod error;
pub mod props;
pub mod space;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
