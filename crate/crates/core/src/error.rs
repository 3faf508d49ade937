use thiserror::Error;

use crate::space::PointSet;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A family of subsets is missing the empty set or the full point set.
    #[error("open family must contain the empty set and the full set")]
    MissingEmptyOrFull,

    /// Two members whose union is not in the family. The witnesses are the
    /// offending subsets as bit-sets.
    #[error("family is not closed under union: witness pair {{{}}}, {{{}}}", format_set(*.0), format_set(*.1))]
    NotUnionClosed(PointSet, PointSet),

    /// Two members whose intersection is not in the family.
    #[error("family is not closed under intersection: witness pair {{{}}}, {{{}}}", format_set(*.0), format_set(*.1))]
    NotIntersectionClosed(PointSet, PointSet),

    /// A subset mentions a point outside `{0..n-1}`.
    #[error("point {point} out of range for a space on {n} points")]
    PointOutOfRange { point: usize, n: usize },

    /// The operation needs more points than the space has.
    #[error("space on {n} points is too small for this operation (needs at least {min})")]
    SpaceTooSmall { n: usize, min: usize },

    /// The operation is capped at a smaller point count.
    #[error("space on {n} points is too large for this operation (cap is {max})")]
    SpaceTooLarge { n: usize, max: usize },

    /// Enumeration or the labeled oracle was asked for an unsupported size.
    #[error("point count {n} outside the supported range {min}..={max}")]
    ScaleUnsupported { n: usize, min: usize, max: usize },

    /// A preorder matrix that is not reflexive or not transitive.
    #[error("invalid preorder: {0}")]
    InvalidPreorder(String),

    /// A canonical key string that does not decode.
    #[error("invalid canonical key: {0}")]
    InvalidKey(String),

    /// A catalog file that fails structural validation.
    #[error("malformed catalog: {0}")]
    MalformedCatalog(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_set(set: PointSet) -> String {
    let mut parts = Vec::new();
    for point in 0..32 {
        if set & (1 << point) != 0 {
            parts.push(point.to_string());
        }
    }
    parts.join(",")
}
