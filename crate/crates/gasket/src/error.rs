//! Error taxonomy shared across the library.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GasketError {
    /// The enclosure of cz+d contains 0 at the evaluation point.
    #[error("Moebius derivative evaluated too close to the pole")]
    PoleProximity,
    /// The pole −d/c cannot be certified to lie outside the domain disk.
    #[error("pole of the Moebius map not certified outside the domain disk")]
    PoleInDomain,
    /// The three points' triangle-area enclosure contains 0.
    #[error("points not certified non-collinear")]
    CollinearPoints,
    /// Descartes discriminant k1k2 + k2k3 + k3k1 has no certified square root.
    #[error("negative discriminant in the Descartes relation")]
    NegativeDiscriminant,
    /// Koebe factor requires 0 ≤ r < R certified.
    #[error("Koebe radii out of range (need 0 <= r < R certified)")]
    RatioOutOfRange,
    /// The closed-form majorant fails to certify h(n) ≤ h(1) for large n.
    #[error("distortion majorant does not certify the tail")]
    MajorantFailure,
    /// Requested enumeration exceeds the word budget at every depth.
    #[error("word budget too small for any certified enumeration")]
    BudgetExceeded,
    /// Z1 diverges: no finite tail bound exists for t ≤ 1/2.
    #[error("tail series diverges (exponent not certified above 1/2)")]
    TailDiverges,
    /// The simplified tail criterion holds at no N within the search cap.
    #[error("closed-form tail criterion holds at no N within the search cap")]
    ClosedFormNeverHolds,
    /// Malformed subsystem expression or step file.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GasketError>;
