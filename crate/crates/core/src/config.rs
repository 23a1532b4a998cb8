//! Repo-wide constants and shipped defaults.
//!
//! Everything that is a policy knob rather than a law of the protocol lives
//! here so that cross-module byte formats stay in sync.

/// The single digest algorithm used for every hash in the toolkit:
/// content hashes, Merkle roots, weight hashes, ledger chains.
pub const DIGEST_ALGORITHM: &str = "sha-256";

/// Sealing scheme identifier embedded in every sealed blob.
///
/// The current scheme is an opaque authenticated container: the payload is
/// stored as-is and bound to the sealing key by a keyed digest. Real
/// encryption is a plug-in point behind this constant.
pub const SEALING_SCHEME: &str = "opaque-keyed-hash-v1";

/// Byte width of near-duplicate shingles.
pub const SHINGLE_WIDTH: usize = 8;

/// Default Jaccard threshold above which two documents count as near-duplicates.
pub const DEFAULT_JACCARD_THRESHOLD: f64 = 0.8;

/// Default poison budget as a fraction of corpus bytes (0.01%).
pub const DEFAULT_POISON_BUDGET: f64 = 0.0001;

/// Floor for the per-signature null-match probability. The measured rate on a
/// clean model is typically zero; the floor keeps the false-positive bound
/// honest instead of claiming impossibility.
pub const NULL_MATCH_FLOOR: f64 = 1.0 / (1u64 << 40) as f64;

/// Default out-of-distribution probe length in bytes.
pub const DEFAULT_PROBE_LEN: usize = 32;

/// Default replay tolerance (max-abs weight distance). Same-platform replay
/// of this trainer is bit-exact, so the default is zero; cross-platform
/// verification should widen this.
pub const DEFAULT_REPLAY_TOLERANCE_SAME_PLATFORM: f32 = 0.0;

/// Suggested replay tolerance when verifying on different hardware.
pub const DEFAULT_REPLAY_TOLERANCE_CROSS_PLATFORM: f32 = 1e-5;

/// Scaling-law constants for loss-vs-data consistency checks.
///
/// ILLUSTRATIVE VALUES ONLY: these defaults exist so the check runs out of
/// the box; they are not validated constants for any model family. Fit or
/// override them per deployment class.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScalingConstants {
    /// Irreducible loss floor.
    pub irreducible: f64,
    /// Parameter-term coefficient.
    pub param_coeff: f64,
    /// Data-term coefficient.
    pub data_coeff: f64,
    /// Parameter-term exponent.
    pub param_exp: f64,
    /// Data-term exponent.
    pub data_exp: f64,
}

impl Default for ScalingConstants {
    fn default() -> Self {
        // Illustrative shape: loss falls off as a power law in both axes and
        // bottoms out at the irreducible floor.
        ScalingConstants {
            irreducible: 1.69,
            param_coeff: 406.4,
            data_coeff: 410.7,
            param_exp: 0.34,
            data_exp: 0.28,
        }
    }
}
