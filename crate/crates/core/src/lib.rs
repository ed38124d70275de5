//! Construction, verification, decoding-complexity analysis, and
//! Monte-Carlo validation of low ML-decoding-complexity space-time
//! block codes.
//!
//! The crate builds three families of linear-dispersion designs —
//! delay-optimal multigroup decodable codes, fast-group-decodable codes
//! for even antenna counts, and fast-decodable extensions of both — and
//! provides the machinery around them: structural verification
//! (real-linear independence, Hurwitz-Radon orthogonality, full-rank
//! weights), exact rate arithmetic, decoding-cost exponent accounting
//! with a base-design selection search, full-diversity PAM scaling
//! searches, and exhaustive/structured ML decoders validated against
//! each other in Rayleigh fading.

pub mod catalog;
pub mod design;
pub mod diversity;
pub mod error;
pub mod fd;
pub mod fgd;
pub mod linalg;
pub mod multigroup;
pub mod sim;
pub mod tables;

pub use design::{Design, GroupStructure, Rational, VerifyReport};
pub use error::{Error, Result};
pub use linalg::{Complex64, ComplexMatrix, Tolerance};
