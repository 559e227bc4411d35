//! Canonical bases of weakly holomorphic modular forms on `Gamma_0(N)` for
//! the genus-zero levels `N = 6, 10, 12, 18`, built from eta quotients with
//! exact arithmetic, plus executable checks of the identities and
//! congruences their Fourier coefficients satisfy.
//!
//! ```
//! use sharpbasis::{basis::BasisCache, Space};
//!
//! let cache = BasisCache::new();
//! let f = cache.element(6, 0, Space::M, 1, 8).unwrap();
//! assert_eq!(f.expansion.render_terms(4), "q^-1 + 6q + 4q^2 - 3q^3");
//! ```

pub mod basis;
pub mod cli;
pub mod error;
pub mod eta;
pub mod leveldata;
pub mod operators;
pub mod series;
pub mod verify;

pub use basis::{BasisCache, BasisElement, Space};
pub use error::{Error, Result};
pub use eta::{EtaCombination, EtaQuotient};
pub use leveldata::{get_level, LevelData};
pub use series::{QSeries, Rational};

/// Crate version, reported in machine-readable output.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
