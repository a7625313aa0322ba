//! Ihara zeta functions and primitive length spectra of periodic graphs.
//!
//! A simple `(q+1)`-regular periodic graph with a free action of a finitely
//! generated abelian group `Γ` is presented by its finite quotient plus a
//! voltage in `Γ` on each edge ([`graph::VoltageGraph`]). The crate computes
//! the primitive length spectrum two independent ways:
//!
//! * [`oracle::census`] enumerates reduced closed walks of the quotient with
//!   identity voltage, up to rotation;
//! * [`zeta::log_zeta_series`] expands `log Z` exactly from the adjacency
//!   matrix over the group ring and inverts it with [`zeta::pl_from_series`].
//!
//! Numeric evaluation of the von Neumann determinant ([`zeta::det_gamma_numeric`])
//! and of the completed zeta function ([`zeta::xi_eval`]) supports
//! functional-equation checks; [`lab`] holds the conjugation and spectrum
//! comparison experiments.

pub mod error;
pub mod exec;
pub mod graph;
pub mod group;
pub mod lab;
pub mod matrix;
pub mod oracle;
pub mod quadrature;
pub mod ring;
pub mod series;
pub mod zeta;

pub use error::{Error, Result};
pub use exec::Execution;
pub use graph::{AdjacencyMatrix, Edge, OrientedStep, ValidationReport, VoltageGraph};
pub use group::{GroupElement, GroupSpec};
pub use oracle::{census, LengthSpectrum};
pub use ring::{GroupRingElement, Rational, TorusCharacterPoint};
pub use zeta::{log_zeta_series, pl_from_series, ZetaSeries};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
