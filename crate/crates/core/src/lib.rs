//! Finite-dimensional system-environment quantum dynamics and three
//! contractivity-based witnesses evaluated on the same footing:
//!
//! * `N`, the time derivative of the trace distance between two prepared
//!   system states (positive only for non-Markovian, non-contractive dynamics),
//! * `M`, the part of that derivative carried by the product-state branch,
//!   which is never positive,
//! * `C`, a witness of system-environment correlations left by the
//!   preparations, with `N ≤ M + C ≤ C`.
//!
//! The crate is organized bottom-up:
//!
//! | module | contents |
//! |---|---|
//! | [`matrix`] | dense complex matrices, `⊗`, partial trace, Hermitian eigendecomposition, trace norm, `exp(−iHs)` |
//! | [`state`] | validated density matrices, joint states, correlation matrices, trace distance |
//! | [`dynamics`] | Hamiltonian schedules, propagators, the reduced dynamical map, Choi-based CP check |
//! | [`preparation`] | trace-preserving preparations and the post-preparation split `ρ_j = ρ_j^S ⊗ ρ^E + μ_j` |
//! | [`witness`] | `D`, `N`, `M`, `C`, inequality reports, time scans, state-pair search |
//! | [`catalog`] | named models (dephasing, random, uncorrelated controls) |
//! | [`suites`] | seeded property suites over random instances |
//! | [`io`] | plain-text state and Hamiltonian files |
//!
//! ```
//! use nmwitness::catalog::{dephasing_preparations, model_dephasing};
//! use nmwitness::preparation::prepare_pair;
//! use nmwitness::witness::{inequality_report, WitnessOptions};
//!
//! let model = model_dephasing(1.0, 1.0, [0.0; 3], [0.0; 3])?;
//! let (p1, p2) = dephasing_preparations();
//! let pair = prepare_pair(&p1, &p2, &model.rho_se0)?;
//! let report = inequality_report(&pair, &model.schedule, 0.0, &WitnessOptions::default())?;
//! assert!(report.n_fd > 0.0);           // contractivity is violated...
//! assert!(report.n_fd <= report.c);     // ...and the correlation witness bounds it
//! # Ok::<(), nmwitness::Error>(())
//! ```

// `!(x >= 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod matrix;
pub mod preparation;
pub mod random;
pub mod state;
pub mod suites;
pub mod witness;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, C64};
pub use state::{BipartiteState, CorrelationMatrix, DensityMatrix};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/preparation.md")]
    mod preparation {}
    #[doc = include_str!("../../../book/src/witnesses.md")]
    mod witnesses {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
