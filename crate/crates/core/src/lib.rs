//! Cooperative, fully distributed sparse channel estimation for mmWave
//! massive MIMO downlinks.
//!
//! Every user of a cell observes the broadcast pilots through its own
//! channel, `y_k = X Ψ w_k + n_k`, where `w_k` is sparse in an angular
//! dictionary `Ψ`. Users share the positions of their non-zero
//! coefficients (support sets) with their neighbours, fuse them with a
//! weighted majority vote whose weights adapt to how much each neighbour
//! disagrees, and finally fit the coefficients locally by least squares.
//!
//! The crate is organised bottom-up:
//!
//! * [`signal_model`]: steering vectors, dictionaries, joint-sparsity
//!   profiles and channel realisations.
//! * [`measurement`]: pilot matrices and SNR-calibrated noisy observations.
//! * [`recovery`]: least squares on a support, OMP and SOMP.
//! * [`distributed`]: topology, voting, adaptive weights, the DiOMP and
//!   WDiOMP drivers and transmission-cost accounting.
//! * [`experiments`]: scenario configuration, the Monte Carlo harness,
//!   ASCE / NMSE metrics and CSV output.
//!
//! ```
//! use wdiomp::distributed::{transmission_cost, Scheme};
//!
//! let central = transmission_cost(Scheme::CentralizedSomp, 36, 10, 20, 200, 5, 6);
//! let coop = transmission_cost(Scheme::DiompFamily, 36, 10, 20, 200, 5, 6);
//! assert_eq!((central, coop), (14_440, 12_000));
//! ```

pub mod distributed;
mod error;
pub mod experiments;
pub mod measurement;
pub mod recovery;
pub mod signal_model;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense complex matrix, column-major.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<Complex64>;

// The guide under `book/` is compiled here so its snippets stay runnable.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/signal-model.md")]
    mod signal_model {}
    #[doc = include_str!("../../../book/src/measurements.md")]
    mod measurements {}
    #[doc = include_str!("../../../book/src/greedy-recovery.md")]
    mod greedy_recovery {}
    #[doc = include_str!("../../../book/src/weighted-voting.md")]
    mod weighted_voting {}
    #[doc = include_str!("../../../book/src/protocol.md")]
    mod protocol {}
    #[doc = include_str!("../../../book/src/transmission-cost.md")]
    mod transmission_cost {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
