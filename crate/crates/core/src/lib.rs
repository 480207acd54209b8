//! Circular-statistics state estimation for planar localization.
//!
//! * [`circstats`]: the von Mises distribution, Bessel ratios `I_n/I_0`,
//!   moment-matched convolution and exact Bayes products.
//! * [`scalar_filters`]: the von Mises filter and the scalar Kalman filter.
//! * [`mixture_loc`]: von Mises heading with Gaussian x/y.
//! * [`circular_loc`]: heading and position all circular, position held as
//!   multi-scale phase codes.
//! * [`baselines`]: EKF and SE(2) Lie-group EKF.
//! * [`sim`]: unicycle simulator, Monte Carlo runner and the `locsim` CLI
//!   plumbing.
//! * [`oracle`]: reference computations (quadrature, grid Bayes, Monte
//!   Carlo) that check the fast paths.
//!
//! The `book/` directory at the repository root explains the mathematics;
//! its code listings are compiled and run as doctests of this crate.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod circstats;
pub mod circular_loc;
pub mod error;
pub mod mixture_loc;
pub mod model;
pub mod oracle;
pub mod scalar_filters;
pub mod sim;

pub use circstats::{wrap_angle, TrigMoment, VonMises};
pub use error::{Error, Result};
pub use model::{HeadingRule, Landmark, NoiseParams, OdometryInput};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/von_mises.md")]
    mod von_mises {}
    #[doc = include_str!("../../../book/src/filtering.md")]
    mod filtering {}
    #[doc = include_str!("../../../book/src/mixture.md")]
    mod mixture {}
    #[doc = include_str!("../../../book/src/circular.md")]
    mod circular {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
}
