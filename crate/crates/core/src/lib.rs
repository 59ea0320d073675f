//! Fourier coefficients of Poincaré series.
//!
//! Classical series on `SL(2,Z)` and `Gamma_0(q)` are evaluated by direct
//! coset summation and by the Kloosterman/Bessel expansion; genus-2 Siegel
//! series are evaluated on the cube `U_2(y0)` and integrated against
//! characters. Supporting modules cover exact binary quadratic forms, the
//! genus-2 Siegel fundamental domain, and level-one Hecke eigenforms.

pub mod classical;
pub mod cli;
pub mod error;
pub mod fund_domain;
pub mod hecke;
pub mod modgroup;
pub mod numerics;
pub mod quadform;
pub mod report;
pub mod siegel;
pub mod verify;

pub use error::{Error, Result};
