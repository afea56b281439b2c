//! Numerical laboratory for horizontality in Heisenberg groups.
//!
//! * [`heis`]: group law, dilations, gauges and the `H^1` Carnot–Carathéodory
//!   distance.
//! * [`jets`]: grid-sampled maps `Ω ⊂ R^m → R^{2n+1}`, finite-difference
//!   jets, slicing and an analytic gallery.
//! * [`contact`]: horizontality residual, wedge 2-form, rank certificates.
//! * [`blowup`]: rescaled maps, oriented circle integrals, circle estimates
//!   of the wedge.
//! * [`measure`]: anisotropic box counting and dimension fits.

pub mod blowup;
pub mod contact;
pub mod error;
pub mod fit;
pub mod heis;
pub mod io;
pub mod jets;
pub mod measure;

pub use error::{Error, Result};
