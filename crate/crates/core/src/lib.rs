//! Graphs `X_{f,q}` induced by bivariate polynomials over finite fields.
//!
//! Two distinct vertices `a, b` of `F_q` are adjacent when `f(a, b)` is a
//! square (zero included). The crate builds these graphs, decides whether a
//! polynomial is admissible, and measures the quantities that govern their
//! quasi-randomness: spectra, discrepancy, codegrees, character sums and
//! clique numbers.

pub mod bits;
pub mod charsum;
pub mod extremal;
pub mod ff;
pub mod graph;
pub mod poly;
pub mod quasirand;
pub mod spectral;
