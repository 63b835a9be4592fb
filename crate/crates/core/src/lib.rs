//! Tau functions on an annular contour and the Toda flow they generate.
//!
//! A Jacobi operator `H_q` is encoded through its m-function as a vector
//! symbol `𝐦`. The flow multiplies `𝐦` by elements `g` of a group of scalar
//! functions, and the coefficients of the flowed operator are read back from
//! ratios of Fredholm determinants of Toeplitz sections.
//!
//! - [`contour`]: the annulus with quadrature on its boundary circles.
//! - [`hardy`]: grid functions, Laurent coefficients, Riesz projections.
//! - [`symbol`]: vector symbols, the symbol group, flow group elements.
//! - [`toeplitz`]: `T(𝐚)`, `S_𝐚`, `H_g` sections and `φ^(n)`.
//! - [`tau`]: determinants and closed forms.
//! - [`jacobi`]: Weyl functions, m-functions, Herglotz transforms.
//! - [`flow`]: coefficient recovery and `Toda(g)`.
//! - [`oracle`]: direct lattice integration and Lax diagnostics.
//! - [`cli`]: the command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod cli;
pub mod contour;
pub mod flow;
pub mod hardy;
pub mod jacobi;
pub mod oracle;
pub mod symbol;
pub mod tau;
pub mod toeplitz;

pub use num_complex::Complex64;
