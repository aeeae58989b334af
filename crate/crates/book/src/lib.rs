//! Runs the code listings of the guide in `book/src` as doc-tests.

#[doc = include_str!("../../../book/src/index.md")]
pub mod index {}
#[doc = include_str!("../../../book/src/fields.md")]
pub mod fields {}
#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graphs {}
#[doc = include_str!("../../../book/src/spectra.md")]
pub mod spectra {}
#[doc = include_str!("../../../book/src/discrepancy.md")]
pub mod discrepancy {}
#[doc = include_str!("../../../book/src/cliques.md")]
pub mod cliques {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
