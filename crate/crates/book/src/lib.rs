//! Compiles and runs the code snippets of the guide in `book/` as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/spectra.md")]
pub mod spectra {}

#[doc = include_str!("../../../book/src/coefficients.md")]
pub mod coefficients {}

#[doc = include_str!("../../../book/src/superoperators.md")]
pub mod superoperators {}

#[doc = include_str!("../../../book/src/propagation.md")]
pub mod propagation {}

#[doc = include_str!("../../../book/src/discord.md")]
pub mod discord {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
