//! Exact symbolic computer algebra for stable envelopes, R-matrices, and
//! shifted Yangians of quivers with potentials.
//!
//! The crate is organized bottom-up:
//!
//! * [`symcore`]: variable registries, polynomials, rational functions,
//!   Laurent series at infinity, shuffle combinatorics, matrices with super
//!   structure;
//! * [`quiver`]: framed quivers with potential, torus weights, parity and
//!   sign conventions;
//! * [`envelopes`]: weight functions and stable envelope matrices for chamber
//!   data on quiver module spaces;
//! * [`rmat`]: R-matrices from envelopes, Gauss decompositions, Yang-Baxter
//!   and unitarity checks, classical limits, fusion;
//! * [`yangians`]: module catalogs, RTT and Drinfeld-type presentations,
//!   shift homomorphisms, wall series, coproducts;
//! * [`shuffle`]: the shuffle-algebra model and relation suites;
//! * [`casimir`]: Casimir decompositions of classical r-matrices and divisor
//!   multiplication operators.
//!
//! All arithmetic is exact over the rationals; all printed forms are
//! canonical, so identical inputs produce byte-identical output.

pub mod envelopes;
pub mod quiver;
pub mod rmat;
pub mod symcore;

pub use symcore::SymError;
