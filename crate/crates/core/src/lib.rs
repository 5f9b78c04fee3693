//! Exact top intersection numbers on the moduli space of stable rank-2,
//! odd-degree bundles on a curve.
//!
//! Three independent routes are provided and cross-checked:
//!
//! * **Route A** ([`localization::quot_localized`]): torus localization on a
//!   Quot scheme. Every fixed locus `Sym^{d1} C x Sym^{d2} C` contributes an
//!   element of the cyclotomic field `Q(zeta_N)`; the total is rational.
//! * **Route B** ([`localization::summand_b`]): the same sum after the
//!   residues have been evaluated in closed form.
//! * **Route C** ([`closedform`]): the Bernoulli closed form and the
//!   `N -> infinity` collapse of Route B.
//!
//! All arithmetic is exact. There is no floating point anywhere.

pub mod closedform;
pub mod cyclotomic;
mod error;
pub mod exact;
pub mod lemma_lab;
pub mod localization;
pub mod report;
pub mod ring;
pub mod series;
pub mod symprod;

pub use error::{Error, Result};
pub use exact::Rational;
