//! Exact-arithmetic toolkit for generalized p-ary bent functions.
//!
//! Functions f: V_n -> Z_{p^k} (p an odd prime) are stored as value tables
//! over a product domain of dot-product coordinate blocks and trace-form
//! field blocks. All character sums are computed exactly in the ring
//! Z[zeta_{p^k}], so bentness verdicts, duals, and regularity classes are
//! certificates, not floating-point estimates.
//!
//! The main entry points:
//!
//! * [`DomainSpec`] / [`GFunction`] — domains and value tables, with a
//!   portable text file format.
//! * [`walsh::walsh_full_fast`] — exact radix-p Walsh transform, with the
//!   naive character sum alongside as the reference oracle.
//! * [`analysis::analyze`] — per-point bent certification, duals,
//!   regularity, self-duality, and structural checks.
//! * [`constructions`] — builders for the quadratic, Maiorana–McFarland,
//!   two-parameter, indirect-sum, and self-dual families, each with its
//!   closed-form dual where one exists.
//! * [`decomposition`] — digit decomposition of generalized functions and
//!   the component-family checks tying k >= 2 functions to their p-ary
//!   components.
//! * [`presets`] — the named example instances exercised by the
//!   verification suite and the CLI.

pub mod analysis;
pub mod constructions;
pub mod cyclotomic;
pub mod decomposition;
pub mod domain;
pub mod error;
pub mod field;
pub mod gfunction;
pub mod presets;
pub mod walsh;

pub use analysis::{analyze, BentCertificate, MuUnit, Regularity, SelfDuality, XiCase};
pub use cyclotomic::CycInt;
pub use domain::{Block, Component, DomainSpec, Point};
pub use error::{Error, Result};
pub use field::{ExtField, FieldElem};
pub use gfunction::{Decomposition, GFunction};
pub use walsh::WalshSpectrum;
