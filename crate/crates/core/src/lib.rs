//! Exact symbolic kernel for linear-quadratic Poisson pencils on duals of Lie
//! algebras.
//!
//! The crate is layered bottom-up:
//!
//! * [`poly`]: sparse polynomials with exact rational coefficients,
//! * [`multivec`]: polyvector fields, the wedge product and the Schouten bracket,
//! * [`liepoisson`]: structure constants, charts, Lie–Poisson bivectors, Casimirs,
//! * [`clpencil`]: centrally linearizable pencils built from a quadratic field and
//!   a quadratic hamiltonian,
//! * [`appendix`]: the ten-parameter family on `gl(3)*` as shipped data,
//! * [`chains`]: Magri–Lenard chains, Casimir checks, involutivity and rank sampling,
//! * [`suite`]: the verification suites driven by the command line tool.

pub mod appendix;
pub mod chains;
pub mod clpencil;
pub mod liepoisson;
pub mod linalg;
pub mod multivec;
pub mod poly;
pub mod rational;
pub mod report;
pub mod suite;

pub use multivec::{Basis, Multivector};
pub use poly::{Monomial, Polynomial, VarTable};
pub use rational::Rational;
pub use report::VerificationReport;
