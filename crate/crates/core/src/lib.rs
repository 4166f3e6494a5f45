//! Analysis of singular canards for planar slow-fast systems `X = X0 + eps*X1`
//! whose critical set is a union of algebraic curves with transverse
//! self-intersections.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`] — exact rational arithmetic, sparse multivariate polynomials,
//!   the expression parser, gcd/factorisation and real-root isolation;
//! * [`stratify`] — critical-set construction, singular points, Whitney and
//!   relaxed stratifications, odd-power desingularisation;
//! * [`canard`] — fast-foliation frame, projection onto branch tangents,
//!   the exact wedge (tangency) condition and per-branch canard verdicts;
//! * [`blowup`] — weighted spherical blow-up: exact directional charts,
//!   the desingularised field on the sphere, equator equilibria, canard
//!   connections and the odd-power circle dynamics;
//! * [`dynamics`] — adaptive integration of the full system, reduced flow on
//!   strata, Euler-map iteration and the discrete multiplier condition.
//!
//! All symbolic computation is exact over the rationals; floating point is
//! confined to root refinement, eigenvalues and trajectory integration.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the command
//! line live in the companion `canard-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod blowup;
pub mod canard;
pub mod dynamics;
pub mod numeric;
pub mod poly;
pub mod stratify;

pub use poly::{MultiPoly, PolyError, PolyVectorField, Rational, Vars};
