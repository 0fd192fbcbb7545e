//! Numerical machinery for iterated-logarithm normalization of heavy-tailed
//! i.i.d. partial sums.
//!
//! The crate turns the objects behind two-sided LIL analysis into computable
//! pieces:
//!
//! * [`logscale`] — iterated logarithms `L`, `LL`, `LLL` and the
//!   super-slow-variation probe family `f_τ`;
//! * [`distmodel`] — mean-zero symmetric laws with tails, truncated moments
//!   `H`, `M` and reproducible sampling;
//! * [`klass`] — the functionals `G`, `K` and the universal sequence `γ_n`;
//! * [`normalizer`] — slowly varying `h`, `Ψ(x) = √(x h(x))`, its numeric
//!   inverse, `H_q` membership diagnostics and the envelope construction;
//! * [`conditions`] — the limsup/moment condition tests and their closed-form
//!   family specializations, with honest trend-labelled verdicts;
//! * [`alpha0`] — cluster-radius estimation for normalized sums, truncation
//!   policies and the γ-ratio bounds;
//! * [`mcsim`] — streaming Monte Carlo of `S_n/a_n` with deterministic
//!   parallel substreams;
//! * [`seq`] — the normalizing-sequence abstraction shared by the cluster
//!   radius machinery and the simulator;
//! * [`series`], [`quad`], [`grid`], [`rng`] — shared numerics.

pub mod alpha0;
pub mod conditions;
pub mod distmodel;
pub mod error;
pub mod grid;
pub mod klass;
pub mod logscale;
pub mod mcsim;
pub mod normalizer;
pub mod quad;
pub mod rng;
pub mod seq;
pub mod series;

pub use error::{Error, Result};
