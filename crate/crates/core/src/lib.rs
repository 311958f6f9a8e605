//! Computational laboratory for 2-torsion class-group counting experiments.
//!
//! The crate is organized around one pipeline:
//!
//! 1. [`field`] — exact arithmetic in a degree-n number field given by an
//!    integral basis, complex embeddings at configurable precision, and
//!    size-reduction of the integral basis under the embedding ℓ¹-norm,
//!    producing the exponent ledger δ_{i,K}.
//! 2. [`normform`] — the binary forms F_z(X₁,X₂) = N_K(X₁ + X₂α₂ + z),
//!    exactly over ℤ and modulo primes, with square tests and splitting
//!    into linear factors over extension fields.
//! 3. [`weights`] — compactly supported smooth bump weights with certified
//!    derivative/Fourier decay, and the weighted representation counts ω_z.
//! 4. [`sieve`] — the square sieve for prime and composite moduli as fully
//!    computable estimators with admissible prime sets.
//! 5. [`expsums`] — brute-force and DFT-accelerated complete character sums
//!    over F_p and square-free moduli, stratification of the correlation
//!    sums, and second-moment (fiber-count) verification.
//! 6. [`counter`] — box enumeration of the torsion-bounding point sets and
//!    classification of shift vectors.
//!
//! Everything exact is exact (`num-bigint`/`num-rational`); everything
//! floating carries either a certified error bound ([`bigfloat`]) or a
//! frozen calibration constant ([`calib`]).

pub mod bigfloat;
pub mod calib;
pub mod config;
pub mod counter;
pub mod error;
pub mod expsums;
pub mod fft;
pub mod field;
pub mod gf;
pub mod lll;
pub mod modarith;
pub mod normform;
pub mod pipeline;
pub mod poly;
pub mod report;
pub mod rng;
pub mod sieve;
pub mod weights;

pub use counter::{BoxSpec, CountReport, ZClass, ZClassification};
pub use error::CoreError;
pub use expsums::{SecondMomentReport, StratificationReport};
pub use field::{EmbeddingSet, FieldElement, NumberField, ReducedBasis};
pub use normform::{LinearFactorization, NormForm, ShiftVector};
pub use report::{AssertionRecord, FieldReport, ReportEnvelope};
pub use sieve::{PrimeRole, PrimeSet, SieveEstimate};
pub use weights::{SmoothWeight, WeightSequence};
