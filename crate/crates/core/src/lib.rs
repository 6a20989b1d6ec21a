//! Combinatorics of translation-finite (TF) subsets of `Z+` and numerics for
//! the derivations `D_psi : l1(Z+) -> l1(Z+)*`.
//!
//! The crate is organised around five modules:
//!
//! * [`zset`]: symbolic subsets of `Z+` ([`SetDescriptor`]) with exact
//!   membership, window materialization, shifting and boolean combinators.
//! * [`tfcheck`]: witness search and verification for non-TF sets, T-set
//!   profiles, exact verdicts for eventually periodic sets and the Ramsey
//!   union splitter.
//! * [`density`]: windowed Banach density and the constructive pipeline that
//!   turns positive density into a verified non-TF witness.
//! * [`build`]: the explicit set constructions (clumpy sets, slowly growing
//!   T-sets, the catalog, and the appendix T-set builder).
//! * [`oplab`]: columns and norms of `D_psi`, weak compactness diagnostics,
//!   and `p`-summing lower-bound certificates.
//!
//! All values are immutable after construction and every operation is a pure
//! function of its inputs, so everything here is `Send + Sync`.

pub mod build;
pub mod density;
pub mod oplab;
pub mod rational;
pub mod tfcheck;
pub mod zset;

pub use build::{AppendixState, GrowthFunction};
pub use density::{BlockSchedule, ChainWitness, DensityReport, LayeredGraph, PatternFamily};
pub use oplab::{C00Vector, Certificate, CoefficientField, KernelDescriptor};
pub use rational::Rational;
pub use tfcheck::{TsetProfile, Witness};
pub use zset::{CombineMode, SetDescriptor, WindowSet};
