//! Adiabatic ground-state preparation of fermionic hamiltonians along paths
//! built from the eigendecomposition of the residual two-particle matrix.
//!
//! The crate is organised bottom-up:
//! - [`fock`]: occupation-number sectors and operator matrices,
//! - [`hamiltonians`]: coefficient tensors, model builders and mean-field references,
//! - [`twobody`]: the two-particle matrix and its pseudoprojector decomposition,
//! - [`pairing`]: pair (Youla) form, norm bounds and extremal constructions,
//! - [`adiabatic`]: schedules, gap traces, propagation and time estimates,
//! - [`experiments`]: ready-made trimer and four-site setups.

pub mod adiabatic;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod hamiltonians;
pub mod minimize;
pub mod pairing;
pub mod twobody;

pub use error::{Error, Result};
pub use fock::{FockSector, Ladder, Occupation, OperatorMatrix, Term};
pub use hamiltonians::{HamiltonianSpec, InteractionTensor, ReflectionSymmetry, Tensor4};
pub use adiabatic::{AdiabaticPath, PathSchedule, SpectrumTrace};
pub use pairing::{HcbState, PairedForm};
pub use twobody::{TwoBodyMode, TwoParticleMatrix};

