//! Pair structure of two-body modes and pseudoprojector norms.
//!
//! A real antisymmetric `φ̃` is brought to the form `V Ξ Vᵀ` with `Ξ` made of
//! `[[0, ξ_m], [−ξ_m, 0]]` blocks. In the rotated modes `c = Vᵀ a`,
//! `b = Σ_m ξ_m c_{2m+1} c_{2m}`: each block is a hardcore-boson (HCB) site
//! and `Φ = b†b` acts on HCB configurations without touching unpaired fermions.

mod bounds;
mod hadamard;
mod hcb;
mod youla;

pub use bounds::{exact_norm, exact_norm_paired, max_random_norm, norm_bound, random_unit_mode, saturating_state};
pub use hadamard::{hadamard_maximal_modes, round_robin_pairings, sylvester_hadamard};
pub use hcb::{phi_matrix_elements, HcbState};
pub use youla::{youla, youla_matrix, PairedForm};
