//! Site reflections and their action on sectors.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::{mode_map_matrix, FockSector, OperatorMatrix};

/// A site permutation of a spinful lattice, lifted to spin orbitals.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionSymmetry {
    pub site_permutation: Vec<usize>,
    /// Image mode and sign for every spin orbital.
    pub mode_map: Vec<(usize, f64)>,
    /// One-body orthogonal matrix with `u[(image, mode)] = sign`.
    pub one_body: DMatrix<f64>,
}

impl ReflectionSymmetry {
    /// Lifts a site permutation to interleaved spin orbitals with unit signs.
    pub fn from_sites(site_permutation: Vec<usize>) -> Result<Self> {
        let n = site_permutation.len();
        let mut seen = vec![false; n];
        for &t in &site_permutation {
            if t >= n || seen[t] {
                return Err(Error::domain("reflection", "not a permutation of sites"));
            }
            seen[t] = true;
        }
        let mode_map: Vec<(usize, f64)> =
            (0..2 * n).map(|m| (2 * site_permutation[m / 2] + m % 2, 1.0)).collect();
        let mut one_body = DMatrix::zeros(2 * n, 2 * n);
        for (m, &(t, s)) in mode_map.iter().enumerate() {
            one_body[(t, m)] = s;
        }
        Ok(ReflectionSymmetry { site_permutation, mode_map, one_body })
    }

    /// Sites 1 ↔ 3 of the trimer.
    pub fn trimer() -> Self {
        Self::from_sites(vec![2, 1, 0]).expect("valid permutation")
    }

    /// Sites 1 ↔ 4, 2 ↔ 3 of the four-site ring.
    pub fn four_site() -> Self {
        Self::from_sites(vec![3, 2, 1, 0]).expect("valid permutation")
    }

    /// Many-body matrix within `sector`, including fermionic reordering signs.
    pub fn sector_matrix(&self, sector: &FockSector) -> Result<OperatorMatrix> {
        mode_map_matrix(sector, &self.mode_map)
    }
}

/// Reflection parity of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymmetryLabel {
    Symmetric,
    Antisymmetric,
    /// Neither; carries `1 − |<U>|`.
    Mixed(f64),
}

impl SymmetryLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SymmetryLabel::Symmetric => "S",
            SymmetryLabel::Antisymmetric => "A",
            SymmetryLabel::Mixed(_) => "M",
        }
    }

    pub fn from_expectation(x: f64) -> Self {
        if x >= 1.0 - 1e-8 {
            SymmetryLabel::Symmetric
        } else if x <= -1.0 + 1e-8 {
            SymmetryLabel::Antisymmetric
        } else {
            SymmetryLabel::Mixed(1.0 - x.abs())
        }
    }
}

/// `<state|U|state>` within `sector`.
pub fn reflection_expectation(state: &DVector<f64>, sym: &ReflectionSymmetry, sector: &FockSector) -> Result<f64> {
    if state.len() != sector.dim() {
        return Err(Error::domain("symmetry_label", "state dimension differs from sector"));
    }
    let u = sym.sector_matrix(sector)?;
    Ok(state.dot(&u.apply(state)))
}

/// Classifies a normalised state by its reflection expectation value.
pub fn symmetry_label(state: &DVector<f64>, sym: &ReflectionSymmetry, sector: &FockSector) -> Result<SymmetryLabel> {
    Ok(SymmetryLabel::from_expectation(reflection_expectation(state, sym, sector)?))
}
