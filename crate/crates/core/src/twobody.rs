//! Two-particle matrix `F_(PR)(QS) = G̃_PQRS` over ordered pairs `P < R`,
//! its eigenmodes, and the pseudoprojectors `Φ_k = b_k† b_k` with
//! `b_k = Σ_{Q<S} φ_k,(QS) a_S a_Q`, so that `H^r = Σ_k λ_k Φ_k`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::{
    build_operator, build_transition, mode_map_matrix, symmetric_eigen, FockSector, HowMany, Ladder,
    Occupation, OperatorMatrix, Term,
};
use crate::hamiltonians::InteractionTensor;

/// Default relative tolerance for grouping degenerate eigenvalues.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

/// Number of ordered pairs `P < R` among `l` modes.
pub fn num_pairs(l: usize) -> usize {
    l * l.saturating_sub(1) / 2
}

/// Row of pair `(p, r)`, `p < r`, in lexicographic order.
pub fn pair_index(l: usize, p: usize, r: usize) -> usize {
    debug_assert!(p < r && r < l);
    p * (2 * l - p - 1) / 2 + (r - p - 1)
}

/// All pairs `(p, r)` with `p < r`, lexicographic.
pub fn pair_list(l: usize) -> Vec<(usize, usize)> {
    (0..l).flat_map(|p| (p + 1..l).map(move |r| (p, r))).collect()
}

/// Symmetric matrix over ordered mode pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoParticleMatrix {
    pub num_modes: usize,
    pub pairs: Vec<(usize, usize)>,
    pub matrix: DMatrix<f64>,
}

impl TwoParticleMatrix {
    pub fn dim(&self) -> usize {
        self.pairs.len()
    }
}

/// Flattens the antisymmetrised tensor into the two-particle matrix.
pub fn build_f(tensor: &InteractionTensor) -> Result<TwoParticleMatrix> {
    let l = tensor.num_modes;
    let pairs = pair_list(l);
    let n = pairs.len();
    let gt = &tensor.antisymmetrised;
    let matrix = DMatrix::from_fn(n, n, |a, b| {
        let (p, r) = pairs[a];
        let (q, s) = pairs[b];
        gt.get(p, q, r, s)
    });
    let scale = matrix.amax().max(1.0);
    let asym = (&matrix - matrix.transpose()).amax();
    if asym > 1e-10 * scale {
        return Err(Error::domain("build_F", format!("two-particle matrix is not symmetric (deviation {asym:.3e})")));
    }
    let matrix = (&matrix + matrix.transpose()) * 0.5;
    Ok(TwoParticleMatrix { num_modes: l, pairs, matrix })
}

/// One eigenpair of the two-particle matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBodyMode {
    pub lambda: f64,
    /// Unit vector over ordered pairs `P < R`.
    pub phi: DVector<f64>,
    /// Modes sharing an id have eigenvalues within the degeneracy tolerance.
    pub group: usize,
    pub num_modes: usize,
}

impl TwoBodyMode {
    pub fn new(lambda: f64, phi: DVector<f64>, num_modes: usize) -> Self {
        TwoBodyMode { lambda, phi, group: 0, num_modes }
    }

    /// Pair with the largest `|φ|` (lowest index on ties).
    pub fn dominant_pair(&self) -> (usize, usize) {
        pair_list(self.num_modes)[dominant_index(&self.phi)]
    }

    /// Antisymmetric `L × L` matrix `φ̃` with `φ̃_PR = φ_(PR) = −φ̃_RP`.
    pub fn antisymmetric_matrix(&self) -> DMatrix<f64> {
        let l = self.num_modes;
        let mut m = DMatrix::zeros(l, l);
        for (k, &(p, r)) in pair_list(l).iter().enumerate() {
            m[(p, r)] = self.phi[k];
            m[(r, p)] = -self.phi[k];
        }
        m
    }

    /// Pair annihilator `b = Σ φ_(QS) a_S a_Q` as strings.
    pub fn annihilator_terms(&self) -> Vec<Term> {
        pair_list(self.num_modes)
            .into_iter()
            .zip(self.phi.iter())
            .filter(|(_, v)| **v != 0.0)
            .map(|((q, s), &v)| Term::new(v, vec![(s, Ladder::Annihilate), (q, Ladder::Annihilate)]))
            .collect()
    }
}

fn dominant_index(v: &DVector<f64>) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() * (1.0 + 1e-12) {
            best = i;
        }
    }
    best
}

/// Eigenmodes of `F`, ascending in eigenvalue; degenerate groups are ordered
/// by dominant pair index. Each eigenvector's largest component is positive.
pub fn eigendecompose(f: &TwoParticleMatrix, degeneracy_tol: f64) -> Vec<TwoBodyMode> {
    let n = f.dim();
    let m = &f.matrix;
    let is_diagonal = (0..n).all(|c| (0..n).all(|r| r == c || m[(r, c)] == 0.0));
    let mut modes: Vec<TwoBodyMode> = if is_diagonal {
        (0..n)
            .map(|k| {
                let mut phi = DVector::zeros(n);
                phi[k] = 1.0;
                TwoBodyMode::new(m[(k, k)], phi, f.num_modes)
            })
            .collect()
    } else {
        let e = symmetric_eigen(m.clone(), HowMany::All);
        (0..n)
            .map(|k| {
                let mut phi = e.vectors.column(k).into_owned();
                if phi[dominant_index(&phi)] < 0.0 {
                    phi = -phi;
                }
                TwoBodyMode::new(e.values[k], phi, f.num_modes)
            })
            .collect()
    };
    modes.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let scale = modes.iter().fold(0.0f64, |s, md| s.max(md.lambda.abs()));
    let tol = degeneracy_tol * scale;
    let mut group = 0;
    for k in 0..modes.len() {
        if k > 0 && modes[k].lambda - modes[k - 1].lambda > tol {
            group += 1;
        }
        modes[k].group = group;
    }
    modes.sort_by(|a, b| a.group.cmp(&b.group).then(dominant_index(&a.phi).cmp(&dominant_index(&b.phi))));
    modes
}

/// Pair-annihilator matrix from `sector` (N particles) into the total-number
/// sector with `N − 2` particles.
pub fn pair_annihilator(mode: &TwoBodyMode, sector: &FockSector) -> Result<(FockSector, DMatrix<f64>)> {
    let n = sector.particles();
    if n < 2 {
        return Err(Error::domain("pseudoprojector", format!("needs N >= 2, got N={n}")));
    }
    let lower = sector.total_with(n - 2)?;
    let b = build_transition(sector, &lower, &mode.annihilator_terms())?;
    Ok((lower, b))
}

/// Matrix of `Φ = b† b` within `sector`.
pub fn pseudoprojector(mode: &TwoBodyMode, sector: &FockSector) -> Result<OperatorMatrix> {
    let n = sector.particles();
    if n < 2 {
        return Err(Error::domain("pseudoprojector", format!("needs N >= 2, got N={n}")));
    }
    let pairs = pair_list(mode.num_modes);
    let nz: Vec<((usize, usize), f64)> =
        pairs.into_iter().zip(mode.phi.iter().copied()).filter(|(_, v)| *v != 0.0).collect();
    let mut terms = Vec::with_capacity(nz.len() * nz.len());
    for &((p, r), a) in &nz {
        for &((q, s), b) in &nz {
            terms.push(Term::two_body(a * b, p, q, r, s));
        }
    }
    build_operator(sector, &terms).map_err(|e| match e {
        Error::Domain { msg, .. } if msg.contains("spin") => {
            Error::domain("pseudoprojector", "mode mixes spin sectors; use a total-number sector")
        }
        other => other,
    })
}

/// One weighted pseudoprojector `λ_k Φ_k` in a sector.
#[derive(Debug, Clone)]
pub struct ResidualTerm {
    /// Index into the mode list.
    pub mode: usize,
    pub lambda: f64,
    pub matrix: OperatorMatrix,
}

/// Relative cut below which eigenvalues count as zero.
const ZERO_CUT: f64 = 1e-12;

/// `λ_k Φ_k` for every mode with non-negligible eigenvalue; their sum is the
/// residual within `sector`.
pub fn residual_terms(modes: &[TwoBodyMode], sector: &FockSector) -> Result<Vec<ResidualTerm>> {
    use rayon::prelude::*;
    let scale = modes.iter().fold(0.0f64, |s, m| s.max(m.lambda.abs()));
    modes
        .par_iter()
        .enumerate()
        .filter(|(_, m)| m.lambda.abs() > ZERO_CUT * scale.max(1.0))
        .map(|(k, m)| {
            let phi = pseudoprojector(m, sector)?;
            let matrix = OperatorMatrix::linear_combination(&[(m.lambda, &phi)])?;
            Ok(ResidualTerm { mode: k, lambda: m.lambda, matrix })
        })
        .collect()
}

/// Orthogonal matrix of a one-body mode map acting on pair space.
pub fn pair_space_map(num_modes: usize, map: &[(usize, f64)]) -> Result<DMatrix<f64>> {
    let two = FockSector::new(num_modes, Occupation::Total(2))?;
    let u = mode_map_matrix(&two, map)?.to_dense();
    let pairs = pair_list(num_modes);
    // Basis word of pair (p, r) is the two-particle state a†_p a†_r |vac>.
    let pos: Vec<usize> = pairs.iter().map(|&(p, r)| two.index_of((1 << p) | (1 << r)).unwrap()).collect();
    Ok(DMatrix::from_fn(pairs.len(), pairs.len(), |a, b| u[(pos[a], pos[b])]))
}
