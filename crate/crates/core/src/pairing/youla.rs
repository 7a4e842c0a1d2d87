use nalgebra::{DMatrix, DVector, Schur};

use crate::error::{Error, Result};
use crate::twobody::{pair_index, num_pairs, TwoBodyMode};

/// `φ̃ = V Ξ Vᵀ` with orthogonal `V` and non-negative pairing amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedForm {
    pub v: DMatrix<f64>,
    /// `ξ_m` for HCB sites `m = 0..⌊L/2⌋`, non-increasing.
    pub xi: Vec<f64>,
}

impl PairedForm {
    pub fn num_modes(&self) -> usize {
        self.v.nrows()
    }

    /// Number of HCB sites `⌊L/2⌋`.
    pub fn num_sites(&self) -> usize {
        self.xi.len()
    }

    /// Canonical form with the identity rotation.
    pub fn canonical(num_modes: usize, xi: Vec<f64>) -> Self {
        assert_eq!(xi.len(), num_modes / 2);
        PairedForm { v: DMatrix::identity(num_modes, num_modes), xi }
    }

    /// `L × L` block matrix `Ξ`; for odd `L` the last row and column are zero.
    pub fn block_matrix(&self) -> DMatrix<f64> {
        let l = self.num_modes();
        let mut x = DMatrix::zeros(l, l);
        for (m, &xi) in self.xi.iter().enumerate() {
            x[(2 * m, 2 * m + 1)] = xi;
            x[(2 * m + 1, 2 * m)] = -xi;
        }
        x
    }

    /// `V Ξ Vᵀ`.
    pub fn antisymmetric_matrix(&self) -> DMatrix<f64> {
        &self.v * self.block_matrix() * self.v.transpose()
    }

    /// The two-body mode `φ_(PR) = (V Ξ Vᵀ)_PR`.
    pub fn to_mode(&self, lambda: f64) -> TwoBodyMode {
        let l = self.num_modes();
        let a = self.antisymmetric_matrix();
        let mut phi = DVector::zeros(num_pairs(l));
        for p in 0..l {
            for r in p + 1..l {
                phi[pair_index(l, p, r)] = a[(p, r)];
            }
        }
        TwoBodyMode::new(lambda, phi, l)
    }
}

/// Pair form of a real antisymmetric matrix via its real Schur form.
pub fn youla_matrix(a: &DMatrix<f64>) -> Result<PairedForm> {
    const OP: &str = "youla";
    let l = a.nrows();
    if a.ncols() != l {
        return Err(Error::domain(OP, "matrix is not square"));
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    if (a + a.transpose()).amax() > 1e-12 * scale {
        return Err(Error::domain(OP, "matrix is not antisymmetric"));
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::domain(OP, "real Schur iteration did not converge"))?;
    let (q, t) = schur.unpack();
    // Blocks of the quasi-triangular (here block-diagonal) factor.
    let tol = 1e-13 * scale;
    let mut blocks: Vec<(usize, usize, f64)> = Vec::new();
    let mut zeros: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < l {
        if i + 1 < l && t[(i + 1, i)].abs() > tol {
            let xi = 0.5 * (t[(i, i + 1)] - t[(i + 1, i)]);
            if xi >= 0.0 {
                blocks.push((i, i + 1, xi));
            } else {
                blocks.push((i + 1, i, -xi));
            }
            i += 2;
        } else {
            zeros.push(i);
            i += 1;
        }
    }
    for z in zeros.chunks(2) {
        if z.len() == 2 {
            blocks.push((z[0], z[1], 0.0));
        }
    }
    blocks.sort_by(|x, y| y.2.total_cmp(&x.2));
    let mut cols: Vec<usize> = blocks.iter().flat_map(|b| [b.0, b.1]).collect();
    if l % 2 == 1 {
        cols.push(*zeros.last().expect("odd dimension leaves a zero column"));
    }
    let v = DMatrix::from_fn(l, l, |r, c| q[(r, cols[c])]);
    let xi = blocks.iter().map(|b| b.2).collect();
    Ok(PairedForm { v, xi })
}

/// Pair form of a two-body mode.
pub fn youla(mode: &TwoBodyMode) -> Result<PairedForm> {
    youla_matrix(&mode.antisymmetric_matrix())
}
