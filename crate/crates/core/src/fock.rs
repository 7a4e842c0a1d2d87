//! Occupation-number sectors and matrix realisations of second-quantized
//! operator strings.
//!
//! Mode `P` corresponds to bit `P` of a `u64` word (bit 0 is mode 0). A word
//! with occupied modes `P1 < P2 < ... < Pn` stands for
//! `a†_{P1} a†_{P2} ... a†_{Pn} |vac>`. Operator strings are listed left to
//! right as written and act on a ket right to left; the sign picked up by a
//! ladder operator on mode `P` is the parity of the occupied modes below `P`.
//!
//! When a sector carries spin labels, modes are interleaved: mode `2p` is
//! site `p` spin up and mode `2p + 1` is site `p` spin down.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Dimension at and above which operator matrices are stored as triplets.
pub const DENSE_LIMIT: usize = 512;

/// Tolerance for the hermitian flag on assembled matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;

const UP_MASK: u64 = 0x5555_5555_5555_5555;
const DOWN_MASK: u64 = 0xAAAA_AAAA_AAAA_AAAA;

/// Particle-number constraint defining a sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Occupation {
    /// Fixed total particle number.
    Total(usize),
    /// Fixed number of spin-up (even modes) and spin-down (odd modes) particles.
    Spin { up: usize, down: usize },
}

impl Occupation {
    pub fn particles(&self) -> usize {
        match *self {
            Occupation::Total(n) => n,
            Occupation::Spin { up, down } => up + down,
        }
    }
}

/// Ordered basis of a fixed-occupation subspace of the Fock space.
#[derive(Debug, Clone)]
pub struct FockSector {
    num_modes: usize,
    occupation: Occupation,
    basis: Vec<u64>,
    index: HashMap<u64, usize>,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All `n`-bit words with `k` bits set below bit `n`, ascending.
fn combinations(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(binomial(n, k));
    if k == 0 {
        out.push(0);
        return out;
    }
    let limit = 1u64 << n;
    let mut w: u64 = (1u64 << k) - 1;
    while w < limit {
        out.push(w);
        // Gosper's hack: next word with the same popcount.
        let c = w & w.wrapping_neg();
        let r = w + c;
        w = (((r ^ w) >> 2) / c) | r;
    }
    out
}

impl FockSector {
    /// Enumerates the sector of `num_modes` modes under `occupation`.
    pub fn new(num_modes: usize, occupation: Occupation) -> Result<Self> {
        const OP: &str = "enumerate_sector";
        if num_modes == 0 || num_modes > 62 {
            return Err(Error::domain(OP, format!("mode count {num_modes} outside 1..=62")));
        }
        let basis = match occupation {
            Occupation::Total(n) => {
                if n > num_modes {
                    return Err(Error::domain(OP, format!("N={n} exceeds L={num_modes}")));
                }
                combinations(num_modes, n)
            }
            Occupation::Spin { up, down } => {
                if !num_modes.is_multiple_of(2) {
                    return Err(Error::domain(OP, "spin sectors need an even mode count"));
                }
                let sites = num_modes / 2;
                if up > sites || down > sites {
                    return Err(Error::domain(
                        OP,
                        format!("N_up={up}, N_down={down} exceed {sites} sites"),
                    ));
                }
                combinations(num_modes, up + down)
                    .into_iter()
                    .filter(|w| {
                        (w & UP_MASK).count_ones() as usize == up
                            && (w & DOWN_MASK).count_ones() as usize == down
                    })
                    .collect()
            }
        };
        let index = basis.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        Ok(FockSector { num_modes, occupation, basis, index })
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn occupation(&self) -> Occupation {
        self.occupation
    }

    pub fn particles(&self) -> usize {
        self.occupation.particles()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    pub fn index_of(&self, word: u64) -> Option<usize> {
        self.index.get(&word).copied()
    }

    /// Total-number sector with `n` particles over the same modes.
    pub fn total_with(&self, n: usize) -> Result<FockSector> {
        FockSector::new(self.num_modes, Occupation::Total(n))
    }
}

/// Creation or annihilation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// Applies an operator string (listed as written, acting right to left) to a
/// basis word. Returns `None` when the result vanishes.
pub fn apply_excitation(word: u64, ops: &[(usize, Ladder)]) -> Option<(u64, f64)> {
    let mut w = word;
    let mut sign = 1.0;
    for &(mode, kind) in ops.iter().rev() {
        let bit = 1u64 << mode;
        let occupied = w & bit != 0;
        match kind {
            Ladder::Create if occupied => return None,
            Ladder::Annihilate if !occupied => return None,
            _ => {}
        }
        if (w & (bit - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        w ^= bit;
    }
    Some((w, sign))
}

/// A coefficient times an operator string.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub ops: Vec<(usize, Ladder)>,
}

impl Term {
    pub fn new(coeff: f64, ops: Vec<(usize, Ladder)>) -> Self {
        Term { coeff, ops }
    }

    /// `coeff · a†_p a_q`.
    pub fn one_body(coeff: f64, p: usize, q: usize) -> Self {
        Term::new(coeff, vec![(p, Ladder::Create), (q, Ladder::Annihilate)])
    }

    /// `coeff · a†_p a†_r a_s a_q`.
    pub fn two_body(coeff: f64, p: usize, q: usize, r: usize, s: usize) -> Self {
        Term::new(
            coeff,
            vec![
                (p, Ladder::Create),
                (r, Ladder::Create),
                (s, Ladder::Annihilate),
                (q, Ladder::Annihilate),
            ],
        )
    }

    /// `coeff · identity`.
    pub fn scalar(coeff: f64) -> Self {
        Term::new(coeff, Vec::new())
    }

    /// Net change in (spin-up, spin-down) particle numbers.
    fn charge(&self) -> (i64, i64) {
        let mut up = 0i64;
        let mut down = 0i64;
        for &(m, k) in &self.ops {
            let d = if k == Ladder::Create { 1 } else { -1 };
            if m % 2 == 0 {
                up += d;
            } else {
                down += d;
            }
        }
        (up, down)
    }
}

/// Matrix storage.
#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    Dense(DMatrix<f64>),
    /// Coalesced `(row, col, value)` triplets sorted by row then column.
    Sparse(Vec<(usize, usize, f64)>),
}

/// A real operator restricted to one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    storage: Storage,
    hermitian: bool,
}

fn coalesce(mut t: Vec<(usize, usize, f64)>) -> Vec<(usize, usize, f64)> {
    t.sort_by_key(|a| (a.0, a.1));
    let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(t.len());
    for (r, c, v) in t {
        match out.last_mut() {
            Some(last) if last.0 == r && last.1 == c => last.2 += v,
            _ => out.push((r, c, v)),
        }
    }
    out.retain(|e| e.2 != 0.0);
    out
}

impl OperatorMatrix {
    /// Wraps entries, picking storage by dimension and detecting symmetry.
    pub fn from_triplets(dim: usize, triplets: Vec<(usize, usize, f64)>) -> Self {
        let t = coalesce(triplets);
        if dim < DENSE_LIMIT {
            let mut m = DMatrix::zeros(dim, dim);
            for (r, c, v) in t {
                m[(r, c)] += v;
            }
            Self::from_dense(m)
        } else {
            let mut op = OperatorMatrix { dim, storage: Storage::Sparse(t), hermitian: false };
            op.hermitian = op.asymmetry() <= HERMITIAN_TOL;
            op
        }
    }

    /// Wraps a dense square matrix; the hermitian flag is set from its entries.
    pub fn from_dense(m: DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operator matrices are square");
        let dim = m.nrows();
        let mut op = OperatorMatrix { dim, storage: Storage::Dense(m), hermitian: false };
        op.hermitian = op.asymmetry() <= HERMITIAN_TOL;
        op
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_triplets(dim, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => {
                let mut worst = 0.0f64;
                for i in 0..self.dim {
                    for j in 0..i {
                        worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
                    }
                }
                worst
            }
            Storage::Sparse(t) => {
                let map: HashMap<(usize, usize), f64> =
                    t.iter().map(|&(r, c, v)| ((r, c), v)).collect();
                map.iter()
                    .map(|(&(r, c), &v)| (v - map.get(&(c, r)).copied().unwrap_or(0.0)).abs())
                    .fold(0.0, f64::max)
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(t) => {
                let mut m = DMatrix::zeros(self.dim, self.dim);
                for &(r, c, v) in t {
                    m[(r, c)] += v;
                }
                m
            }
        }
    }

    /// Non-zero entries as triplets.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        match &self.storage {
            Storage::Sparse(t) => t.clone(),
            Storage::Dense(m) => {
                let mut out = Vec::new();
                for c in 0..self.dim {
                    for r in 0..self.dim {
                        let v = m[(r, c)];
                        if v != 0.0 {
                            out.push((r, c, v));
                        }
                    }
                }
                out
            }
        }
    }

    /// Diagonal entries when the matrix has no off-diagonal entries.
    pub fn diagonal(&self) -> Option<DVector<f64>> {
        let mut d = DVector::zeros(self.dim);
        match &self.storage {
            Storage::Dense(m) => {
                for c in 0..self.dim {
                    for r in 0..self.dim {
                        if r != c && m[(r, c)] != 0.0 {
                            return None;
                        }
                    }
                    d[c] = m[(c, c)];
                }
            }
            Storage::Sparse(t) => {
                for &(r, c, v) in t {
                    if r != c {
                        return None;
                    }
                    d[r] += v;
                }
            }
        }
        Some(d)
    }

    /// `Σ c_i A_i`, all of the same dimension.
    pub fn linear_combination(parts: &[(f64, &OperatorMatrix)]) -> Result<OperatorMatrix> {
        let dim = parts.first().map(|p| p.1.dim).unwrap_or(0);
        if parts.iter().any(|p| p.1.dim != dim) {
            return Err(Error::domain("linear_combination", "dimension mismatch"));
        }
        if dim < DENSE_LIMIT {
            let mut m = DMatrix::zeros(dim, dim);
            for &(c, op) in parts {
                if c == 0.0 {
                    continue;
                }
                match &op.storage {
                    Storage::Dense(d) => m += d * c,
                    Storage::Sparse(t) => {
                        for &(r, col, v) in t {
                            m[(r, col)] += c * v;
                        }
                    }
                }
            }
            Ok(OperatorMatrix::from_dense(m))
        } else {
            let mut t = Vec::new();
            for &(c, op) in parts {
                if c != 0.0 {
                    t.extend(op.triplets().into_iter().map(|(r, col, v)| (r, col, c * v)));
                }
            }
            Ok(OperatorMatrix::from_triplets(dim, t))
        }
    }

    /// Frobenius norm of `self - other`.
    pub fn frobenius_distance(&self, other: &OperatorMatrix) -> f64 {
        (self.to_dense() - other.to_dense()).norm()
    }

    pub fn frobenius_norm(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m.norm(),
            Storage::Sparse(t) => t.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt(),
        }
    }

    /// Largest absolute eigenvalue of a symmetric matrix.
    pub fn spectral_norm(&self) -> f64 {
        if let Some(d) = self.diagonal() {
            return d.amax();
        }
        let e = SymmetricEigen::new(self.to_dense()).eigenvalues;
        e.amax()
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        match &self.storage {
            Storage::Dense(m) => m * v,
            Storage::Sparse(t) => {
                let mut out = DVector::zeros(self.dim);
                for &(r, c, x) in t {
                    out[r] += x * v[c];
                }
                out
            }
        }
    }
}

/// Frobenius norm of `[A, B]`.
pub fn commutator_norm(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
    let (a, b) = (a.to_dense(), b.to_dense());
    (&a * &b - &b * &a).norm()
}

fn check_conserving(op: &'static str, terms: &[Term], spin: bool) -> Result<()> {
    for (i, t) in terms.iter().enumerate() {
        let (up, down) = t.charge();
        if up + down != 0 {
            return Err(Error::domain(op, format!("term {i} does not conserve particle number")));
        }
        if spin && up != 0 {
            return Err(Error::domain(op, format!("term {i} does not conserve spin")));
        }
    }
    Ok(())
}

/// Matrix of `Σ coeff · string` within `sector`.
pub fn build_operator(sector: &FockSector, terms: &[Term]) -> Result<OperatorMatrix> {
    let spin = matches!(sector.occupation, Occupation::Spin { .. });
    check_conserving("build_operator", terms, spin)?;
    let mut triplets = Vec::new();
    for (col, &w) in sector.basis.iter().enumerate() {
        for t in terms {
            if t.coeff == 0.0 {
                continue;
            }
            if let Some((w2, sign)) = apply_excitation(w, &t.ops) {
                let row = sector.index[&w2];
                triplets.push((row, col, t.coeff * sign));
            }
        }
    }
    Ok(OperatorMatrix::from_triplets(sector.dim(), triplets))
}

/// Rectangular matrix (`to.dim() × from.dim()`) of a string sum mapping
/// `from` into `to`. Results landing outside `to` are an error.
pub fn build_transition(from: &FockSector, to: &FockSector, terms: &[Term]) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(to.dim(), from.dim());
    for (col, &w) in from.basis.iter().enumerate() {
        for t in terms {
            if t.coeff == 0.0 {
                continue;
            }
            if let Some((w2, sign)) = apply_excitation(w, &t.ops) {
                let row = to.index_of(w2).ok_or_else(|| {
                    Error::domain("build_transition", "string leaves the target sector")
                })?;
                m[(row, col)] += t.coeff * sign;
            }
        }
    }
    Ok(m)
}

/// Many-body matrix of the one-body map `a†_P -> sign_P a†_{target_P}`.
pub fn mode_map_matrix(sector: &FockSector, map: &[(usize, f64)]) -> Result<OperatorMatrix> {
    const OP: &str = "mode_map_matrix";
    if map.len() != sector.num_modes {
        return Err(Error::domain(OP, "map length differs from mode count"));
    }
    let mut seen = vec![false; map.len()];
    for &(t, _) in map {
        if t >= map.len() || seen[t] {
            return Err(Error::domain(OP, "map is not a permutation"));
        }
        seen[t] = true;
    }
    let mut triplets = Vec::with_capacity(sector.dim());
    for (col, &w) in sector.basis.iter().enumerate() {
        let mut ops = Vec::new();
        let mut amp = 1.0;
        for (p, &(target, factor)) in map.iter().enumerate() {
            if w >> p & 1 == 1 {
                ops.push((target, Ladder::Create));
                amp *= factor;
            }
        }
        let (w2, sign) = apply_excitation(0, &ops).expect("permutation keeps modes distinct");
        let row = sector
            .index_of(w2)
            .ok_or_else(|| Error::domain(OP, "map leaves the sector"))?;
        triplets.push((row, col, amp * sign));
    }
    Ok(OperatorMatrix::from_triplets(sector.dim(), triplets))
}

/// How many eigenpairs to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HowMany {
    All,
    Lowest(usize),
}

/// Eigenvalues (ascending) with eigenvectors as matching columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Sorted eigenpairs of a dense symmetric matrix.
pub fn symmetric_eigen(m: DMatrix<f64>, how_many: HowMany) -> Eigen {
    let n = m.nrows();
    let e = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let k = match how_many {
        HowMany::All => n,
        HowMany::Lowest(k) => k.min(n),
    };
    let values = order[..k].iter().map(|&i| e.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, k, |r, c| e.eigenvectors[(r, order[c])]);
    Eigen { values, vectors }
}

/// Eigenpairs of a hermitian operator matrix, ascending.
pub fn eigensolve(matrix: &OperatorMatrix, how_many: HowMany) -> Result<Eigen> {
    if !matrix.is_hermitian() {
        return Err(Error::domain("eigensolve", "matrix is not hermitian"));
    }
    if let Some(d) = matrix.diagonal() {
        let n = d.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
        let k = match how_many {
            HowMany::All => n,
            HowMany::Lowest(k) => k.min(n),
        };
        let values = order[..k].iter().map(|&i| d[i]).collect();
        let vectors = DMatrix::from_fn(n, k, |r, c| if r == order[c] { 1.0 } else { 0.0 });
        return Ok(Eigen { values, vectors });
    }
    Ok(symmetric_eigen(matrix.to_dense(), how_many))
}
