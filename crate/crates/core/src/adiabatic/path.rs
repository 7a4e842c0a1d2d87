use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{eigensolve, HowMany, OperatorMatrix};
use crate::hamiltonians::SymmetryLabel;
use crate::minimize::brent;

use super::PathSchedule;

/// `H(s) = H_i + Σ_k γ_k(s) H^r_k` within one sector.
#[derive(Debug, Clone)]
pub struct AdiabaticPath {
    pub initial: OperatorMatrix,
    pub terms: Vec<OperatorMatrix>,
    pub schedule: PathSchedule,
    /// Sector matrix of a reflection, used only for labelling levels.
    pub reflection: Option<OperatorMatrix>,
}

impl AdiabaticPath {
    pub fn new(initial: OperatorMatrix, terms: Vec<OperatorMatrix>, schedule: PathSchedule) -> Result<Self> {
        const OP: &str = "path_hamiltonian";
        if schedule.num_terms() != terms.len() {
            return Err(Error::domain(OP, format!("schedule has {} coefficients for {} terms", schedule.num_terms(), terms.len())));
        }
        if let Some(t) = terms.iter().find(|t| t.dim() != initial.dim()) {
            return Err(Error::domain(OP, format!("term dimension {} differs from {}", t.dim(), initial.dim())));
        }
        Ok(AdiabaticPath { initial, terms, schedule, reflection: None })
    }

    pub fn with_reflection(mut self, reflection: OperatorMatrix) -> Result<Self> {
        if reflection.dim() != self.dim() {
            return Err(Error::domain("path_hamiltonian", "reflection dimension differs from the path"));
        }
        self.reflection = Some(reflection);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    fn combine(&self, base: f64, coeffs: &[f64]) -> Result<OperatorMatrix> {
        let mut parts: Vec<(f64, &OperatorMatrix)> = Vec::with_capacity(coeffs.len() + 1);
        if base != 0.0 {
            parts.push((base, &self.initial));
        }
        parts.extend(coeffs.iter().copied().zip(&self.terms).filter(|(c, _)| *c != 0.0));
        if parts.is_empty() {
            return Ok(OperatorMatrix::zeros(self.dim()));
        }
        OperatorMatrix::linear_combination(&parts)
    }

    pub fn hamiltonian(&self, s: f64) -> Result<OperatorMatrix> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::domain("path_hamiltonian", format!("s = {s} outside [0, 1]")));
        }
        self.combine(1.0, &self.schedule.gamma(s))
    }

    pub fn final_hamiltonian(&self) -> Result<OperatorMatrix> {
        self.combine(1.0, &vec![1.0; self.terms.len()])
    }

    /// `∂_s H = Σ γ′_k H^r_k`.
    pub fn derivative(&self, s: f64) -> Result<OperatorMatrix> {
        self.combine(0.0, &self.schedule.derivative(s))
    }

    pub fn second_derivative(&self, s: f64) -> Result<OperatorMatrix> {
        self.combine(0.0, &self.schedule.second_derivative(s))
    }

    /// `E_1(s) − E_0(s)`.
    pub fn gap(&self, s: f64) -> Result<f64> {
        let e = eigensolve(&self.hamiltonian(s)?, HowMany::Lowest(2))?;
        if e.values.len() < 2 {
            return Err(Error::domain("gap_trace", "sector has a single state"));
        }
        Ok(e.values[1] - e.values[0])
    }

    fn label(&self, v: &DVector<f64>) -> Option<SymmetryLabel> {
        self.reflection.as_ref().map(|r| SymmetryLabel::from_expectation(v.dot(&r.apply(v))))
    }
}

/// Default number of uniformly spaced samples in a gap trace.
pub const DEFAULT_GRID: usize = 401;

/// Low-lying spectrum along a path.
#[derive(Debug, Clone)]
pub struct SpectrumTrace {
    pub s: Vec<f64>,
    /// Lowest `track_k` eigenvalues at each sample.
    pub levels: Vec<Vec<f64>>,
    pub gap: Vec<f64>,
    /// Labels of the two lowest levels when the path carries a reflection.
    pub labels: Vec<[Option<SymmetryLabel>; 2]>,
    /// Refined local minima `(s, gap)` of the gap, ascending in `s`.
    pub minima: Vec<(f64, f64)>,
    pub s_star: f64,
    pub min_gap: f64,
}

impl SpectrumTrace {
    /// Refined local minimum closest to `s`.
    pub fn minimum_near(&self, s: f64) -> Option<(f64, f64)> {
        self.minima.iter().copied().min_by(|a, b| (a.0 - s).abs().total_cmp(&(b.0 - s).abs()))
    }
}

/// Uniform grid of `n ≥ 2` points on `[0, 1]`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Lowest `track_k ≥ 2` levels on `grid`, with every local minimum of the
/// sampled gap refined by Brent minimization between its neighbours.
pub fn gap_trace(path: &AdiabaticPath, grid: &[f64], track_k: usize) -> Result<SpectrumTrace> {
    const OP: &str = "gap_trace";
    if grid.len() < 3 {
        return Err(Error::domain(OP, "grid needs at least three points"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) || grid[0] < 0.0 || grid[grid.len() - 1] > 1.0 {
        return Err(Error::domain(OP, "grid must increase strictly inside [0, 1]"));
    }
    let k = track_k.max(2);
    let samples: Vec<(Vec<f64>, [Option<SymmetryLabel>; 2])> = grid
        .par_iter()
        .map(|&s| {
            let e = eigensolve(&path.hamiltonian(s)?, HowMany::Lowest(k))?;
            if e.values.len() < 2 {
                return Err(Error::domain(OP, "sector has a single state"));
            }
            let labels = [0, 1].map(|i| path.label(&e.vectors.column(i).into_owned()));
            Ok((e.values, labels))
        })
        .collect::<Result<_>>()?;
    let gap: Vec<f64> = samples.iter().map(|(v, _)| v[1] - v[0]).collect();
    let n = grid.len();
    let mut minima = Vec::new();
    for i in 0..n {
        let left = i == 0 || gap[i] <= gap[i - 1];
        let right = i == n - 1 || gap[i] < gap[i + 1];
        if !(left && right) {
            continue;
        }
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(n - 1)];
        let f = |s: f64| path.gap(s).unwrap_or(f64::INFINITY);
        let (mut s, mut g) = brent(&f, lo, hi, 1e-10)?;
        if gap[i] < g {
            (s, g) = (grid[i], gap[i]);
        }
        minima.push((s, g));
    }
    let (s_star, min_gap) = minima.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1)).expect("a sampled minimum exists");
    Ok(SpectrumTrace {
        s: grid.to_vec(),
        levels: samples.iter().map(|(v, _)| v.clone()).collect(),
        labels: samples.into_iter().map(|(_, l)| l).collect(),
        gap,
        minima,
        s_star,
        min_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adiabatic::ScheduleKind;
    use nalgebra::DMatrix;

    fn two_level(a: f64, b: f64, c: f64) -> OperatorMatrix {
        OperatorMatrix::from_dense(DMatrix::from_row_slice(2, 2, &[a, c, c, b]))
    }

    fn crossing_path(coupling: f64) -> AdiabaticPath {
        // Levels 0 and 1 swap at s = 0.3 with an avoided crossing of width `coupling`.
        let hi = two_level(0.0, 0.3, coupling);
        let term = two_level(0.0, -1.0, 0.0);
        AdiabaticPath::new(hi, vec![term], PathSchedule::direct(1, false)).unwrap()
    }

    #[test]
    fn endpoints() {
        let p = crossing_path(0.01);
        assert_eq!(p.hamiltonian(0.0).unwrap(), p.initial);
        let hf = p.final_hamiltonian().unwrap();
        assert!(p.hamiltonian(1.0).unwrap().frobenius_distance(&hf) < 1e-15);
        let expected = OperatorMatrix::linear_combination(&[(0.63, &p.initial), (0.37, &hf)]).unwrap();
        assert!(p.hamiltonian(0.37).unwrap().frobenius_distance(&expected) < 1e-12);
        assert!(p.hamiltonian(1.5).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let bad = AdiabaticPath::new(two_level(0.0, 1.0, 0.0), vec![OperatorMatrix::zeros(3)], PathSchedule::direct(1, false));
        assert!(bad.is_err());
        let bad = AdiabaticPath::new(two_level(0.0, 1.0, 0.0), vec![], PathSchedule::direct(1, false));
        assert!(bad.is_err());
    }

    #[test]
    fn sharp_avoided_crossing_is_refined() {
        let p = crossing_path(1e-6);
        let t = gap_trace(&p, &uniform_grid(41), 2).unwrap();
        assert!((t.s_star - 0.3).abs() < 1e-6);
        assert!((t.min_gap - 2e-6).abs() < 1e-8);
        assert!(t.gap.iter().all(|&g| g >= 0.0));
    }

    #[test]
    fn labels_follow_reflection() {
        let p = crossing_path(0.0).with_reflection(two_level(1.0, -1.0, 0.0)).unwrap();
        let t = gap_trace(&p, &uniform_grid(11), 2).unwrap();
        assert_eq!(t.labels[0][0], Some(SymmetryLabel::Symmetric));
        assert_eq!(t.labels[10][0], Some(SymmetryLabel::Antisymmetric));
    }

    #[test]
    fn stepwise_endpoint_matches_final() {
        let terms = vec![two_level(1.0, 0.0, 0.2), two_level(0.0, -2.0, 0.1)];
        let sched = PathSchedule::new(ScheduleKind::Stepwise(vec![vec![1], vec![0]]), 2, true).unwrap();
        let p = AdiabaticPath::new(two_level(0.0, 1.0, 0.0), terms, sched).unwrap();
        assert!(p.hamiltonian(1.0).unwrap().frobenius_distance(&p.final_hamiltonian().unwrap()) < 1e-10);
    }
}
