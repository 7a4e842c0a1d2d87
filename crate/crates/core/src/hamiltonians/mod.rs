//! Coefficient-tensor hamiltonians
//! `H = Σ h_PQ a†_P a_Q + ½ Σ g_PQRS a†_P a†_R a_S a_Q + c`,
//! their symmetry checks, and the absorption of the one-body part into a
//! single antisymmetrised two-body tensor.

mod builders;
mod hf;
mod model_file;
mod symmetry;

pub use builders::{
    build_four_site, build_four_site_split, build_hubbard_chain, build_spin_lattice, build_trimer,
    Bond,
};
pub use hf::{
    density_from_orbitals, hartree_fock, hf_at_density, mean_field_energy, mean_field_spec, Ansatz,
    HfResult, ProductFamily,
};
pub use model_file::{parse_model, parse_model_lines, ModelKind, ModelSpec, DEFAULT_SPLIT};
pub use symmetry::{reflection_expectation, symmetry_label, ReflectionSymmetry, SymmetryLabel};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::fock::{build_operator, FockSector, Occupation, OperatorMatrix, Term};

/// Dense rank-4 tensor indexed `[P, Q, R, S]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 { n, data: vec![0.0; n * n * n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn at(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.n + q) * self.n + r) * self.n + s
    }

    #[inline]
    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.data[self.at(p, q, r, s)]
    }

    #[inline]
    pub fn set(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let i = self.at(p, q, r, s);
        self.data[i] = v;
    }

    #[inline]
    pub fn add(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let i = self.at(p, q, r, s);
        self.data[i] += v;
    }

    /// Non-zero entries as `((P, Q, R, S), value)`.
    pub fn nonzeros(&self) -> impl Iterator<Item = ((usize, usize, usize, usize), f64)> + '_ {
        let n = self.n;
        self.data.iter().enumerate().filter(|(_, v)| **v != 0.0).map(move |(i, &v)| {
            ((i / (n * n * n), (i / (n * n)) % n, (i / n) % n, i % n), v)
        })
    }

    pub fn scaled(&self, c: f64) -> Tensor4 {
        Tensor4 { n: self.n, data: self.data.iter().map(|v| v * c).collect() }
    }

    pub fn sub(&self, other: &Tensor4) -> Tensor4 {
        assert_eq!(self.n, other.n);
        Tensor4 { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// A particle-conserving hamiltonian in coefficient form together with its
/// target sector.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub num_modes: usize,
    pub h: DMatrix<f64>,
    pub g: Tensor4,
    /// Scalar energy shift.
    pub offset: f64,
    pub particles: Occupation,
    /// Number of lattice sites when modes are interleaved spin orbitals.
    pub sites: Option<usize>,
}

impl HamiltonianSpec {
    pub fn zeros(num_modes: usize, particles: Occupation) -> Self {
        HamiltonianSpec {
            num_modes,
            h: DMatrix::zeros(num_modes, num_modes),
            g: Tensor4::zeros(num_modes),
            offset: 0.0,
            particles,
            sites: None,
        }
    }

    pub fn with_particles(mut self, particles: Occupation) -> Self {
        self.particles = particles;
        self
    }

    pub fn sector(&self) -> Result<FockSector> {
        FockSector::new(self.num_modes, self.particles)
    }

    /// Operator strings of the hamiltonian, skipping zero coefficients.
    pub fn terms(&self) -> Vec<Term> {
        let mut terms = Vec::new();
        if self.offset != 0.0 {
            terms.push(Term::scalar(self.offset));
        }
        for p in 0..self.num_modes {
            for q in 0..self.num_modes {
                if self.h[(p, q)] != 0.0 {
                    terms.push(Term::one_body(self.h[(p, q)], p, q));
                }
            }
        }
        for ((p, q, r, s), v) in self.g.nonzeros() {
            terms.push(Term::two_body(0.5 * v, p, q, r, s));
        }
        terms
    }

    pub fn sector_matrix(&self, sector: &FockSector) -> Result<OperatorMatrix> {
        build_operator(sector, &self.terms())
    }

    /// `self − other` as a hamiltonian on the same sector.
    pub fn difference(&self, other: &HamiltonianSpec) -> Result<HamiltonianSpec> {
        if self.num_modes != other.num_modes || self.particles != other.particles {
            return Err(Error::domain("difference", "hamiltonians live on different spaces"));
        }
        Ok(HamiltonianSpec {
            num_modes: self.num_modes,
            h: &self.h - &other.h,
            g: self.g.sub(&other.g),
            offset: self.offset - other.offset,
            particles: self.particles,
            sites: self.sites,
        })
    }
}

/// One violated coefficient symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub relation: &'static str,
    /// Index tuple with the largest deviation.
    pub indices: Vec<usize>,
    pub deviation: f64,
    /// Number of index tuples violating the relation.
    pub count: usize,
}

/// Outcome of [`validate_symmetries`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymmetryReport {
    pub violations: Vec<Violation>,
}

impl SymmetryReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_deviation(&self) -> f64 {
        self.violations.iter().fold(0.0, |m, v| m.max(v.deviation))
    }
}

/// Tolerance for coefficient symmetries.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Checks `h_PQ = h_QP` and `g_PQRS = g_RSPQ = g_QPRS = g_PQSR`.
pub fn validate_symmetries(spec: &HamiltonianSpec) -> SymmetryReport {
    let n = spec.num_modes;
    let mut report = SymmetryReport::default();
    let mut h_worst: Option<Violation> = None;
    for p in 0..n {
        for q in 0..n {
            let d = (spec.h[(p, q)] - spec.h[(q, p)]).abs();
            if d > SYMMETRY_TOL {
                let v = h_worst.get_or_insert(Violation {
                    relation: "h_PQ = h_QP",
                    indices: vec![p, q],
                    deviation: 0.0,
                    count: 0,
                });
                v.count += 1;
                if d > v.deviation {
                    v.deviation = d;
                    v.indices = vec![p, q];
                }
            }
        }
    }
    report.violations.extend(h_worst);
    type Perm = fn(usize, usize, usize, usize) -> (usize, usize, usize, usize);
    let relations: [(&'static str, Perm); 3] = [
        ("g_PQRS = g_RSPQ", |p, q, r, s| (r, s, p, q)),
        ("g_PQRS = g_QPRS", |p, q, r, s| (q, p, r, s)),
        ("g_PQRS = g_PQSR", |p, q, r, s| (p, q, s, r)),
    ];
    for (relation, perm) in relations {
        let mut worst: Option<Violation> = None;
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let (a, b, c, d) = perm(p, q, r, s);
                        let dev = (spec.g.get(p, q, r, s) - spec.g.get(a, b, c, d)).abs();
                        if dev > SYMMETRY_TOL {
                            let v = worst.get_or_insert(Violation {
                                relation,
                                indices: vec![p, q, r, s],
                                deviation: 0.0,
                                count: 0,
                            });
                            v.count += 1;
                            if dev > v.deviation {
                                v.deviation = dev;
                                v.indices = vec![p, q, r, s];
                            }
                        }
                    }
                }
            }
        }
        report.violations.extend(worst);
    }
    report
}

/// Combined tensor `G = (w + g)/2` and its antisymmetrised form
/// `G̃_PQRS = 2(G_PQRS − G_PSRQ)`, used for `P < R`, `Q < S`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTensor {
    pub num_modes: usize,
    pub combined: Tensor4,
    pub antisymmetrised: Tensor4,
}

impl InteractionTensor {
    /// Builds from a combined tensor `G`.
    pub fn from_combined(combined: Tensor4) -> Self {
        let n = combined.dim();
        let mut gt = Tensor4::zeros(n);
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = 2.0 * (combined.get(p, q, r, s) - combined.get(p, s, r, q));
                        if v != 0.0 {
                            gt.set(p, q, r, s, v);
                        }
                    }
                }
            }
        }
        InteractionTensor { num_modes: n, combined, antisymmetrised: gt }
    }

    /// Purely two-body tensor `g` with no one-body part to absorb.
    pub fn from_two_body(g: &Tensor4) -> Self {
        Self::from_combined(g.scaled(0.5))
    }

    /// Operator strings `G̃_PQRS a†_P a†_R a_S a_Q` over `P < R`, `Q < S`.
    pub fn terms(&self) -> Vec<Term> {
        let n = self.num_modes;
        let mut terms = Vec::new();
        for p in 0..n {
            for r in p + 1..n {
                for q in 0..n {
                    for s in q + 1..n {
                        let v = self.antisymmetrised.get(p, q, r, s);
                        if v != 0.0 {
                            terms.push(Term::two_body(v, p, q, r, s));
                        }
                    }
                }
            }
        }
        terms
    }

    pub fn sector_matrix(&self, sector: &FockSector) -> Result<OperatorMatrix> {
        build_operator(sector, &self.terms())
    }
}

/// Rewrites the one-body part and scalar offset as two-body terms, exact
/// within the spec's fixed particle number `N`:
/// `w_PQRS = (h_PQ δ_RS + δ_PQ h_RS)/(N−1) + 2c δ_PQ δ_RS/(N(N−1))`.
pub fn absorb_one_body(spec: &HamiltonianSpec) -> Result<InteractionTensor> {
    let n_part = spec.particles.particles();
    if n_part < 2 {
        return Err(Error::domain(
            "absorb_one_body",
            format!("one-body absorption undefined for N={n_part} (needs N >= 2)"),
        ));
    }
    let l = spec.num_modes;
    let nm1 = (n_part - 1) as f64;
    let c = 2.0 * spec.offset / (n_part as f64 * nm1);
    let mut gc = spec.g.scaled(0.5);
    for p in 0..l {
        for q in 0..l {
            let hpq = spec.h[(p, q)];
            if hpq == 0.0 {
                continue;
            }
            for r in 0..l {
                // Halved contributions of h_PQ δ_RR and δ_RR h_PQ to w.
                gc.add(p, q, r, r, 0.5 * hpq / nm1);
                gc.add(r, r, p, q, 0.5 * hpq / nm1);
            }
        }
    }
    if c != 0.0 {
        for p in 0..l {
            for r in 0..l {
                gc.add(p, p, r, r, 0.5 * c);
            }
        }
    }
    Ok(InteractionTensor::from_combined(gc))
}

/// Seeded random spec with entries in `[-1, 1)` and the full coefficient
/// symmetries of a real Hamiltonian.
pub fn random_spec(l: usize, n: usize, seed: u64) -> HamiltonianSpec {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut spec = HamiltonianSpec::zeros(l, Occupation::Total(n));
    for p in 0..l {
        for q in 0..=p {
            let v = rng.random_range(-1.0..1.0);
            spec.h[(p, q)] = v;
            spec.h[(q, p)] = v;
        }
    }
    for p in 0..l {
        for q in 0..l {
            for r in 0..l {
                for s in 0..l {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    for (a, b, c, d) in [
                        (p, q, r, s),
                        (r, s, p, q),
                        (q, p, r, s),
                        (p, q, s, r),
                        (q, p, s, r),
                        (s, r, p, q),
                        (r, s, q, p),
                        (s, r, q, p),
                    ] {
                        spec.g.set(a, b, c, d, v);
                    }
                }
            }
        }
    }
    spec.offset = rng.random_range(-1.0..1.0);
    spec
}

#[cfg(test)]
mod tests {
    use super::*;
    
    use proptest::prelude::*;

    #[test]
    fn random_spec_is_symmetric() {
        assert!(validate_symmetries(&random_spec(4, 2, 1)).passes());
    }

    #[test]
    fn injected_violation_is_named() {
        let mut spec = build_hubbard_chain(2, 1.0, 2.0, 0.0, false).unwrap();
        spec.g.set(0, 1, 2, 3, 0.5);
        let report = validate_symmetries(&spec);
        assert!(!report.passes());
        let v = report.violations.iter().find(|v| v.relation == "g_PQRS = g_RSPQ").unwrap();
        assert!(v.indices == vec![0, 1, 2, 3] || v.indices == vec![2, 3, 0, 1]);
        assert_eq!(v.deviation, 0.5);
    }

    #[test]
    fn builders_validate() {
        assert!(validate_symmetries(&build_hubbard_chain(4, 1.0, -3.0, 0.2, true).unwrap()).passes());
        let t = build_trimer(1.0, 0.4, -2.0, -2.1);
        assert!(validate_symmetries(&t).passes());
        // Spin-down closing bond carries the opposite sign, and both blocks stay symmetric.
        assert_eq!(t.h[(0, 4)], 0.4);
        assert_eq!(t.h[(1, 5)], -0.4);
        assert_eq!(t.h[(5, 1)], -0.4);
        assert!(validate_symmetries(&build_four_site(1.0, 0.1, -2.0)).passes());
    }

    #[test]
    fn zero_one_body_gives_half_g() {
        let mut spec = random_spec(4, 2, 3);
        spec.h.fill(0.0);
        spec.offset = 0.0;
        let t = absorb_one_body(&spec).unwrap();
        assert_eq!(t.combined, spec.g.scaled(0.5));
    }

    #[test]
    fn absorption_needs_two_particles() {
        let spec = random_spec(4, 1, 3);
        let err = absorb_one_body(&spec).unwrap_err();
        assert!(err.to_string().contains("one-body absorption undefined"));
    }

    #[test]
    fn pure_one_body_at_two_particles() {
        let mut spec = random_spec(5, 2, 11);
        spec.g = Tensor4::zeros(5);
        spec.offset = 0.0;
        let sector = spec.sector().unwrap();
        let direct = spec.sector_matrix(&sector).unwrap();
        let absorbed = absorb_one_body(&spec).unwrap().sector_matrix(&sector).unwrap();
        assert!(direct.frobenius_distance(&absorbed) <= 1e-10);
    }

    #[test]
    fn trimer_absorption_matches_direct_build() {
        let spec = build_trimer(1.0, 0.37, -5.0, -5.0);
        let sector = spec.sector().unwrap();
        assert_eq!(sector.dim(), 9);
        let direct = spec.sector_matrix(&sector).unwrap();
        let absorbed = absorb_one_body(&spec).unwrap().sector_matrix(&sector).unwrap();
        assert!(direct.frobenius_distance(&absorbed) <= 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn absorption_identity(l in 3usize..=6, n in 2usize..=4, seed in any::<u64>()) {
            prop_assume!(n <= l);
            let spec = random_spec(l, n, seed);
            let sector = spec.sector().unwrap();
            let direct = spec.sector_matrix(&sector).unwrap();
            let t = absorb_one_body(&spec).unwrap();
            prop_assert!(direct.frobenius_distance(&t.sector_matrix(&sector).unwrap()) <= 1e-10);
            // Antisymmetrised tensor definition.
            for (p, q, r, s) in [(0, 1, 1, 2), (0, 2, 1, 0), (1, 2, 0, 1)] {
                let expect = 2.0 * (t.combined.get(p, q, r, s) - t.combined.get(p, s, r, q));
                prop_assert!((t.antisymmetrised.get(p, q, r, s) - expect).abs() <= 1e-14);
            }
        }

        #[test]
        fn chain_absorption_identity(sites in 2usize..=4, j in -2.0f64..2.0, u in -4.0f64..4.0, periodic in any::<bool>()) {
            let spec = build_hubbard_chain(sites, j, u, 0.3, periodic).unwrap();
            let sector = spec.sector().unwrap();
            let direct = spec.sector_matrix(&sector).unwrap();
            let absorbed = absorb_one_body(&spec).unwrap().sector_matrix(&sector).unwrap();
            prop_assert!(direct.frobenius_distance(&absorbed) <= 1e-10);
        }
    }
}
