//! Variational mean-field references over restricted Slater-determinant families.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::Occupation;
use crate::minimize::{brent, coordinate_descent};

use super::{HamiltonianSpec, Tensor4};

/// Parameter tolerance of the variational minimization.
pub const HF_TOL: f64 = 1e-10;

type OrbitalMap = dyn Fn(&[f64]) -> Vec<DVector<f64>> + Send + Sync;

/// A parametrised Slater determinant: occupied orthonormal spin orbitals as
/// functions of real parameters.
pub struct ProductFamily {
    pub name: String,
    pub bounds: Vec<(f64, f64)>,
    orbitals: Box<OrbitalMap>,
}

impl fmt::Debug for ProductFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProductFamily").field("name", &self.name).field("bounds", &self.bounds).finish()
    }
}

impl ProductFamily {
    pub fn new(
        name: impl Into<String>,
        bounds: Vec<(f64, f64)>,
        orbitals: impl Fn(&[f64]) -> Vec<DVector<f64>> + Send + Sync + 'static,
    ) -> Self {
        ProductFamily { name: name.into(), bounds, orbitals: Box::new(orbitals) }
    }

    pub fn num_params(&self) -> usize {
        self.bounds.len()
    }

    pub fn orbitals(&self, params: &[f64]) -> Vec<DVector<f64>> {
        (self.orbitals)(params)
    }

    pub fn density(&self, params: &[f64]) -> DMatrix<f64> {
        density_from_orbitals(&self.orbitals(params))
    }

    /// Trimer family with spin up in `(1, 0, −1)/√2` and spin down in
    /// `(1, x, 1)/√(2+x²)`.
    pub fn trimer_antisymmetric() -> Self {
        ProductFamily::new("trimer-A", vec![(-10.0, 10.0)], |p| {
            vec![spin_orbital(3, 0, &[1.0, 0.0, -1.0]), spin_orbital(3, 1, &[1.0, p[0], 1.0])]
        })
    }

    /// Trimer family with spin down in `(1, x, 1)` and spin up in `(1, y, 1)`;
    /// parameters are `[x, y]`.
    pub fn trimer_symmetric() -> Self {
        ProductFamily::new("trimer-S", vec![(-10.0, 10.0), (-10.0, 10.0)], |p| {
            vec![spin_orbital(3, 0, &[1.0, p[1], 1.0]), spin_orbital(3, 1, &[1.0, p[0], 1.0])]
        })
    }
}

/// Normalised spin orbital on `sites` sites with the given site amplitudes.
fn spin_orbital(sites: usize, spin: usize, amps: &[f64]) -> DVector<f64> {
    let mut v = DVector::zeros(2 * sites);
    for (p, &a) in amps.iter().enumerate() {
        v[2 * p + spin] = a;
    }
    let n = v.norm();
    v / n
}

/// `ρ_PQ = <a†_P a_Q>` of the determinant built from orthonormal orbitals.
pub fn density_from_orbitals(orbitals: &[DVector<f64>]) -> DMatrix<f64> {
    let l = orbitals.first().map(|o| o.len()).unwrap_or(0);
    let mut rho = DMatrix::zeros(l, l);
    for o in orbitals {
        rho += o * o.transpose();
    }
    rho
}

/// Family of mean-field states to search.
#[derive(Debug)]
pub enum Ansatz {
    /// Antisymmetric trimer determinant with one free parameter.
    TrimerAntisymmetric,
    /// Symmetric trimer determinant with two free parameters.
    TrimerSymmetric,
    /// Lowest one-body orbitals of `h` per spin; no free parameters. Applies
    /// to spin lattices whose mean fields are uniform, such as the four-site ring.
    FreeOrbitals,
    /// Caller-supplied family.
    Family(ProductFamily),
}

/// Outcome of [`hartree_fock`].
#[derive(Debug, Clone)]
pub struct HfResult {
    pub energy: f64,
    pub params: Vec<f64>,
    pub density: DMatrix<f64>,
    /// `<n_P>` per mode.
    pub occupations: Vec<f64>,
    /// One-body hamiltonian with the mean-field constant in its offset.
    pub spec: HamiltonianSpec,
}

fn wick_pairs(g: &Tensor4, rho: &DMatrix<f64>) -> f64 {
    g.nonzeros()
        .map(|((p, q, r, s), v)| v * (rho[(p, q)] * rho[(r, s)] - rho[(p, s)] * rho[(r, q)]))
        .sum()
}

/// Determinant expectation value `Σ h ρ + ½ Σ g (ρ_PQ ρ_RS − ρ_PS ρ_RQ) + c`.
pub fn mean_field_energy(spec: &HamiltonianSpec, rho: &DMatrix<f64>) -> f64 {
    spec.h.component_mul(rho).sum() + 0.5 * wick_pairs(&spec.g, rho) + spec.offset
}

/// Mean-field hamiltonian at density `ρ`: Fock matrix
/// `h_PQ + Σ_RS (g_PQRS − g_PSRQ) ρ_RS`, no two-body part, and the double
/// counting constant `−½ Σ g (ρ_PQ ρ_RS − ρ_PS ρ_RQ)` added to the offset.
pub fn mean_field_spec(spec: &HamiltonianSpec, rho: &DMatrix<f64>) -> HamiltonianSpec {
    let mut out = HamiltonianSpec::zeros(spec.num_modes, spec.particles);
    out.sites = spec.sites;
    out.h = spec.h.clone();
    for ((p, q, r, s), v) in spec.g.nonzeros() {
        out.h[(p, q)] += v * rho[(r, s)];
        out.h[(p, s)] -= v * rho[(r, q)];
    }
    out.offset = spec.offset - 0.5 * wick_pairs(&spec.g, rho);
    out
}

fn free_orbitals(spec: &HamiltonianSpec) -> Result<Vec<DVector<f64>>> {
    let (Some(sites), Occupation::Spin { up, down }) = (spec.sites, spec.particles) else {
        return Err(Error::domain("hartree_fock", "free-orbital ansatz needs a spin lattice"));
    };
    let mut orbitals = Vec::new();
    for (spin, count) in [(0, up), (1, down)] {
        let block = DMatrix::from_fn(sites, sites, |a, b| spec.h[(2 * a + spin, 2 * b + spin)]);
        let eig = crate::fock::symmetric_eigen(block, crate::fock::HowMany::Lowest(count + 1));
        if count < sites && eig.values.len() > count && count > 0 && eig.values[count] - eig.values[count - 1] < 1e-12 {
            return Err(Error::domain("hartree_fock", "open shell: free-orbital filling is ambiguous"));
        }
        for k in 0..count {
            let mut v = DVector::zeros(2 * sites);
            for a in 0..sites {
                v[2 * a + spin] = eig.vectors[(a, k)];
            }
            orbitals.push(v);
        }
    }
    Ok(orbitals)
}

fn require_trimer(spec: &HamiltonianSpec) -> Result<()> {
    if spec.sites == Some(3) && spec.particles == (Occupation::Spin { up: 1, down: 1 }) {
        Ok(())
    } else {
        Err(Error::domain("hartree_fock", "trimer ansatz needs the three-site, one-per-spin model"))
    }
}

/// Minimizes `<H>` over `family`, starting each coordinate search from a
/// coarse scan of the parameter box.
fn minimize_family(spec: &HamiltonianSpec, family: &ProductFamily) -> Result<(Vec<f64>, f64)> {
    let f = |p: &[f64]| mean_field_energy(spec, &family.density(p));
    let k = family.num_params();
    if k == 0 {
        return Ok((Vec::new(), f(&[])));
    }
    // Coarse scan for the basin.
    let steps = if k == 1 { 400 } else { 60 };
    let mut best = (vec![0.0; k], f64::INFINITY);
    let mut idx = vec![0usize; k];
    loop {
        let p: Vec<f64> = idx
            .iter()
            .zip(&family.bounds)
            .map(|(&i, &(lo, hi))| lo + (hi - lo) * i as f64 / steps as f64)
            .collect();
        let e = f(&p);
        if e < best.1 {
            best = (p, e);
        }
        let mut d = 0;
        while d < k {
            idx[d] += 1;
            if idx[d] <= steps {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == k {
            break;
        }
    }
    let local: Vec<(f64, f64)> = best
        .0
        .iter()
        .zip(&family.bounds)
        .map(|(&x, &(lo, hi))| {
            let h = (hi - lo) / steps as f64;
            ((x - 2.0 * h).max(lo), (x + 2.0 * h).min(hi))
        })
        .collect();
    if k == 1 {
        let (x, e) = brent(&|x| f(&[x]), local[0].0, local[0].1, HF_TOL)?;
        return Ok((vec![x], e));
    }
    coordinate_descent(&f, &best.0, &local, HF_TOL)
}

/// Variational mean-field solution of `spec` within `ansatz`, and the
/// mean-field hamiltonian built from the optimal density.
pub fn hartree_fock(spec: &HamiltonianSpec, ansatz: &Ansatz) -> Result<HfResult> {
    let (params, density) = match ansatz {
        Ansatz::TrimerAntisymmetric | Ansatz::TrimerSymmetric => {
            require_trimer(spec)?;
            let family = if matches!(ansatz, Ansatz::TrimerAntisymmetric) {
                ProductFamily::trimer_antisymmetric()
            } else {
                ProductFamily::trimer_symmetric()
            };
            let (p, _) = minimize_family(spec, &family)?;
            let rho = family.density(&p);
            (p, rho)
        }
        Ansatz::FreeOrbitals => (Vec::new(), density_from_orbitals(&free_orbitals(spec)?)),
        Ansatz::Family(family) => {
            let (p, _) = minimize_family(spec, family)?;
            let rho = family.density(&p);
            (p, rho)
        }
    };
    Ok(hf_at_density(spec, params, density))
}

/// Mean-field result at a prescribed density (no minimization).
pub fn hf_at_density(spec: &HamiltonianSpec, params: Vec<f64>, density: DMatrix<f64>) -> HfResult {
    HfResult {
        energy: mean_field_energy(spec, &density),
        occupations: density.diagonal().iter().copied().collect(),
        spec: mean_field_spec(spec, &density),
        params,
        density,
    }
}
