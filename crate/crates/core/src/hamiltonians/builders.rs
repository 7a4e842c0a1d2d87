//! Lattice Hubbard-type models on interleaved spin orbitals.

use crate::error::{Error, Result};
use crate::fock::Occupation;

use super::HamiltonianSpec;

/// Hopping between two sites with separate spin-up and spin-down amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub up: f64,
    pub down: f64,
}

impl Bond {
    pub fn new(a: usize, b: usize, up: f64, down: f64) -> Self {
        Bond { a, b, up, down }
    }

    pub fn uniform(a: usize, b: usize, j: f64) -> Self {
        Bond { a, b, up: j, down: j }
    }
}

/// Generic spinful lattice: `Σ_bonds j_σ (a†_aσ a_bσ + h.c.) + Σ_p U_p n_p↑ n_p↓ + μ N`.
/// The on-site interaction is stored as `g_(pσ)(pσ)(pτ)(pτ) = U_p` for all
/// spin pairs, so that equal-spin entries vanish as operators.
pub fn build_spin_lattice(
    sites: usize,
    bonds: &[Bond],
    onsite: &[f64],
    mu: f64,
    particles: Occupation,
) -> Result<HamiltonianSpec> {
    if onsite.len() != sites {
        return Err(Error::domain("build_spin_lattice", "one on-site U per site required"));
    }
    let l = 2 * sites;
    let mut spec = HamiltonianSpec::zeros(l, particles);
    spec.sites = Some(sites);
    for bond in bonds {
        if bond.a >= sites || bond.b >= sites || bond.a == bond.b {
            return Err(Error::domain("build_spin_lattice", "bond endpoints must be distinct sites"));
        }
        for (sigma, j) in [(0, bond.up), (1, bond.down)] {
            let (p, q) = (2 * bond.a + sigma, 2 * bond.b + sigma);
            spec.h[(p, q)] += j;
            spec.h[(q, p)] += j;
        }
    }
    for p in 0..l {
        spec.h[(p, p)] += mu;
    }
    for (site, &u) in onsite.iter().enumerate() {
        for s in 0..2 {
            for t in 0..2 {
                let (a, b) = (2 * site + s, 2 * site + t);
                spec.g.set(a, a, b, b, u);
            }
        }
    }
    Ok(spec)
}

/// Single-band Hubbard chain with hopping `j`, interaction `u` and chemical
/// potential `mu`, at half filling (the extra particle of an odd chain is spin up).
pub fn build_hubbard_chain(sites: usize, j: f64, u: f64, mu: f64, periodic: bool) -> Result<HamiltonianSpec> {
    if sites < 2 {
        return Err(Error::domain("build_hubbard_chain", "need at least two sites"));
    }
    let mut bonds: Vec<Bond> = (0..sites - 1).map(|p| Bond::uniform(p, p + 1, j)).collect();
    if periodic && sites > 2 {
        bonds.push(Bond::uniform(sites - 1, 0, j));
    }
    let particles = Occupation::Spin { up: sites.div_ceil(2), down: sites / 2 };
    build_spin_lattice(sites, &bonds, &vec![u; sites], mu, particles)
}

/// Three-site model with one particle per spin: bonds (1,2) and (2,3) at `j`,
/// closing bond (1,3) at `+j13` for spin up and `−j13` for spin down, and
/// on-site interactions `u1`, `u3` on the outer sites only.
pub fn build_trimer(j: f64, j13: f64, u1: f64, u3: f64) -> HamiltonianSpec {
    let bonds = [Bond::uniform(0, 1, j), Bond::uniform(1, 2, j), Bond::new(0, 2, j13, -j13)];
    build_spin_lattice(3, &bonds, &[u1, 0.0, u3], 0.0, Occupation::Spin { up: 1, down: 1 })
        .expect("trimer layout is valid")
}

/// Periodic four-site ring at half filling with bonds `j` on (1,2), (3,4) and
/// `j ± δ` (spin up / down) on (2,3), (4,1), and per-site interactions.
pub fn build_four_site_split(j: f64, delta: f64, onsite: [f64; 4]) -> HamiltonianSpec {
    let bonds = [
        Bond::uniform(0, 1, j),
        Bond::new(1, 2, j + delta, j - delta),
        Bond::uniform(2, 3, j),
        Bond::new(3, 0, j + delta, j - delta),
    ];
    build_spin_lattice(4, &bonds, &onsite, 0.0, Occupation::Spin { up: 2, down: 2 })
        .expect("four-site layout is valid")
}

/// [`build_four_site_split`] with uniform interaction `u`.
pub fn build_four_site(j: f64, delta: f64, u: f64) -> HamiltonianSpec {
    build_four_site_split(j, delta, [u; 4])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{eigensolve, FockSector, HowMany};
    use crate::hamiltonians::symmetry::{symmetry_label, ReflectionSymmetry, SymmetryLabel};
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn spectrum(spec: &HamiltonianSpec, occ: Occupation) -> Vec<f64> {
        let s = FockSector::new(spec.num_modes, occ).unwrap();
        eigensolve(&spec.sector_matrix(&s).unwrap(), HowMany::All).unwrap().values
    }

    #[test]
    fn dimer_single_particle_energies() {
        let spec = build_hubbard_chain(2, 1.0, 0.0, 0.0, false).unwrap();
        let e = spectrum(&spec, Occupation::Spin { up: 1, down: 0 });
        assert_relative_eq!(e[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(e[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn dimer_ground_energy() {
        for u in [-3.0, 0.5, 4.0] {
            let spec = build_hubbard_chain(2, 1.0, u, 0.0, false).unwrap();
            let e = spectrum(&spec, spec.particles);
            // Oracle: the 4x4 matrix in {↑↓ on 1, ↑1↓2, ↓1↑2, ↑↓ on 2}, up to
            // the signs of the hopping entries, which do not affect the spectrum.
            let m = DMatrix::from_row_slice(4, 4, &[u, 1., 1., 0., 1., 0., 0., 1., 1., 0., 0., 1., 0., 1., 1., u]);
            let oracle = m.symmetric_eigenvalues().min();
            assert_relative_eq!(e[0], oracle, epsilon = 1e-12);
            assert_relative_eq!(e[0], (u - (u * u + 16.0f64).sqrt()) / 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn chemical_potential_shifts_by_mu_n() {
        let base = build_hubbard_chain(3, 1.0, 2.0, 0.0, true).unwrap();
        let shifted = build_hubbard_chain(3, 1.0, 2.0, 0.7, true).unwrap();
        let n = base.particles.particles() as f64;
        for (a, b) in spectrum(&base, base.particles).iter().zip(spectrum(&shifted, base.particles)) {
            assert_relative_eq!(b - a, 0.7 * n, epsilon = 1e-12);
        }
    }

    #[test]
    fn trimer_one_particle_spectrum() {
        let up = Occupation::Spin { up: 1, down: 0 };
        let refl = ReflectionSymmetry::trimer();
        // Degenerate pair at -j when j13 = j.
        let e = spectrum(&build_trimer(1.0, 1.0, 0.0, 0.0), up);
        assert_relative_eq!(e[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(e[1], -1.0, epsilon = 1e-12);
        for (j13, expect) in [(0.5, SymmetryLabel::Symmetric), (1.5, SymmetryLabel::Antisymmetric)] {
            let spec = build_trimer(1.0, j13, 0.0, 0.0);
            let s = FockSector::new(6, up).unwrap();
            let eig = eigensolve(&spec.sector_matrix(&s).unwrap(), HowMany::Lowest(1)).unwrap();
            let v = eig.vectors.column(0).into_owned();
            assert_eq!(symmetry_label(&v, &refl, &s).unwrap(), expect);
        }
    }

    #[test]
    fn trimer_first_order_energies() {
        let (j, u, d) = (1.0, -0.05, 0.01);
        let refl = ReflectionSymmetry::trimer();
        let spec = build_trimer(j, j + d, u, u);
        let s = spec.sector().unwrap();
        let eig = eigensolve(&spec.sector_matrix(&s).unwrap(), HowMany::All).unwrap();
        let mut es = None;
        let mut ea = None;
        for k in 0..eig.values.len() {
            let v = eig.vectors.column(k).into_owned();
            match symmetry_label(&v, &refl, &s).unwrap() {
                SymmetryLabel::Symmetric if es.is_none() => es = Some(eig.values[k]),
                SymmetryLabel::Antisymmetric if ea.is_none() => ea = Some(eig.values[k]),
                _ => {}
            }
        }
        assert!((es.unwrap() - (-3.0 * j + u / 9.0 - d / 3.0)).abs() < 5e-3);
        assert!((ea.unwrap() - (-3.0 * j + u / 3.0 - 5.0 * d / 3.0)).abs() < 5e-3);
    }

    #[test]
    fn four_site_free_ground_state_is_antisymmetric() {
        let spec = build_four_site(1.0, 0.3, 0.0);
        let s = spec.sector().unwrap();
        let eig = eigensolve(&spec.sector_matrix(&s).unwrap(), HowMany::Lowest(2)).unwrap();
        assert!(eig.values[1] - eig.values[0] > 1e-6);
        let v = eig.vectors.column(0).into_owned();
        assert_eq!(symmetry_label(&v, &ReflectionSymmetry::four_site(), &s).unwrap(), SymmetryLabel::Antisymmetric);
    }

    #[test]
    fn four_site_first_order_energies() {
        let (j, d, u) = (1.0, 0.01, -0.02);
        let spec = build_four_site(j, d, u);
        let s = spec.sector().unwrap();
        let eig = eigensolve(&spec.sector_matrix(&s).unwrap(), HowMany::All).unwrap();
        let refl = ReflectionSymmetry::four_site();
        let mut es = None;
        let mut ea = None;
        for k in 0..eig.values.len() {
            let v = eig.vectors.column(k).into_owned();
            match symmetry_label(&v, &refl, &s).unwrap() {
                SymmetryLabel::Symmetric if es.is_none() => es = Some(eig.values[k]),
                SymmetryLabel::Antisymmetric if ea.is_none() => ea = Some(eig.values[k]),
                _ => {}
            }
        }
        assert!((ea.unwrap() - (-4.0 * j - 2.0 * d + u)).abs() < 2e-3);
        assert!((es.unwrap() - (-4.0 * j + 1.25 * u)).abs() < 2e-3);
    }

    #[test]
    fn four_site_spin_exchange_at_zero_delta() {
        use crate::fock::{commutator_norm, mode_map_matrix};
        let s = FockSector::new(8, Occupation::Total(4)).unwrap();
        let flip: Vec<(usize, f64)> = (0..8).map(|m| (m ^ 1, 1.0)).collect();
        let x = mode_map_matrix(&s, &flip).unwrap();
        let sym = build_four_site(1.0, 0.0, -2.0).with_particles(Occupation::Total(4));
        assert!(commutator_norm(&sym.sector_matrix(&s).unwrap(), &x) <= 1e-12);
        let asym = build_four_site(1.0, 0.2, -2.0).with_particles(Occupation::Total(4));
        assert!(commutator_norm(&asym.sector_matrix(&s).unwrap(), &x) > 1e-3);
    }
}
