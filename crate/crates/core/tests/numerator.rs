use pairpath::adiabatic::{adiabatic_numerator, ScheduleKind};
use pairpath::experiments::{four_site_setup, four_site_stages, reference_spec, trimer_setup, trimer_stages, Reference, Setup, StageSelector};
use pairpath::hamiltonians::{build_hubbard_chain, random_spec};
use pairpath::pairing::norm_bound;
use pairpath::{AdiabaticPath, HamiltonianSpec, Occupation};
use proptest::prelude::*;

/// `(Σ_k max|γ′_k| |λ_k| ‖Φ_k‖)²`, with `‖Φ_k‖` checked against the pair bound.
fn numerator_bound(setup: &Setup, path: &AdiabaticPath) -> f64 {
    let l = setup.spec.num_modes;
    let n = setup.sector.particles();
    let cap = norm_bound(l, n).unwrap();
    let sum: f64 = setup
        .terms
        .iter()
        .zip(path.schedule.max_slopes())
        .map(|(t, slope)| {
            let lambda = setup.modes[t.mode].lambda;
            let phi = t.matrix.spectral_norm() / lambda.abs();
            assert!(phi <= cap + 1e-9, "pseudoprojector norm {phi} above bound {cap}");
            slope * lambda.abs() * phi
        })
        .sum();
    sum * sum
}

fn check_bound(setup: &Setup, path: &AdiabaticPath) {
    let i = adiabatic_numerator(path, 101).unwrap();
    let b = numerator_bound(setup, path);
    assert!(i <= b * (1.0 + 1e-9), "I = {i} exceeds {b}");
}

#[test]
fn bound_holds_on_model_paths() {
    let trimer = trimer_setup(1.0, 0.37, -5.0, 1e-6, Reference::LeadingOrder).unwrap();
    let four = four_site_setup(1.0, 0.1, -2.0, 1e-6, Reference::FreeOrbitals).unwrap();
    for (setup, stages) in [(&trimer, trimer_stages()), (&four, four_site_stages())] {
        for flat in [false, true] {
            check_bound(setup, &setup.path(ScheduleKind::Direct, flat).unwrap());
            check_bound(setup, &setup.stepwise_path(&stages, flat).unwrap());
            check_bound(setup, &setup.stepwise_path(&[vec![StageSelector::Each]], flat).unwrap());
        }
    }
}

fn hubbard(sites: usize) -> Setup {
    let spec = build_hubbard_chain(sites, 1.0, -1.5, 0.0, false).unwrap();
    let spec = spec.with_particles(Occupation::Spin { up: sites / 2, down: sites / 2 });
    let r = reference_spec(&spec, Reference::OneBody).unwrap();
    Setup::new(spec, r, None).unwrap()
}

#[test]
fn hubbard_numerator_ratio_is_size_independent() {
    // Direct: ‖U Σ n↑n↓‖ = |U| L/2. Fully stepwise: L stages of slope L.
    let mut ratios = Vec::new();
    for sites in [4, 6, 8] {
        let s = hubbard(sites);
        assert_eq!(s.terms.len(), sites);
        let direct = adiabatic_numerator(&s.path(ScheduleKind::Direct, false).unwrap(), 11).unwrap();
        let each = adiabatic_numerator(&s.stepwise_path(&[vec![StageSelector::Each]], false).unwrap(), 11).unwrap();
        let u2 = 1.5f64 * 1.5;
        assert!((direct - u2 * (sites * sites) as f64 / 4.0).abs() < 1e-9 * direct);
        assert!((each - u2 * (sites * sites) as f64).abs() < 1e-9 * each);
        ratios.push(each / direct);
    }
    assert!(ratios.iter().all(|r| (r - ratios[0]).abs() < 1e-9), "{ratios:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bound_holds_on_random_tensors(seed in any::<u64>(), stepwise in any::<bool>()) {
        let spec = random_spec(6, 2, seed);
        let zero = HamiltonianSpec::zeros(6, Occupation::Total(2));
        let setup = Setup::new(spec, zero, None).unwrap();
        let kind = if stepwise {
            ScheduleKind::Stepwise((0..setup.terms.len()).map(|k| vec![k]).collect())
        } else {
            ScheduleKind::Direct
        };
        check_bound(&setup, &setup.path(kind, false).unwrap());
    }
}
