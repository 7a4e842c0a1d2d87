//! Acceptance suite. Runs every criterion at its stated tolerance, prints
//! one PASS/FAIL line each, and exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use pairpath::adiabatic::{adiabatic_numerator, gap_trace, jansen_time, propagate, uniform_grid, ScheduleKind, DEFAULT_GRID};
use pairpath::experiments::{four_site_setup, four_site_stages, trimer_setup, trimer_stages, Reference, Setup};
use pairpath::fock::{eigensolve, HowMany};
use pairpath::hamiltonians::{
    build_trimer, hartree_fock, random_spec, symmetry_label, Ansatz, HamiltonianSpec, ReflectionSymmetry, SymmetryLabel,
};
use pairpath::pairing::{exact_norm, hadamard_maximal_modes, norm_bound, random_unit_mode, saturating_state};
use pairpath::twobody::{pair_index, pseudoprojector};
use pairpath::{AdiabaticPath, FockSector, Occupation, OperatorMatrix, PathSchedule};

type Outcome = Result<(bool, String), pairpath::Error>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn trimer(delta_u: f64) -> Setup {
    trimer_setup(1.0, 0.37, -5.0, delta_u, Reference::LeadingOrder).expect("trimer setup")
}

fn direct(setup: &Setup) -> Result<AdiabaticPath, pairpath::Error> {
    setup.path(ScheduleKind::Direct, false)
}

fn c1_trimer_gap() -> Outcome {
    let s = trimer(1e-6);
    let grid = uniform_grid(DEFAULT_GRID);
    let d = gap_trace(&direct(&s)?, &grid, 2)?;
    let w = gap_trace(&s.stepwise_path(&trimer_stages(), false)?, &grid, 2)?;
    let ok = d.min_gap < 1e-3
        && (0.64..=0.74).contains(&d.s_star)
        && w.min_gap > 0.0
        && w.min_gap >= 10.0 * d.min_gap;
    Ok((ok, format!(
        "direct min gap {:.3e} at s*={:.4}; stepwise min gap {:.3e} at s={:.4} (ratio {:.1})",
        d.min_gap, d.s_star, w.min_gap, w.s_star, w.min_gap / d.min_gap
    )))
}

fn four_site(u: f64, delta: f64) -> Result<Setup, pairpath::Error> {
    four_site_setup(1.0, delta, u, 1e-6, Reference::FreeOrbitals)
}

fn c2_four_site_negative() -> Outcome {
    let s = four_site(-2.0, 0.1)?;
    let grid = uniform_grid(DEFAULT_GRID);
    let d = gap_trace(&direct(&s)?, &grid, 2)?;
    let w = gap_trace(&s.stepwise_path(&four_site_stages(), false)?, &grid, 2)?;
    let ok = (0.62..=0.72).contains(&d.s_star) && d.min_gap < 1e-3 && w.min_gap > 1e-6;
    Ok((ok, format!(
        "direct min gap {:.3e} at s*={:.4}; stepwise min gap {:.3e} at s={:.4}",
        d.min_gap, d.s_star, w.min_gap, w.s_star
    )))
}

fn c3_four_site_positive() -> Outcome {
    let grid = uniform_grid(DEFAULT_GRID);
    let s = four_site(2.0, 0.25)?;
    let d = gap_trace(&direct(&s)?, &grid, 2)?;
    let w = gap_trace(&s.stepwise_path(&four_site_stages(), false)?, &grid, 2)?;
    let neg = four_site(-2.0, 0.1)?;
    let w_neg = gap_trace(&neg.stepwise_path(&four_site_stages(), false)?, &grid, 2)?;
    let local = w.minimum_near(0.67).expect("trace has minima");
    let ok = (0.56..=0.66).contains(&d.s_star)
        && d.min_gap < 1e-3
        && w.min_gap > 1e-6
        && (local.0 - 0.67).abs() <= 0.07
        && w.min_gap < w_neg.min_gap;
    Ok((ok, format!(
        "direct min gap {:.3e} at s*={:.4}; stepwise min gap {:.3e} at s={:.4}, nearest local min to 0.67 at s={:.4} (gap {:.3e}); U=-2 stepwise min gap {:.3e}",
        d.min_gap, d.s_star, w.min_gap, w.s_star, local.0, local.1, w_neg.min_gap
    )))
}

fn reflection_of_ground(spec: &HamiltonianSpec, sym: &ReflectionSymmetry) -> Result<f64, pairpath::Error> {
    let sector = spec.sector()?;
    let e = eigensolve(&spec.sector_matrix(&sector)?, HowMany::Lowest(1))?;
    let v = e.vectors.column(0).into_owned();
    let r = sym.sector_matrix(&sector)?;
    Ok(v.dot(&r.apply(&v)))
}

fn c4_symmetry_inversion() -> Outcome {
    let sym = ReflectionSymmetry::trimer();
    let spec = build_trimer(1.0, 0.37, -5.0, -5.0);
    let exact = reflection_of_ground(&spec, &sym)?;
    let s = hartree_fock(&spec, &Ansatz::TrimerSymmetric)?;
    let a = hartree_fock(&spec, &Ansatz::TrimerAntisymmetric)?;
    let best = if s.energy <= a.energy { &s } else { &a };
    let hf = reflection_of_ground(&best.spec, &sym)?;
    let ok = (exact + 1.0).abs() <= 1e-8 && (hf - 1.0).abs() <= 1e-8;
    Ok((ok, format!(
        "exact <R> = {exact:+.10}; HF energies S {:.6}, A {:.6}; best HF <R> = {hf:+.10}",
        s.energy, a.energy
    )))
}

fn c5_bounds() -> Outcome {
    let cases: Vec<(usize, usize)> = (4..=10).flat_map(|l| (2..=5.min(l)).map(move |n| (l, n))).collect();
    let results: Vec<(usize, usize, f64, f64)> = cases
        .par_iter()
        .map(|&(l, n)| {
            let bound = norm_bound(l, n)?;
            let mut worst = f64::NEG_INFINITY;
            for i in 0..200u64 {
                let mut rng = ChaCha8Rng::seed_from_u64((l as u64) << 32 | (n as u64) << 16 | i);
                let mode = random_unit_mode(l, &mut rng);
                worst = worst.max(exact_norm(&mode, l, n)? - bound);
            }
            Ok((l, n, bound, worst))
        })
        .collect::<Result<_, pairpath::Error>>()?;
    let violations: Vec<String> = results
        .iter()
        .filter(|r| r.3 > 1e-9)
        .map(|(l, n, b, w)| format!("(L={l},N={n}: bound {b:.4}, excess {w:.4})"))
        .collect();
    let mut sat_worst = 0.0f64;
    let mut sat_count = 0;
    for &(l, n) in &cases {
        if let Ok((pf, st)) = saturating_state(l, n, None) {
            let sector = FockSector::new(l, Occupation::Total(n))?;
            let v = st.to_fermion_state(&sector)?;
            let phi = pseudoprojector(&pf.to_mode(1.0), &sector)?;
            let value = v.dot(&phi.apply(&v)) / v.norm_squared();
            sat_worst = sat_worst.max((value - norm_bound(l, n)?).abs());
            sat_count += 1;
        }
    }
    let ok = violations.is_empty() && sat_worst <= 1e-10;
    let detail = if violations.is_empty() {
        "no random norm exceeds its bound".to_string()
    } else {
        format!("{} of {} (L,N) cases exceed the bound: {}", violations.len(), cases.len(), violations.join(" "))
    };
    Ok((ok, format!("{detail}; {sat_count} saturating states, worst deviation {sat_worst:.2e}")))
}

fn hadamard_path(l: usize, n: usize, stepwise: bool) -> Result<(AdiabaticPath, f64), pairpath::Error> {
    let sector = FockSector::new(l, Occupation::Total(n))?;
    let terms: Vec<OperatorMatrix> = hadamard_maximal_modes(l)?
        .iter()
        .map(|m| pseudoprojector(m, &sector))
        .collect::<Result<_, _>>()?;
    let total = OperatorMatrix::linear_combination(&terms.iter().map(|t| (1.0, t)).collect::<Vec<_>>())?;
    let identity = OperatorMatrix::from_dense(nalgebra::DMatrix::identity(sector.dim(), sector.dim()));
    let expected = (n * (n - 1)) as f64 / 2.0;
    let err = total.frobenius_distance(&OperatorMatrix::linear_combination(&[(expected, &identity)])?);
    let m = terms.len();
    let kind = if stepwise { ScheduleKind::Stepwise((0..m).map(|k| vec![k]).collect()) } else { ScheduleKind::Direct };
    let path = AdiabaticPath::new(OperatorMatrix::zeros(sector.dim()), terms, PathSchedule::new(kind, m, false)?)?;
    Ok((path, err))
}

fn c6_hadamard() -> Outcome {
    let mut parts = Vec::new();
    let mut ratios = Vec::new();
    let mut worst = 0.0f64;
    for (l, n) in [(4, 2), (8, 4)] {
        let (d, err) = hadamard_path(l, n, false)?;
        let (w, _) = hadamard_path(l, n, true)?;
        worst = worst.max(err);
        let ratio = adiabatic_numerator(&w, 5)? / adiabatic_numerator(&d, 5)?;
        ratios.push(ratio);
        parts.push(format!("L={l}: sum error {err:.2e}, stepwise/direct I = {ratio:.3}"));
    }
    let ok = worst <= 1e-9 && ratios[1] > ratios[0];
    Ok((ok, parts.join("; ")))
}

fn c7_reconstruction() -> Outcome {
    let errors: Vec<f64> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let spec = random_spec(6, 3, 1000 + seed);
            let zero = HamiltonianSpec::zeros(6, Occupation::Total(3));
            Setup::new(spec, zero, None)?.reconstruction_error()
        })
        .collect::<Result<_, _>>()?;
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Ok((worst <= 1e-9, format!("worst Frobenius error over 50 tensors {worst:.2e}")))
}

/// Lowest energies in the symmetric and antisymmetric sectors.
fn sector_minima(spec: &HamiltonianSpec) -> Result<(f64, f64), pairpath::Error> {
    let sym = ReflectionSymmetry::trimer();
    let sector = spec.sector()?;
    let e = eigensolve(&spec.sector_matrix(&sector)?, HowMany::All)?;
    let (mut es, mut ea) = (f64::INFINITY, f64::INFINITY);
    for k in 0..e.values.len() {
        let v: DVector<f64> = e.vectors.column(k).into_owned();
        match symmetry_label(&v, &sym, &sector)? {
            SymmetryLabel::Symmetric => es = es.min(e.values[k]),
            SymmetryLabel::Antisymmetric => ea = ea.min(e.values[k]),
            _ => {}
        }
    }
    Ok((es, ea))
}

fn hf_minima(spec: &HamiltonianSpec) -> Result<(f64, f64), pairpath::Error> {
    Ok((hartree_fock(spec, &Ansatz::TrimerSymmetric)?.energy, hartree_fock(spec, &Ansatz::TrimerAntisymmetric)?.energy))
}

/// Root of `f` on `[lo, hi]` by bisection, assuming a sign change.
fn bisect(f: &dyn Fn(f64) -> Result<f64, pairpath::Error>, mut lo: f64, mut hi: f64) -> Result<Option<f64>, pairpath::Error> {
    let mut flo = f(lo)?;
    if flo * f(hi)? > 0.0 {
        return Ok(None);
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

fn c8_perturbation() -> Outcome {
    let (j, u, d) = (1.0, -0.05, 0.01);
    let (es, ea) = sector_minima(&build_trimer(j, j + d, u, u))?;
    let (fs, fa) = (-3.0 * j + u / 9.0 - d / 3.0, -3.0 * j + u / 3.0 - 5.0 * d / 3.0);
    let first = (es - fs).abs() <= 5e-3 && (ea - fa).abs() <= 5e-3;

    let u = -50.0;
    let exact = bisect(&|x| sector_minima(&build_trimer(1.0, x, u, u)).map(|(s, a)| s - a), 1e-3, 0.2)?;
    let hf = bisect(&|x| hf_minima(&build_trimer(1.0, x, u, u)).map(|(s, a)| s - a), 1e-3, 0.2)?;
    let within = |x: Option<f64>, target: f64| x.is_some_and(|x| (x - target).abs() <= 0.1 * target);
    let (t_exact, t_hf) = (3f64.sqrt() / 50.0, 2.0 / 50.0);
    let crossings = within(exact, t_exact) && within(hf, t_hf);

    let s = trimer(1e-6);
    let i = pair_index(6, 0, 1);
    let l11 = s.f.matrix[(i, i)];
    let series = -2.5 + 32.0 / -125.0;
    let diag = (l11 - series).abs() <= 1e-2;
    Ok((first && crossings && diag, format!(
        "E_S {es:.5} vs {fs:.5}, E_A {ea:.5} vs {fa:.5} [{}]; crossings exact {} vs {t_exact:.5}, HF {} vs {t_hf:.5} [{}]; lambda11 {l11:.4} vs {series:.4} [{}]",
        verdict(first),
        exact.map_or("none".into(), |x| format!("{x:.5}")),
        hf.map_or("none".into(), |x| format!("{x:.5}")),
        verdict(crossings),
        verdict(diag)
    )))
}

fn c9_dynamics() -> Outcome {
    let s = trimer(1e-6);
    let stepwise = s.stepwise_path(&trimer_stages(), false)?;
    let mut infid = Vec::new();
    for t in [10.0, 20.0, 40.0, 80.0] {
        let ev = propagate(&stepwise, t, 20_000, 2)?;
        infid.push((t, 1.0 - ev.final_fidelity().unwrap_or(0.0)));
    }
    let monotone = infid.windows(2).all(|w| w[1].1 <= 1.1 * w[0].1);
    let reached = 1.0 - infid[3].1 >= 0.99;
    let d = propagate(&direct(&s)?, 80.0, 20_000, 2)?.final_fidelity().unwrap_or(0.0);
    let ok = monotone && reached && d <= 0.5;
    let trace: Vec<String> = infid.iter().map(|(t, x)| format!("T={t}: {:.4}", 1.0 - x)).collect();
    Ok((ok, format!(
        "stepwise fidelity {} (non-increasing infidelity {}, >= 0.99 {}); direct T=80 fidelity {d:.4}",
        trace.join(", "),
        monotone,
        reached
    )))
}

fn c10_jansen() -> Outcome {
    let s = trimer(1e-6);
    let path = s.stepwise_path(&trimer_stages(), false)?;
    let est = jansen_time(&path, 0.1, 401)?;
    let steps = ((est.time * 0.5) as usize).clamp(200_000, 2_000_000);
    let f = propagate(&path, est.time, steps, 2)?.final_fidelity().unwrap_or(0.0);
    Ok((f >= 0.9, format!("estimate T = {:.4e} (boundary {:.3e}); fidelity {f:.5} over {steps} steps", est.time, est.boundary)))
}

fn verdict(ok: bool) -> &'static str {
    if ok { "PASS" } else { "FAIL" }
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "trimer gap closure and stepwise avoidance", limit: Some(Duration::from_secs(5)), run: c1_trimer_gap },
        Criterion { id: 2, name: "four-site U=-2 crossing", limit: Some(Duration::from_secs(10)), run: c2_four_site_negative },
        Criterion { id: 3, name: "four-site U=+2 closure", limit: Some(Duration::from_secs(10)), run: c3_four_site_positive },
        Criterion { id: 4, name: "symmetry-sector inversion", limit: None, run: c4_symmetry_inversion },
        Criterion { id: 5, name: "pseudoprojector norm bounds", limit: Some(Duration::from_secs(60)), run: c5_bounds },
        Criterion { id: 6, name: "Hadamard construction", limit: None, run: c6_hadamard },
        Criterion { id: 7, name: "decomposition reconstruction", limit: None, run: c7_reconstruction },
        Criterion { id: 8, name: "perturbation-theory checks", limit: None, run: c8_perturbation },
        Criterion { id: 9, name: "dynamics property", limit: Some(Duration::from_secs(30)), run: c9_dynamics },
        Criterion { id: 10, name: "evolution-time estimate sufficiency", limit: None, run: c10_jansen },
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.contains(&c.id)) {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = c.limit.is_none_or(|l| elapsed <= l);
        let (ok, detail) = match outcome {
            Ok((ok, d)) => (ok && in_time, d),
            Err(e) => (false, format!("error: {e}")),
        };
        let limit = c.limit.map_or(String::new(), |l| format!(" / limit {}s", l.as_secs()));
        println!("criterion {:>2} {}: {} -- {} [{:.2}s{limit}]", c.id, verdict(ok), c.name, detail, elapsed.as_secs_f64());
        if !ok {
            failed += 1;
        }
    }
    println!("acceptance: {failed} criteria failed");
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
