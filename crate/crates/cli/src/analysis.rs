//! Runs one analysis on a configured model and writes its CSV table.

use std::fs;
use std::path::{Path, PathBuf};

use pairpath::adiabatic::{adiabatic_numerator, gap_trace, jansen_time, propagate, uniform_grid, ScheduleKind};
use pairpath::experiments::{four_site_stages, reference_spec, trimer_stages, Reference, Setup, StageSelector};
use pairpath::hamiltonians::{ModelKind, ModelSpec, ReflectionSymmetry};
use pairpath::pairing::{max_random_norm, norm_bound, saturating_state};
use pairpath::AdiabaticPath;

use crate::config::{Analysis, ExperimentConfig, PathConfig, PathKind};
use crate::error::CliError;

/// Column headers of every table the CLI writes.
pub mod schema {
    pub const GAP: [&str; 7] = ["s", "E0", "E1", "E2", "gap", "sym0", "sym1"];
    pub const FIDELITY: [&str; 3] = ["s", "fidelity", "norm"];
    pub const DECOMPOSE: [&str; 5] = ["k", "lambda", "P", "R", "value"];
    pub const BOUNDS: [&str; 5] = ["L", "N", "bound", "max_random_norm", "saturating_value"];
    pub const NUMERATOR: [&str; 4] = ["path", "endpoint_flat", "terms", "numerator"];
    pub const JANSEN: [&str; 4] = ["delta", "integral", "boundary", "time"];
}

/// What a finished analysis wrote, plus a one-line summary for stdout.
#[derive(Debug)]
pub struct Report {
    pub file: PathBuf,
    pub summary: String,
}

type Rows = Vec<Vec<String>>;

fn write_csv(file: &Path, header: &[&str], rows: &Rows) -> Result<(), CliError> {
    if let Some(dir) = file.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    let csv_err = |source| CliError::Csv { path: file.to_path_buf(), source };
    let mut w = csv::Writer::from_path(file).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush().map_err(|source| CliError::Io { path: file.to_path_buf(), source })
}

fn num(x: f64) -> String {
    x.to_string()
}

fn default_reference(model: &ModelSpec) -> Reference {
    match model.kind {
        ModelKind::Trimer { .. } => Reference::LeadingOrder,
        ModelKind::FourSite { .. } | ModelKind::HubbardChain { .. } => Reference::FreeOrbitals,
        ModelKind::Tensor { .. } => Reference::OneBody,
    }
}

fn reflection(model: &ModelSpec) -> Result<Option<ReflectionSymmetry>, CliError> {
    Ok(match &model.kind {
        ModelKind::Trimer { .. } => Some(ReflectionSymmetry::trimer()),
        ModelKind::FourSite { .. } => Some(ReflectionSymmetry::four_site()),
        ModelKind::HubbardChain { sites, .. } => Some(ReflectionSymmetry::from_sites((0..*sites).rev().collect())?),
        ModelKind::Tensor { .. } => None,
    })
}

/// Target, reference and decomposition for the configured model.
pub fn build_setup(model: &ModelSpec, path: &PathConfig) -> Result<Setup, CliError> {
    let spec = model.build()?;
    let reference = reference_spec(&spec, path.reference.unwrap_or_else(|| default_reference(model)))?;
    Ok(Setup::new(spec, reference, reflection(model)?.as_ref())?)
}

fn stages_for(model: &ModelSpec, path: &PathConfig) -> Result<Vec<Vec<StageSelector>>, CliError> {
    if let Some(s) = &path.stages {
        return Ok(s.clone());
    }
    match model.kind {
        ModelKind::Trimer { .. } => Ok(trimer_stages()),
        ModelKind::FourSite { .. } => Ok(four_site_stages()),
        _ => Err(CliError::Missing("[path] stepwise path for this model needs `stages`".into())),
    }
}

pub fn build_path(model: &ModelSpec, path: &PathConfig, setup: &Setup) -> Result<AdiabaticPath, CliError> {
    Ok(match path.kind {
        PathKind::Direct => setup.path(ScheduleKind::Direct, path.endpoint_flat)?,
        PathKind::Stepwise => setup.stepwise_path(&stages_for(model, path)?, path.endpoint_flat)?,
    })
}

fn gap_rows(path: &AdiabaticPath, grid: usize) -> Result<(Rows, String), CliError> {
    let t = gap_trace(path, &uniform_grid(grid), 3)?;
    let label = |l: &Option<pairpath::hamiltonians::SymmetryLabel>| l.map_or(String::new(), |l| l.as_str().to_string());
    let rows = (0..t.s.len())
        .map(|i| {
            let lv = &t.levels[i];
            vec![
                num(t.s[i]),
                num(lv[0]),
                num(lv[1]),
                lv.get(2).map_or(String::new(), |&e| num(e)),
                num(t.gap[i]),
                label(&t.labels[i][0]),
                label(&t.labels[i][1]),
            ]
        })
        .collect();
    Ok((rows, format!("min gap {:.6e} at s = {:.6}, local minima: {}", t.min_gap, t.s_star, t.minima.len())))
}

fn bounds_rows(l_min: usize, l_max: usize, n_min: usize, n_max: usize, samples: usize, seed: u64) -> Result<(Rows, String), CliError> {
    if l_min > l_max || n_min > n_max || n_min < 2 {
        return Err(CliError::Missing(format!(
            "[analysis] bounds needs 2 <= n_min <= n_max and l_min <= l_max, got L {l_min}..{l_max}, N {n_min}..{n_max}"
        )));
    }
    let mut rows = Vec::new();
    let mut violations = 0;
    for l in l_min..=l_max {
        for n in n_min..=n_max.min(l) {
            let bound = norm_bound(l, n)?;
            let worst = max_random_norm(l, n, samples, seed)?;
            if worst > bound + 1e-9 {
                violations += 1;
            }
            let sat = match saturating_state(l, n, None) {
                Ok((pf, st)) => num(st.expectation(&pf)?),
                Err(_) => String::new(),
            };
            rows.push(vec![l.to_string(), n.to_string(), num(bound), num(worst), sat]);
        }
    }
    let summary = format!("{} (L, N) cases, {violations} with a random norm above the bound", rows.len());
    Ok((rows, summary))
}

/// Runs `analysis` and writes `<prefix>_<analysis>.csv`.
pub fn run(cfg: &ExperimentConfig, analysis: &Analysis, prefix: &str) -> Result<Report, CliError> {
    let file = PathBuf::from(format!("{prefix}_{}.csv", analysis.name()));
    if let Analysis::Bounds { l_min, l_max, n_min, n_max, samples } = *analysis {
        let (rows, summary) = bounds_rows(l_min, l_max, n_min, n_max, samples, cfg.seed)?;
        write_csv(&file, &schema::BOUNDS, &rows)?;
        return Ok(Report { file, summary });
    }
    let model = cfg.model.as_ref().ok_or_else(|| CliError::Missing("missing [model] section".into()))?;
    let setup = build_setup(model, &cfg.path)?;
    let (header, rows, summary): (&[&str], Rows, String) = match *analysis {
        Analysis::Decompose => {
            let mut rows = Vec::new();
            for (k, m) in setup.modes.iter().enumerate() {
                for (i, &(p, r)) in setup.f.pairs.iter().enumerate() {
                    if m.phi[i].abs() > 1e-12 {
                        rows.push(vec![k.to_string(), num(m.lambda), p.to_string(), r.to_string(), num(m.phi[i])]);
                    }
                }
            }
            let err = setup.reconstruction_error()?;
            let summary = format!("{} modes, {} residual terms, reconstruction error {err:.3e}", setup.modes.len(), setup.terms.len());
            (&schema::DECOMPOSE, rows, summary)
        }
        Analysis::Gap => {
            let (rows, summary) = gap_rows(&build_path(model, &cfg.path, &setup)?, cfg.path.grid)?;
            (&schema::GAP, rows, summary)
        }
        Analysis::Evolve { time, steps, samples } => {
            let ev = propagate(&build_path(model, &cfg.path, &setup)?, time, steps, samples)?;
            let rows = (0..ev.s.len())
                .map(|i| vec![num(ev.s[i]), ev.fidelity[i].map_or(String::new(), num), num(ev.norm[i])])
                .collect();
            let fid = ev.final_fidelity().map_or("undefined (degenerate)".to_string(), |f| format!("{f:.6}"));
            (&schema::FIDELITY, rows, format!("final fidelity {fid} at T = {time}"))
        }
        Analysis::Numerator { nodes } => {
            let i = adiabatic_numerator(&build_path(model, &cfg.path, &setup)?, nodes)?;
            let kind = match cfg.path.kind {
                PathKind::Direct => "direct",
                PathKind::Stepwise => "stepwise",
            };
            let rows = vec![vec![kind.to_string(), cfg.path.endpoint_flat.to_string(), setup.terms.len().to_string(), num(i)]];
            (&schema::NUMERATOR, rows, format!("I = {i:.6e}"))
        }
        Analysis::Jansen { delta, nodes } => {
            let e = jansen_time(&build_path(model, &cfg.path, &setup)?, delta, nodes)?;
            let rows = vec![vec![num(e.delta), num(e.integral), num(e.boundary), num(e.time)]];
            (&schema::JANSEN, rows, format!("T = {:.6e} for delta = {delta}", e.time))
        }
        Analysis::Bounds { .. } => unreachable!("handled above"),
    };
    write_csv(&file, header, &rows)?;
    Ok(Report { file, summary })
}
