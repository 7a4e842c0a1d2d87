//! Ready-made setups: a target hamiltonian, a one-body reference, and the
//! decomposed residual as sector matrices, plus stage selection for paths.

use std::fmt;
use std::str::FromStr;

use crate::adiabatic::{AdiabaticPath, PathSchedule, ScheduleKind};
use crate::error::{Error, Result};
use crate::fock::{FockSector, OperatorMatrix};
use crate::hamiltonians::{
    absorb_one_body, build_four_site_split, build_trimer, hartree_fock, hf_at_density, mean_field_energy,
    Ansatz, HamiltonianSpec, ProductFamily, ReflectionSymmetry, Tensor4,
};
use crate::twobody::{build_f, eigendecompose, residual_terms, ResidualTerm, TwoBodyMode, TwoParticleMatrix, DEFAULT_DEGENERACY_TOL};

/// Choice of the initial one-body hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Trimer: better of the two families at `x = y = 4j/U`.
    LeadingOrder,
    /// Trimer: variationally optimal family; other lattices: free orbitals.
    HartreeFock,
    /// Mean field from the lowest orbitals of `h`.
    FreeOrbitals,
    /// `h` alone, without any mean field.
    OneBody,
}

impl FromStr for Reference {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "leading_order" => Ok(Reference::LeadingOrder),
            "hartree_fock" => Ok(Reference::HartreeFock),
            "free_orbitals" => Ok(Reference::FreeOrbitals),
            "one_body" => Ok(Reference::OneBody),
            _ => Err(Error::domain(
                "reference",
                format!("unknown reference `{s}` (expected leading_order, hartree_fock, free_orbitals or one_body)"),
            )),
        }
    }
}

fn is_trimer(spec: &HamiltonianSpec) -> bool {
    spec.sites == Some(3) && spec.num_modes == 6
}

/// Trimer hopping `j` read back from the model coefficients.
fn trimer_hopping(spec: &HamiltonianSpec) -> f64 {
    spec.h[(0, 2)]
}

/// One-body reference hamiltonian for `spec`.
pub fn reference_spec(spec: &HamiltonianSpec, reference: Reference) -> Result<HamiltonianSpec> {
    match reference {
        Reference::OneBody => {
            let mut out = spec.clone();
            out.g = Tensor4::zeros(spec.num_modes);
            Ok(out)
        }
        Reference::FreeOrbitals => Ok(hartree_fock(spec, &Ansatz::FreeOrbitals)?.spec),
        Reference::HartreeFock if is_trimer(spec) => {
            let s = hartree_fock(spec, &Ansatz::TrimerSymmetric)?;
            let a = hartree_fock(spec, &Ansatz::TrimerAntisymmetric)?;
            Ok(if a.energy < s.energy { a.spec } else { s.spec })
        }
        Reference::HartreeFock => Ok(hartree_fock(spec, &Ansatz::FreeOrbitals)?.spec),
        Reference::LeadingOrder => {
            if !is_trimer(spec) {
                return Err(Error::domain("reference", "leading-order reference is defined for the trimer only"));
            }
            let u = spec.g.get(0, 0, 1, 1);
            if u == 0.0 {
                return Err(Error::domain("reference", "leading-order reference needs U != 0"));
            }
            let x = 4.0 * trimer_hopping(spec) / u;
            let candidates = [(ProductFamily::trimer_symmetric(), vec![x, x]), (ProductFamily::trimer_antisymmetric(), vec![x])];
            let (family, params) = candidates
                .into_iter()
                .min_by(|a, b| {
                    mean_field_energy(spec, &a.0.density(&a.1)).total_cmp(&mean_field_energy(spec, &b.0.density(&b.1)))
                })
                .expect("two candidates");
            let rho = family.density(&params);
            Ok(hf_at_density(spec, params, rho).spec)
        }
    }
}

/// A target, its reference and the decomposed residual within one sector.
#[derive(Debug, Clone)]
pub struct Setup {
    pub spec: HamiltonianSpec,
    pub reference: HamiltonianSpec,
    pub sector: FockSector,
    pub initial: OperatorMatrix,
    pub target: OperatorMatrix,
    pub f: TwoParticleMatrix,
    pub modes: Vec<TwoBodyMode>,
    /// `λ_k Φ_k` for the non-negligible modes; `terms[i].mode` indexes `modes`.
    pub terms: Vec<ResidualTerm>,
    pub reflection: Option<OperatorMatrix>,
}

impl Setup {
    pub fn new(spec: HamiltonianSpec, reference: HamiltonianSpec, reflection: Option<&ReflectionSymmetry>) -> Result<Self> {
        let sector = spec.sector()?;
        let residual = spec.difference(&reference)?;
        let f = build_f(&absorb_one_body(&residual)?)?;
        let modes = eigendecompose(&f, DEFAULT_DEGENERACY_TOL);
        let terms = residual_terms(&modes, &sector)?;
        let initial = reference.sector_matrix(&sector)?;
        let target = spec.sector_matrix(&sector)?;
        let reflection = reflection.map(|r| r.sector_matrix(&sector)).transpose()?;
        Ok(Setup { spec, reference, sector, initial, target, f, modes, terms, reflection })
    }

    /// `‖H_i + Σ_k λ_k Φ_k − H_f‖_F`.
    pub fn reconstruction_error(&self) -> Result<f64> {
        let mut parts: Vec<(f64, &OperatorMatrix)> = vec![(1.0, &self.initial), (-1.0, &self.target)];
        parts.extend(self.terms.iter().map(|t| (1.0, &t.matrix)));
        Ok(OperatorMatrix::linear_combination(&parts)?.frobenius_norm())
    }

    /// Term indices grouped into stages; each selector list forms one stage.
    pub fn stages(&self, stages: &[Vec<StageSelector>]) -> Result<Vec<Vec<usize>>> {
        const OP: &str = "stages";
        let n = self.terms.len();
        let mut taken = vec![false; n];
        let mut out: Vec<Option<Vec<usize>>> = Vec::with_capacity(stages.len());
        let mut open = None;
        for (i, stage) in stages.iter().enumerate() {
            if stage.iter().any(|s| matches!(s, StageSelector::Rest | StageSelector::Each)) {
                if stage.len() != 1 || open.is_some() {
                    return Err(Error::domain(OP, "`rest`/`each` must stand alone and appear at most once"));
                }
                open = Some((i, stage[0].clone()));
                out.push(None);
                continue;
            }
            let mut picked = Vec::new();
            for sel in stage {
                let hits: Vec<usize> = match *sel {
                    StageSelector::Term(k) if k < n => vec![k],
                    StageSelector::Term(k) => return Err(Error::domain(OP, format!("term {k} out of range for {n} terms"))),
                    StageSelector::Pair(p, r) => (0..n)
                        .filter(|&k| self.modes[self.terms[k].mode].dominant_pair() == (p.min(r), p.max(r)))
                        .collect(),
                    StageSelector::Rest | StageSelector::Each => unreachable!(),
                };
                if hits.is_empty() {
                    return Err(Error::domain(OP, format!("no residual term matches `{sel}`")));
                }
                for k in hits {
                    if std::mem::replace(&mut taken[k], true) {
                        return Err(Error::domain(OP, format!("term {k} selected twice")));
                    }
                    picked.push(k);
                }
            }
            out.push(Some(picked));
        }
        let left: Vec<usize> = (0..n).filter(|&k| !taken[k]).collect();
        let mut result = Vec::new();
        for (i, stage) in out.into_iter().enumerate() {
            match stage {
                Some(s) => result.push(s),
                None => match open {
                    Some((j, StageSelector::Each)) if j == i => result.extend(left.iter().map(|&k| vec![k])),
                    _ if left.is_empty() => return Err(Error::domain(OP, "`rest` matches no terms")),
                    _ => result.push(left.clone()),
                },
            }
        }
        if open.is_none() && !left.is_empty() {
            return Err(Error::domain(OP, format!("{} terms are not assigned to a stage", left.len())));
        }
        Ok(result)
    }

    /// Path from the reference to the target over the residual terms.
    pub fn path(&self, kind: ScheduleKind, endpoint_flat: bool) -> Result<AdiabaticPath> {
        let schedule = PathSchedule::new(kind, self.terms.len(), endpoint_flat)?;
        let path = AdiabaticPath::new(self.initial.clone(), self.terms.iter().map(|t| t.matrix.clone()).collect(), schedule)?;
        match &self.reflection {
            Some(r) => path.with_reflection(r.clone()),
            None => Ok(path),
        }
    }

    /// Stepwise path over stage selectors.
    pub fn stepwise_path(&self, stages: &[Vec<StageSelector>], endpoint_flat: bool) -> Result<AdiabaticPath> {
        self.path(ScheduleKind::Stepwise(self.stages(stages)?), endpoint_flat)
    }
}

/// Picks residual terms for a stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StageSelector {
    /// Terms whose mode has its largest weight on pair `(P, R)`; written `P-R`.
    Pair(usize, usize),
    /// A term by position in the residual term list; written as a number.
    Term(usize),
    /// All terms not selected elsewhere, as one stage.
    Rest,
    /// All terms not selected elsewhere, one stage each.
    Each,
}

impl fmt::Display for StageSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageSelector::Pair(p, r) => write!(f, "{p}-{r}"),
            StageSelector::Term(k) => write!(f, "{k}"),
            StageSelector::Rest => f.write_str("rest"),
            StageSelector::Each => f.write_str("each"),
        }
    }
}

impl FromStr for StageSelector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::domain("stages", format!("bad stage selector `{s}` (expected P-R, an index, rest or each)"));
        match s {
            "rest" => Ok(StageSelector::Rest),
            "each" => Ok(StageSelector::Each),
            _ => match s.split_once('-') {
                Some((p, r)) => {
                    let p: usize = p.trim().parse().map_err(|_| bad())?;
                    let r: usize = r.trim().parse().map_err(|_| bad())?;
                    if p == r {
                        return Err(bad());
                    }
                    Ok(StageSelector::Pair(p, r))
                }
                None => s.parse().map(StageSelector::Term).map_err(|_| bad()),
            },
        }
    }
}

/// Parses stages written `a,b | c | d`.
pub fn parse_stages(text: &str) -> Result<Vec<Vec<StageSelector>>> {
    text.split('|').map(|stage| stage.split(',').map(str::parse).collect()).collect()
}

/// Site-1 pair, everything else, then the site-3 pair.
pub fn trimer_stages() -> Vec<Vec<StageSelector>> {
    vec![vec![StageSelector::Pair(0, 1)], vec![StageSelector::Rest], vec![StageSelector::Pair(4, 5)]]
}

/// One on-site pair first, the remaining terms second.
pub fn four_site_stages() -> Vec<Vec<StageSelector>> {
    vec![vec![StageSelector::Pair(0, 1)], vec![StageSelector::Rest]]
}

/// Trimer with `U1 = u`, `U3 = u + delta_u` and its reflection.
pub fn trimer_setup(j: f64, j13: f64, u: f64, delta_u: f64, reference: Reference) -> Result<Setup> {
    let spec = build_trimer(j, j13, u, u + delta_u);
    let r = reference_spec(&spec, reference)?;
    Setup::new(spec, r, Some(&ReflectionSymmetry::trimer()))
}

/// Four-site ring with `U_p = u + p·split` and its reflection.
pub fn four_site_setup(j: f64, delta: f64, u: f64, split: f64, reference: Reference) -> Result<Setup> {
    let spec = build_four_site_split(j, delta, [0.0, 1.0, 2.0, 3.0].map(|p| u + p * split));
    let r = reference_spec(&spec, reference)?;
    Setup::new(spec, r, Some(&ReflectionSymmetry::four_site()))
}
