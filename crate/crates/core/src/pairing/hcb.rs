use std::collections::BTreeSet;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fock::{apply_excitation, FockSector, Ladder};

use super::PairedForm;

/// Superposition of HCB configurations sharing one set of unpaired modes.
/// Modes refer to the rotated basis of a [`PairedForm`]; site `m` holds
/// modes `2m` and `2m + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HcbState {
    pub num_modes: usize,
    pub unpaired: BTreeSet<usize>,
    /// `(filled pair sites, amplitude)`.
    pub configs: Vec<(BTreeSet<usize>, f64)>,
}

impl HcbState {
    pub fn norm(&self) -> f64 {
        self.configs.iter().map(|c| c.1 * c.1).sum::<f64>().sqrt()
    }

    /// `<Ψ|Φ|Ψ>` from the HCB matrix elements.
    pub fn expectation(&self, pf: &PairedForm) -> Result<f64> {
        let mut total = 0.0;
        for (p, a) in &self.configs {
            for (p2, b) in &self.configs {
                total += a * b * phi_matrix_elements(pf, p, &self.unpaired, p2, &self.unpaired)?;
            }
        }
        Ok(total)
    }

    /// Fermionic state vector in `sector`, written in the rotated modes.
    pub fn to_fermion_state(&self, sector: &FockSector) -> Result<DVector<f64>> {
        let mut v = DVector::zeros(sector.dim());
        for (pairs, amp) in &self.configs {
            let mut ops = Vec::new();
            for &m in pairs {
                ops.push((2 * m, Ladder::Create));
                ops.push((2 * m + 1, Ladder::Create));
            }
            ops.extend(self.unpaired.iter().map(|&u| (u, Ladder::Create)));
            let (w, sign) = apply_excitation(0, &ops)
                .ok_or_else(|| Error::domain("hcb_state", "configuration occupies a mode twice"))?;
            let i = sector
                .index_of(w)
                .ok_or_else(|| Error::domain("hcb_state", "configuration lies outside the sector"))?;
            v[i] += sign * amp;
        }
        Ok(v)
    }
}

fn check_disjoint(pf: &PairedForm, p: &BTreeSet<usize>, u: &BTreeSet<usize>) -> Result<()> {
    const OP: &str = "phi_matrix_elements";
    if let Some(&m) = p.iter().find(|&&m| m >= pf.num_sites()) {
        return Err(Error::domain(OP, format!("pair site {m} out of range")));
    }
    if let Some(&x) = u.iter().find(|&&x| x >= pf.num_modes()) {
        return Err(Error::domain(OP, format!("unpaired mode {x} out of range")));
    }
    if let Some(&x) = u.iter().find(|&&x| p.contains(&(x / 2))) {
        return Err(Error::domain(OP, format!("unpaired mode {x} sits on a filled pair site")));
    }
    Ok(())
}

/// `<P, U| Φ |P', U'>`: zero unless `U = U'`; `Σ_{m∈P} ξ_m²` on the
/// diagonal; `ξ_m ξ_n` when `P \ {m} = P' \ {n}`.
pub fn phi_matrix_elements(
    pf: &PairedForm,
    p: &BTreeSet<usize>,
    u: &BTreeSet<usize>,
    p2: &BTreeSet<usize>,
    u2: &BTreeSet<usize>,
) -> Result<f64> {
    check_disjoint(pf, p, u)?;
    check_disjoint(pf, p2, u2)?;
    if u != u2 || p.len() != p2.len() {
        return Ok(0.0);
    }
    if p == p2 {
        return Ok(p.iter().map(|&m| pf.xi[m] * pf.xi[m]).sum());
    }
    let only: Vec<usize> = p.difference(p2).copied().collect();
    let only2: Vec<usize> = p2.difference(p).copied().collect();
    if only.len() == 1 && only2.len() == 1 {
        Ok(pf.xi[only[0]] * pf.xi[only2[0]])
    } else {
        Ok(0.0)
    }
}
