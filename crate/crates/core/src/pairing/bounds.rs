use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fock::{symmetric_eigen, FockSector, HowMany, Occupation};
use crate::twobody::{num_pairs, pair_annihilator, TwoBodyMode};

use super::{phi_matrix_elements, youla, HcbState, PairedForm};

/// Universal bound on `‖Φ‖` in the `N`-particle sector of `L` modes.
pub fn norm_bound(l: usize, n: usize) -> Result<f64> {
    const OP: &str = "norm_bound";
    if n < 2 || n > l {
        return Err(Error::domain(OP, format!("needs 2 <= N <= L, got L={l}, N={n}")));
    }
    let ell = (l / 2) as f64;
    let k = (n / 2) as f64;
    if n.is_multiple_of(2) {
        Ok(k / ell * (ell - k + 1.0))
    } else if l / 2 <= 1 {
        Err(Error::domain(OP, format!("odd N needs at least two pair sites, got L={l}")))
    } else {
        Ok(k / (ell - 1.0) * (ell - k))
    }
}

fn check_sizes(op: &'static str, mode: &TwoBodyMode, l: usize, n: usize) -> Result<()> {
    if mode.num_modes != l {
        return Err(Error::domain(op, format!("mode has {} modes, expected {l}", mode.num_modes)));
    }
    if n < 2 || n > l {
        return Err(Error::domain(op, format!("needs 2 <= N <= L, got L={l}, N={n}")));
    }
    Ok(())
}

/// `‖Φ‖ = ‖b‖²` in the full `N`-particle sector, from the smaller Gram matrix of `b`.
pub fn exact_norm(mode: &TwoBodyMode, l: usize, n: usize) -> Result<f64> {
    check_sizes("exact_norm", mode, l, n)?;
    let sector = FockSector::new(l, Occupation::Total(n))?;
    let (_, b) = pair_annihilator(mode, &sector)?;
    let gram = if b.nrows() <= b.ncols() { &b * b.transpose() } else { b.transpose() * &b };
    Ok(symmetric_eigen(gram, HowMany::All).values.last().copied().unwrap_or(0.0))
}

fn subsets(items: &[usize], k: usize) -> Vec<BTreeSet<usize>> {
    let mut out = Vec::new();
    let mut pick = Vec::with_capacity(k);
    fn rec(items: &[usize], k: usize, start: usize, pick: &mut Vec<usize>, out: &mut Vec<BTreeSet<usize>>) {
        if pick.len() == k {
            out.push(pick.iter().copied().collect());
            return;
        }
        for i in start..items.len() {
            pick.push(items[i]);
            rec(items, k, i + 1, pick, out);
            pick.pop();
        }
    }
    rec(items, k, 0, &mut pick, &mut out);
    out
}

/// Largest eigenvalue of `Φ` on configurations with `unpaired` fixed.
fn block_norm(pf: &PairedForm, unpaired: &BTreeSet<usize>, pairs: usize) -> Result<Option<f64>> {
    let free: Vec<usize> = (0..pf.num_sites()).filter(|m| !unpaired.iter().any(|u| u / 2 == *m)).collect();
    if pairs > free.len() {
        return Ok(None);
    }
    let configs = subsets(&free, pairs);
    let d = configs.len();
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = phi_matrix_elements(pf, &configs[i], unpaired, &configs[j], unpaired)?;
        }
    }
    Ok(symmetric_eigen(m, HowMany::All).values.last().copied())
}

/// `‖Φ‖` from the maximally paired configurations of the Youla form.
///
/// Even `N` uses no unpaired fermions; odd `N` maximises over the single
/// unpaired mode, including the extra zero mode when `L` is odd.
pub fn exact_norm_paired(mode: &TwoBodyMode, l: usize, n: usize) -> Result<f64> {
    check_sizes("exact_norm_paired", mode, l, n)?;
    let pf = youla(mode)?;
    let k = n / 2;
    if n.is_multiple_of(2) {
        return Ok(block_norm(&pf, &BTreeSet::new(), k)?.unwrap_or(0.0));
    }
    let mut best: f64 = 0.0;
    // Modes 2m and 2m+1 give identical blocks; one per site plus the odd leftover.
    let mut candidates: Vec<usize> = (0..pf.num_sites()).map(|m| 2 * m).collect();
    if l % 2 == 1 {
        candidates.push(l - 1);
    }
    for u in candidates {
        if let Some(v) = block_norm(&pf, &BTreeSet::from([u]), k)? {
            best = best.max(v);
        }
    }
    Ok(best)
}

/// A state meeting [`norm_bound`] together with its canonical pair form.
///
/// For odd `N` the pair site `unpaired_site` (default `⌊L/2⌋ − 1`) carries
/// `ξ = 0` and hosts the unpaired fermion in its second mode.
pub fn saturating_state(l: usize, n: usize, unpaired_site: Option<usize>) -> Result<(PairedForm, HcbState)> {
    const OP: &str = "saturating_state";
    if n < 2 || n > l {
        return Err(Error::domain(OP, format!("needs 2 <= N <= L, got L={l}, N={n}")));
    }
    let ell = l / 2;
    let k = n / 2;
    if n.is_multiple_of(2) {
        let pf = PairedForm::canonical(l, vec![1.0 / (ell as f64).sqrt(); ell]);
        let configs = subsets(&(0..ell).collect::<Vec<_>>(), k);
        let a = 1.0 / (configs.len() as f64).sqrt();
        let state = HcbState { num_modes: l, unpaired: BTreeSet::new(), configs: configs.into_iter().map(|c| (c, a)).collect() };
        return Ok((pf, state));
    }
    if ell < 2 || ell - 1 < k {
        return Err(Error::domain(OP, format!("odd N={n} needs ⌊L/2⌋ - 1 >= ⌊N/2⌋, got L={l}")));
    }
    let s = unpaired_site.unwrap_or(ell - 1);
    if s >= ell {
        return Err(Error::domain(OP, format!("unpaired site {s} out of range for {ell} pair sites")));
    }
    let mut xi = vec![1.0 / ((ell - 1) as f64).sqrt(); ell];
    xi[s] = 0.0;
    let pf = PairedForm::canonical(l, xi);
    let sites: Vec<usize> = (0..ell).filter(|&m| m != s).collect();
    let configs = subsets(&sites, k);
    let a = 1.0 / (configs.len() as f64).sqrt();
    let state = HcbState { num_modes: l, unpaired: BTreeSet::from([2 * s + 1]), configs: configs.into_iter().map(|c| (c, a)).collect() };
    Ok((pf, state))
}

/// Gaussian random two-body mode of unit norm.
pub fn random_unit_mode(l: usize, rng: &mut impl Rng) -> TwoBodyMode {
    let mut phi = DVector::from_fn(num_pairs(l), |_, _| rng.sample::<f64, _>(StandardNormal));
    let norm = phi.norm();
    phi /= norm;
    TwoBodyMode::new(1.0, phi, l)
}

/// Largest [`exact_norm`] over `samples` random unit modes. Sample `i` draws
/// from a ChaCha8 stream seeded by `(seed, L, N, i)`, so results do not
/// depend on evaluation order.
pub fn max_random_norm(l: usize, n: usize, samples: usize, seed: u64) -> Result<f64> {
    norm_bound(l, n)?;
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let stream = seed ^ ((l as u64) << 48 | (n as u64) << 40 | i);
            let mut rng = ChaCha8Rng::seed_from_u64(stream);
            exact_norm(&random_unit_mode(l, &mut rng), l, n)
        })
        .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.max(b)))
}
