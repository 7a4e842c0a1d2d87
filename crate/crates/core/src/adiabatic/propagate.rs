use nalgebra::{Complex, DVector};

use crate::error::{Error, Result};
use crate::fock::{eigensolve, HowMany};

use super::AdiabaticPath;

/// Ground-state splitting below which the instantaneous ground state is
/// treated as undefined.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Result of integrating `i dψ/ds = T H(s) ψ`.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub s: Vec<f64>,
    /// `|<ψ_0(s)|ψ(s)>|`; `None` where the instantaneous ground state is degenerate.
    pub fidelity: Vec<Option<f64>>,
    pub norm: Vec<f64>,
    pub state: DVector<Complex<f64>>,
}

impl Evolution {
    pub fn final_fidelity(&self) -> Option<f64> {
        *self.fidelity.last().expect("trace has samples")
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Instantaneous ground state, with its sign chosen to overlap positively
/// with `previous`.
fn ground_state(path: &AdiabaticPath, s: f64, previous: Option<&DVector<f64>>) -> Result<Option<DVector<f64>>> {
    let e = eigensolve(&path.hamiltonian(s)?, HowMany::Lowest(2))?;
    if e.values.len() > 1 && e.values[1] - e.values[0] < DEGENERACY_TOL {
        return Ok(None);
    }
    let mut v = e.vectors.column(0).into_owned();
    if previous.is_some_and(|p| p.dot(&v) < 0.0) {
        v = -v;
    }
    Ok(Some(v))
}

fn overlap(a: &DVector<f64>, psi: &DVector<Complex<f64>>) -> f64 {
    a.iter().zip(psi.iter()).map(|(x, z)| z * *x).sum::<Complex<f64>>().norm()
}

/// Midpoint-exponential propagation over `steps` equal slices of `s`,
/// starting in the ground state of `H(0)`. `samples` evenly spaced records
/// (at least the two endpoints) are kept.
pub fn propagate(path: &AdiabaticPath, total_time: f64, steps: usize, samples: usize) -> Result<Evolution> {
    const OP: &str = "propagate";
    if steps < 100 {
        return Err(Error::domain(OP, format!("needs at least 100 steps, got {steps}")));
    }
    if !(total_time.is_finite() && total_time >= 0.0) {
        return Err(Error::domain(OP, format!("total time {total_time} is not a finite non-negative number")));
    }
    let start = ground_state(path, 0.0, None)?
        .ok_or_else(|| Error::domain(OP, "initial ground state is degenerate"))?;
    let mut psi: DVector<Complex<f64>> = start.map(|x| Complex::new(x, 0.0));
    let every = (steps / samples.max(2).saturating_sub(1)).max(1);
    let mut out = Evolution { s: vec![0.0], fidelity: vec![Some(1.0)], norm: vec![1.0], state: psi.clone() };
    let mut reference = Some(start);
    let ds = 1.0 / steps as f64;
    for i in 0..steps {
        let mid = (i as f64 + 0.5) * ds;
        let e = eigensolve(&path.hamiltonian(mid)?, HowMany::All)?;
        let v = e.vectors.map(|x| Complex::new(x, 0.0));
        let mut c = v.adjoint() * &psi;
        for (ck, &ek) in c.iter_mut().zip(&e.values) {
            *ck *= Complex::from_polar(1.0, -total_time * ek * ds);
        }
        psi = &v * c;
        let s = (i + 1) as f64 * ds;
        if (i + 1) % every == 0 || i + 1 == steps {
            let g = ground_state(path, s, reference.as_ref())?;
            out.s.push(if i + 1 == steps { 1.0 } else { s });
            out.fidelity.push(g.as_ref().map(|g| overlap(g, &psi)));
            out.norm.push(psi.norm());
            if g.is_some() {
                reference = g;
            }
        }
    }
    out.state = psi;
    Ok(out)
}
