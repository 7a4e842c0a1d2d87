use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::twobody::{num_pairs, pair_index, TwoBodyMode};

/// Sylvester Hadamard matrix of order `n` (a power of two).
pub fn sylvester_hadamard(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::domain("sylvester_hadamard", format!("order {n} is not a power of two")));
    }
    let mut h = DMatrix::from_element(1, 1, 1.0);
    while h.nrows() < n {
        let k = h.nrows();
        let mut next = DMatrix::zeros(2 * k, 2 * k);
        next.view_mut((0, 0), (k, k)).copy_from(&h);
        next.view_mut((0, k), (k, k)).copy_from(&h);
        next.view_mut((k, 0), (k, k)).copy_from(&h);
        next.view_mut((k, k), (k, k)).copy_from(&(-&h));
        h = next;
    }
    Ok(h)
}

/// `L − 1` disjoint perfect matchings of `L` modes (circle method, mode 0 fixed).
pub fn round_robin_pairings(l: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    if l < 2 || l % 2 == 1 {
        return Err(Error::domain("round_robin_pairings", format!("needs an even L >= 2, got {l}")));
    }
    let ring = l - 1;
    Ok((0..ring)
        .map(|r| {
            let mut pairs = vec![(0, 1 + r)];
            for k in 1..l / 2 {
                let a = 1 + (r + k) % ring;
                let b = 1 + (r + ring - k) % ring;
                pairs.push((a.min(b), a.max(b)));
            }
            pairs.sort();
            pairs
        })
        .collect())
}

/// `L(L − 1)/2` orthonormal, fully paired modes with `|ξ_m| = 1/√(L/2)`:
/// each round-robin matching carries the `L/2` Hadamard columns as sign patterns.
pub fn hadamard_maximal_modes(l: usize) -> Result<Vec<TwoBodyMode>> {
    const OP: &str = "hadamard_maximal_modes";
    if l < 4 || !l.is_power_of_two() {
        return Err(Error::domain(OP, format!("L must be a power of two >= 4, got {l}")));
    }
    let half = l / 2;
    let h = sylvester_hadamard(half)?;
    let scale = 1.0 / (half as f64).sqrt();
    let mut modes = Vec::with_capacity(num_pairs(l));
    for matching in round_robin_pairings(l)? {
        for c in 0..half {
            let mut phi = DVector::zeros(num_pairs(l));
            for (m, &(p, r)) in matching.iter().enumerate() {
                phi[pair_index(l, p, r)] = h[(m, c)] * scale;
            }
            modes.push(TwoBodyMode::new(1.0, phi, l));
        }
    }
    Ok(modes)
}
