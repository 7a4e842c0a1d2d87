use crate::error::{Error, Result};

/// Shape of a single `0 → 1` ramp.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ramp {
    Linear,
    /// `3u² − 2u³`; flat at both ends.
    Smoothstep,
}

impl Ramp {
    fn value(self, u: f64) -> f64 {
        match self {
            Ramp::Linear => u,
            Ramp::Smoothstep => u * u * (3.0 - 2.0 * u),
        }
    }

    fn slope(self, u: f64) -> f64 {
        match self {
            Ramp::Linear => 1.0,
            Ramp::Smoothstep => 6.0 * u * (1.0 - u),
        }
    }

    fn curvature(self, u: f64) -> f64 {
        match self {
            Ramp::Linear => 0.0,
            Ramp::Smoothstep => 6.0 - 12.0 * u,
        }
    }
}

/// How the coefficients are switched on.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleKind {
    /// Every `γ_k(s)` follows the same ramp over `[0, 1]`.
    Direct,
    /// Stages of term indices, stage `i` of `m` ramping on `[i/m, (i+1)/m]`.
    Stepwise(Vec<Vec<usize>>),
    /// Explicit ramp window `[a_k, b_k] ⊂ [0, 1]` per term.
    Custom(Vec<(f64, f64)>),
}

/// Coefficients `γ_k(s)` of the path `H(s) = H_i + Σ γ_k(s) H^r_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSchedule {
    pub kind: ScheduleKind,
    pub ramp: Ramp,
    windows: Vec<(f64, f64)>,
}

impl PathSchedule {
    /// Builds a schedule over `num_terms` coefficients. Smoothstep ramps are
    /// used when `endpoint_flat` is set.
    pub fn new(kind: ScheduleKind, num_terms: usize, endpoint_flat: bool) -> Result<Self> {
        const OP: &str = "make_schedule";
        let windows = match &kind {
            ScheduleKind::Direct => vec![(0.0, 1.0); num_terms],
            ScheduleKind::Stepwise(stages) => {
                let m = stages.len();
                let mut windows = vec![None; num_terms];
                for (i, stage) in stages.iter().enumerate() {
                    if stage.is_empty() {
                        return Err(Error::domain(OP, format!("stage {} is empty", i + 1)));
                    }
                    for &k in stage {
                        if k >= num_terms {
                            return Err(Error::domain(OP, format!("term {k} out of range for {num_terms} terms")));
                        }
                        if windows[k].is_some() {
                            return Err(Error::domain(OP, format!("term {k} appears in more than one stage")));
                        }
                        windows[k] = Some((i as f64 / m as f64, (i + 1) as f64 / m as f64));
                    }
                }
                if let Some(k) = windows.iter().position(Option::is_none) {
                    return Err(Error::domain(OP, format!("term {k} is not assigned to any stage")));
                }
                windows.into_iter().flatten().collect()
            }
            ScheduleKind::Custom(w) => {
                if w.len() != num_terms {
                    return Err(Error::domain(OP, format!("{} windows for {num_terms} terms", w.len())));
                }
                if let Some(k) = w.iter().position(|&(a, b)| !(0.0 <= a && a < b && b <= 1.0)) {
                    return Err(Error::domain(OP, format!("window of term {k} is not inside [0, 1]")));
                }
                w.clone()
            }
        };
        let ramp = if endpoint_flat { Ramp::Smoothstep } else { Ramp::Linear };
        Ok(PathSchedule { kind, ramp, windows })
    }

    pub fn direct(num_terms: usize, endpoint_flat: bool) -> Self {
        Self::new(ScheduleKind::Direct, num_terms, endpoint_flat).expect("direct schedule is always valid")
    }

    pub fn num_terms(&self) -> usize {
        self.windows.len()
    }

    pub fn endpoint_flat(&self) -> bool {
        self.ramp == Ramp::Smoothstep
    }

    fn local(&self, k: usize, s: f64) -> Option<(f64, f64)> {
        let (a, b) = self.windows[k];
        (a < s && s < b).then(|| ((s - a) / (b - a), b - a))
    }

    pub fn gamma(&self, s: f64) -> Vec<f64> {
        (0..self.num_terms())
            .map(|k| {
                let (a, b) = self.windows[k];
                if s <= a {
                    0.0
                } else if s >= b {
                    1.0
                } else {
                    self.ramp.value((s - a) / (b - a))
                }
            })
            .collect()
    }

    /// `dγ_k/ds`; zero outside the ramp window.
    pub fn derivative(&self, s: f64) -> Vec<f64> {
        (0..self.num_terms())
            .map(|k| self.local(k, s).map_or(0.0, |(u, w)| self.ramp.slope(u) / w))
            .collect()
    }

    pub fn second_derivative(&self, s: f64) -> Vec<f64> {
        (0..self.num_terms())
            .map(|k| self.local(k, s).map_or(0.0, |(u, w)| self.ramp.curvature(u) / (w * w)))
            .collect()
    }

    /// `max_s |γ′_k(s)|` per term.
    pub fn max_slopes(&self) -> Vec<f64> {
        let peak = match self.ramp {
            Ramp::Linear => 1.0,
            Ramp::Smoothstep => 1.5,
        };
        self.windows.iter().map(|(a, b)| peak / (b - a)).collect()
    }

    /// Points in `(0, 1)` where some coefficient is not smooth (window ends),
    /// plus window midpoints for smoothstep ramps, where `|γ″|` has a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = Vec::new();
        for &(a, b) in &self.windows {
            pts.push(a);
            pts.push(b);
            if self.ramp == Ramp::Smoothstep {
                pts.push(0.5 * (a + b));
            }
        }
        pts.retain(|&x| x > 0.0 && x < 1.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(PathSchedule::direct(3, false).gamma(0.5), vec![0.5; 3]);
        let s = PathSchedule::new(ScheduleKind::Stepwise(vec![vec![0], vec![1], vec![2]]), 3, false).unwrap();
        let g = s.gamma(0.5);
        assert_eq!(g[0], 1.0);
        assert_relative_eq!(g[1], 0.5, epsilon = 1e-15);
        assert_eq!(g[2], 0.0);
        assert_eq!(s.derivative(0.5), vec![0.0, 3.0, 0.0]);
        assert_eq!(s.breakpoints().len(), 2);
    }

    #[test]
    fn invalid_orders_rejected() {
        let stepwise = |stages: Vec<Vec<usize>>| PathSchedule::new(ScheduleKind::Stepwise(stages), 3, false);
        assert!(stepwise(vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(stepwise(vec![vec![0], vec![1]]).is_err());
        assert!(stepwise(vec![vec![0, 1, 2], vec![]]).is_err());
        assert!(stepwise(vec![vec![0, 1, 3], vec![2]]).is_err());
        assert!(PathSchedule::new(ScheduleKind::Custom(vec![(0.5, 0.2)]), 1, false).is_err());
    }

    #[test]
    fn smoothstep_is_flat_at_ends() {
        let s = PathSchedule::new(ScheduleKind::Stepwise(vec![vec![0], vec![1]]), 2, true).unwrap();
        for x in [0.0, 0.5, 1.0] {
            assert!(s.derivative(x).iter().all(|d| d.abs() < 1e-15));
        }
        assert_relative_eq!(s.derivative(0.25)[0], 3.0, epsilon = 1e-12);
        assert_eq!(s.max_slopes(), vec![3.0, 3.0]);
    }

    proptest! {
        #[test]
        fn endpoints_and_derivatives(flat in any::<bool>(), m in 1usize..6, s in 0.0f64..1.0) {
            let stages: Vec<Vec<usize>> = (0..m).map(|k| vec![k]).collect();
            let sched = PathSchedule::new(ScheduleKind::Stepwise(stages), m, flat).unwrap();
            prop_assert!(sched.gamma(0.0).iter().all(|&g| g == 0.0));
            prop_assert!(sched.gamma(1.0).iter().all(|&g| g == 1.0));
            let h = 1e-6;
            if sched.breakpoints().iter().all(|b| (b - s).abs() > 2.0 * h) && s > 2.0 * h && s < 1.0 - 2.0 * h {
                let (gp, gm) = (sched.gamma(s + h), sched.gamma(s - h));
                for ((d, p), q) in sched.derivative(s).iter().zip(&gp).zip(&gm) {
                    prop_assert!((d - (p - q) / (2.0 * h)).abs() < 1e-6);
                }
                prop_assert!(sched.gamma(s).iter().all(|g| (0.0..=1.0).contains(g)));
            }
        }
    }
}
