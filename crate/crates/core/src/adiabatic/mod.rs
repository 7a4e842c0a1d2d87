//! Interpolation paths over decomposition terms, spectral gaps along them,
//! Schrödinger propagation and evolution-time estimates.

mod estimates;
mod path;
mod propagate;
mod schedule;

pub use estimates::{adiabatic_numerator, jansen_time, JansenEstimate, DEFAULT_NODES};
pub use path::{gap_trace, uniform_grid, AdiabaticPath, SpectrumTrace, DEFAULT_GRID};
pub use propagate::{propagate, Evolution, DEGENERACY_TOL};
pub use schedule::{PathSchedule, Ramp, ScheduleKind};
