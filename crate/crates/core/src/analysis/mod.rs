//! Peak finding, parameter sweeps and least-squares fits.

mod fit;
mod peaks;
mod sweep;

pub use fit::{
    fit_fpu, fit_lorentzian, FpuFit, LorentzianFit, Samples, BOUNDARY_MARGIN, DEFAULT_FPU_BOUNDS,
    FPU_TOLERANCE, MAX_ITERATIONS, MIN_FIT_POINTS, SIMPLEX_TOLERANCE,
};
pub use peaks::{find_peaks, up_redshift, Peak, PeakList, PEAK_THRESHOLD};
pub use sweep::{
    detuning_sweep, fpu_sweep, linspace, sweep, sweep_point, SweepPoint, SweepRecord, SweepResult,
};
