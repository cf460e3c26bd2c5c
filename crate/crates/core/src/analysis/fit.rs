use alloc::vec::Vec;

use crate::response::{transmission_transfer, Spectrum};
use crate::{Error, Field, Result, SystemParams};

/// Minimum number of points accepted by [`fit_lorentzian`].
pub const MIN_FIT_POINTS: usize = 8;
/// Simplex diameter (normalized coordinates) at which Nelder–Mead stops.
pub const SIMPLEX_TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100_000;
/// Final bracket width of the `f_pu` search.
pub const FPU_TOLERANCE: f64 = 1e-6;
/// Estimates closer than this to a search bound are flagged.
pub const BOUNDARY_MARGIN: f64 = 1e-4;
pub const DEFAULT_FPU_BOUNDS: (f64, f64) = (0.0, 0.5);

/// Sampled data on a strictly increasing, not necessarily uniform, axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    omega: Vec<f64>,
    values: Vec<f64>,
}

impl Samples {
    pub fn new(omega: Vec<f64>, values: Vec<f64>) -> Result<Samples> {
        if omega.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: omega.len(),
                actual: values.len(),
            });
        }
        if omega.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::DegenerateData("samples must be finite"));
        }
        if omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::DegenerateData(
                "frequencies must be strictly increasing",
            ));
        }
        Ok(Samples { omega, values })
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.omega.iter().copied().zip(self.values.iter().copied())
    }
}

impl From<&Spectrum> for Samples {
    fn from(s: &Spectrum) -> Samples {
        Samples {
            omega: s.grid().iter().collect(),
            values: s.values().to_vec(),
        }
    }
}

/// `baseline + amplitude·(γ/2)² / ((ω − ω₀)² + (γ/2)²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianFit {
    pub center: f64,
    /// Full width at half maximum.
    pub fwhm: f64,
    pub amplitude: f64,
    pub baseline: f64,
    pub residual_rms: f64,
    pub iterations: usize,
}

impl LorentzianFit {
    pub fn eval(&self, omega: f64) -> f64 {
        lorentzian(
            omega,
            self.center,
            self.fwhm / 2.0,
            self.amplitude,
            self.baseline,
        )
    }
}

fn lorentzian(x: f64, center: f64, half: f64, amplitude: f64, baseline: f64) -> f64 {
    let d = x - center;
    baseline + amplitude * half * half / (d * d + half * half)
}

/// Least-squares Lorentzian fit by Nelder–Mead from a moment-based start,
/// finished with Gauss–Newton steps.
///
/// The problem is solved in normalized coordinates (frequency mapped onto the
/// unit span, values onto `[0, 1]`, width on a log scale), so the result is
/// equivariant under shifts and positive rescaling of the data.
pub fn fit_lorentzian(data: &Samples) -> Result<LorentzianFit> {
    let n = data.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::DegenerateData("at least 8 points are required"));
    }
    let (x_min, x_max) = (data.omega[0], data.omega[n - 1]);
    let x_mid = 0.5 * (x_min + x_max);
    let x_span = x_max - x_min;
    let y_min = data.values.iter().copied().fold(f64::INFINITY, f64::min);
    let y_max = data
        .values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let y_span = y_max - y_min;
    if !(y_span > 0.0) {
        return Err(Error::DegenerateData("values are constant"));
    }
    let u: Vec<f64> = data.omega.iter().map(|x| (x - x_mid) / x_span).collect();
    let y: Vec<f64> = data.values.iter().map(|v| (v - y_min) / y_span).collect();

    let start = moment_start(&u, &y);
    let objective = |q: &[f64; 4]| {
        let half = libm::exp(q[1]);
        u.iter()
            .zip(&y)
            .map(|(&ui, &yi)| {
                let r = lorentzian(ui, q[0], half, q[2], q[3]) - yi;
                r * r
            })
            .sum::<f64>()
    };
    let steps = [libm::exp(start[1]), 0.25, 0.1, 0.1];
    let (q, value, iterations) = nelder_mead(objective, start, steps)?;
    let q = gauss_newton_polish(&u, &y, q, value, objective);

    let half = libm::exp(q[1]) * x_span;
    let mut fit = LorentzianFit {
        center: x_mid + q[0] * x_span,
        fwhm: 2.0 * half,
        amplitude: q[2] * y_span,
        baseline: y_min + q[3] * y_span,
        residual_rms: 0.0,
        iterations,
    };
    let ss: f64 = data
        .iter()
        .map(|(x, v)| (fit.eval(x) - v) * (fit.eval(x) - v))
        .sum();
    fit.residual_rms = libm::sqrt(ss / n as f64);
    Ok(fit)
}

/// Gauss–Newton refinement of a Nelder–Mead minimum.
///
/// The simplex stops once it is small, not once the minimizer is resolved to
/// rounding level; a few Gauss–Newton steps close that gap. Steps that raise
/// the objective beyond rounding end the refinement.
fn gauss_newton_polish(
    u: &[f64],
    y: &[f64],
    mut q: [f64; 4],
    mut value: f64,
    objective: impl Fn(&[f64; 4]) -> f64,
) -> [f64; 4] {
    for _ in 0..20 {
        let half = libm::exp(q[1]);
        let h2 = half * half;
        let mut jtj = [[0.0; 4]; 4];
        let mut jtr = [0.0; 4];
        for (&ui, &yi) in u.iter().zip(y) {
            let d = ui - q[0];
            let s = d * d + h2;
            let shape = h2 / s;
            let r = q[3] + q[2] * shape - yi;
            let j = [
                q[2] * 2.0 * d * h2 / (s * s),
                q[2] * 2.0 * h2 * d * d / (s * s),
                shape,
                1.0,
            ];
            for a in 0..4 {
                jtr[a] += j[a] * r;
                for b in 0..4 {
                    jtj[a][b] += j[a] * j[b];
                }
            }
        }
        let Some(step) = solve4(jtj, jtr) else { break };
        let mut next = q;
        for k in 0..4 {
            next[k] -= step[k];
        }
        let next_value = objective(&next);
        // Near the minimum the objective is flat to rounding; tolerate that
        // much so converging steps are not rejected as noise.
        if !(next_value <= value * (1.0 + 1e-12)) {
            break;
        }
        q = next;
        value = next_value.min(value);
        let size = step.iter().fold(0.0, |m: f64, s| m.max(s.abs()));
        if size < 1e-15 {
            break;
        }
    }
    q
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if !(a[pivot][col].abs() > 0.0) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let factor = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let tail: f64 = (row + 1..4).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Initial `[center, ln(half width), amplitude, baseline]` from the median
/// baseline, the extremal deviation and the area under it.
fn moment_start(u: &[f64], y: &[f64]) -> [f64; 4] {
    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let baseline = if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    };
    let (mut k_max, mut k_min) = (0, 0);
    for k in 0..y.len() {
        if y[k] > y[k_max] {
            k_max = k;
        }
        if y[k] < y[k_min] {
            k_min = k;
        }
    }
    let (peak, amplitude) = if y[k_max] - baseline >= baseline - y[k_min] {
        (k_max, y[k_max] - baseline)
    } else {
        (k_min, y[k_min] - baseline)
    };
    let area: f64 = u
        .windows(2)
        .zip(y.windows(2))
        .map(|(du, dy)| 0.5 * (du[1] - du[0]) * (dy[0] + dy[1] - 2.0 * baseline))
        .sum();
    let spacing = u
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let half = (area / (core::f64::consts::PI * amplitude))
        .abs()
        .clamp(spacing, 1.0);
    [u[peak], libm::log(half), amplitude, baseline]
}

/// Nelder–Mead with standard coefficients, restarted from the best vertex
/// until a restart no longer lowers the objective.
///
/// Returns the minimizer, its value and the total iteration count.
fn nelder_mead<const N: usize>(
    mut f: impl FnMut(&[f64; N]) -> f64,
    start: [f64; N],
    steps: [f64; N],
) -> Result<([f64; N], f64, usize)> {
    const RESTARTS: usize = 8;
    let mut best = start;
    let mut best_value = f(&start);
    let mut iterations = 0;
    for _ in 0..RESTARTS {
        let (x, value, used) = nelder_mead_once(&mut f, best, steps, MAX_ITERATIONS - iterations)?;
        iterations += used;
        let improved = value < best_value;
        if value <= best_value {
            best = x;
            best_value = value;
        }
        if !improved {
            break;
        }
    }
    Ok((best, best_value, iterations))
}

fn nelder_mead_once<const N: usize>(
    f: &mut impl FnMut(&[f64; N]) -> f64,
    start: [f64; N],
    steps: [f64; N],
    budget: usize,
) -> Result<([f64; N], f64, usize)> {
    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((start, f(&start)));
    for k in 0..N {
        let mut x = start;
        x[k] += steps[k];
        simplex.push((x, f(&x)));
    }
    let blend = |a: &[f64; N], b: &[f64; N], t: f64| {
        let mut out = [0.0; N];
        for k in 0..N {
            out[k] = a[k] + t * (b[k] - a[k]);
        }
        out
    };

    for iteration in 0..budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                let d2: f64 = x
                    .iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                libm::sqrt(d2)
            })
            .fold(0.0, f64::max);
        if diameter < SIMPLEX_TOLERANCE {
            return Ok((simplex[0].0, simplex[0].1, iteration));
        }

        let mut centroid = [0.0; N];
        for (x, _) in &simplex[..N] {
            for k in 0..N {
                centroid[k] += x[k] / N as f64;
            }
        }
        let (worst, worst_value) = simplex[N];
        let reflected = blend(&centroid, &worst, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = blend(&centroid, &worst, -2.0);
            let fe = f(&expanded);
            simplex[N] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[N - 1].1 {
            simplex[N] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst_value {
            let x = blend(&centroid, &reflected, 0.5);
            (x, f(&x))
        } else {
            let x = blend(&centroid, &worst, 0.5);
            (x, f(&x))
        };
        if fc < worst_value.min(fr) {
            simplex[N] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0;
        for vertex in simplex.iter_mut().skip(1) {
            vertex.0 = blend(&best, &vertex.0, 0.5);
            vertex.1 = f(&vertex.0);
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
    })
}

/// Pump fraction that best reproduces a measured `ΔT = T^pu − T⁰`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpuFit {
    pub f_pu: f64,
    /// Sum of squared `ΔT` residuals at the estimate.
    pub residual: f64,
    pub residual_rms: f64,
    /// The estimate lies within [`BOUNDARY_MARGIN`] of a search bound.
    pub boundary_optimum: bool,
}

/// Fits `f_pu` to measured `ΔT` by bounded one-dimensional search.
///
/// The model `ΔT` is evaluated from the closed form at each measured
/// frequency with the other parameters from `p` (its own `f_pu` is ignored).
/// A uniform scan of 64 intervals brackets the global minimum, which golden
/// section then narrows to [`FPU_TOLERANCE`]; the bounds themselves are also
/// candidates.
pub fn fit_fpu(p: &SystemParams, measured: &Samples, bounds: (f64, f64)) -> Result<FpuFit> {
    const SCAN: usize = 64;
    let (lo, hi) = bounds;
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::Precondition(
            "f_pu bounds must satisfy 0 <= lo < hi <= 1",
        ));
    }
    if measured.is_empty() {
        return Err(Error::DegenerateData("no data"));
    }
    let linear = p.unpumped();
    linear.validate()?;
    let baseline: Vec<f64> = measured
        .omega()
        .iter()
        .map(|&w| transmission_transfer(&linear, w).map(|t| t.norm_sqr()))
        .collect::<Result<_>>()?;
    let objective = |f: f64| -> Result<f64> {
        let pumped = linear.with(Field::FPu, f);
        let mut sum = 0.0;
        for ((w, m), t0) in measured.iter().zip(&baseline) {
            let r = transmission_transfer(&pumped, w)?.norm_sqr() - t0 - m;
            sum += r * r;
        }
        Ok(sum)
    };

    let node = |k: usize| {
        if k == SCAN {
            hi
        } else {
            lo + (hi - lo) * k as f64 / SCAN as f64
        }
    };
    let scan: Vec<f64> = (0..=SCAN)
        .map(|k| objective(node(k)))
        .collect::<Result<_>>()?;
    let k = (0..=SCAN)
        .min_by(|&a, &b| scan[a].total_cmp(&scan[b]))
        .expect("non-empty scan");
    let mut best = (node(k), scan[k]);

    let (mut a, mut b) = (node(k.saturating_sub(1)), node((k + 1).min(SCAN)));
    let ratio = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (objective(c)?, objective(d)?);
    while b - a > FPU_TOLERANCE {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = objective(d)?;
        }
    }
    for candidate in [(c, fc), (d, fd)] {
        if candidate.1 < best.1 {
            best = candidate;
        }
    }

    let (f_pu, residual) = best;
    Ok(FpuFit {
        f_pu,
        residual,
        residual_rms: libm::sqrt(residual / measured.len() as f64),
        boundary_optimum: f_pu - lo < BOUNDARY_MARGIN || hi - f_pu < BOUNDARY_MARGIN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::pump_probe_spectrum;
    use crate::SpectralGrid;

    fn synthetic(center: f64, fwhm: f64, amplitude: f64, baseline: f64) -> Samples {
        let grid = SpectralGrid::new(1963.0, 2003.0, 0.1).unwrap();
        let omega: Vec<f64> = grid.iter().collect();
        let values = omega
            .iter()
            .map(|&w| lorentzian(w, center, fwhm / 2.0, amplitude, baseline))
            .collect();
        Samples::new(omega, values).unwrap()
    }

    #[test]
    fn samples_validation() {
        assert!(Samples::new(alloc::vec![1.0, 2.0], alloc::vec![0.0]).is_err());
        assert!(Samples::new(alloc::vec![1.0, 1.0], alloc::vec![0.0, 0.0]).is_err());
        assert!(Samples::new(alloc::vec![2.0, 1.0], alloc::vec![0.0, 0.0]).is_err());
        assert!(Samples::new(alloc::vec![1.0, 2.0], alloc::vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn noiseless_lorentzian_round_trip() {
        let fit = fit_lorentzian(&synthetic(1983.0, 3.0, 0.8, 0.05)).unwrap();
        assert!((fit.center - 1983.0).abs() / 1983.0 < 1e-6, "{fit:?}");
        assert!((fit.fwhm - 3.0).abs() / 3.0 < 1e-6, "{fit:?}");
        assert!((fit.amplitude - 0.8).abs() / 0.8 < 1e-6, "{fit:?}");
        assert!(fit.residual_rms < 1e-8);
    }

    #[test]
    fn absorption_dip_is_fitted() {
        let fit = fit_lorentzian(&synthetic(1990.5, 5.0, -0.4, 1.0)).unwrap();
        assert!(
            (fit.center - 1990.5).abs() < 1e-6 && (fit.fwhm - 5.0).abs() < 1e-6,
            "{fit:?}"
        );
    }

    #[test]
    fn degenerate_inputs() {
        let flat = Samples::new((0..20).map(f64::from).collect(), alloc::vec![1.0; 20]).unwrap();
        assert!(matches!(
            fit_lorentzian(&flat),
            Err(Error::DegenerateData(_))
        ));
        let short = Samples::new(
            (0..7).map(f64::from).collect(),
            (0..7).map(f64::from).collect(),
        )
        .unwrap();
        assert!(matches!(
            fit_lorentzian(&short),
            Err(Error::DegenerateData(_))
        ));
    }

    fn measured_dt(f: f64) -> Samples {
        let p = SystemParams::paper_defaults().with(Field::FPu, f);
        let grid = SpectralGrid::new(1940.0, 2030.0, 0.5).unwrap();
        (&pump_probe_spectrum(&p, &grid).unwrap()).into()
    }

    #[test]
    fn fpu_round_trip() {
        let fit = fit_fpu(
            &SystemParams::paper_defaults(),
            &measured_dt(0.075),
            DEFAULT_FPU_BOUNDS,
        )
        .unwrap();
        assert!((fit.f_pu - 0.075).abs() < 1e-4, "{fit:?}");
        assert!(!fit.boundary_optimum);
    }

    #[test]
    fn zero_response_hits_lower_bound() {
        let zero = measured_dt(0.0);
        assert!(zero.values().iter().all(|&v| v == 0.0));
        let fit = fit_fpu(&SystemParams::paper_defaults(), &zero, DEFAULT_FPU_BOUNDS).unwrap();
        assert_eq!(fit.f_pu, 0.0);
        assert_eq!(fit.residual, 0.0);
        assert!(fit.boundary_optimum);
    }

    #[test]
    fn fpu_fit_is_deterministic() {
        let p = SystemParams::paper_defaults();
        let data = measured_dt(0.2);
        let a = fit_fpu(&p, &data, DEFAULT_FPU_BOUNDS).unwrap();
        let b = fit_fpu(&p, &data, DEFAULT_FPU_BOUNDS).unwrap();
        assert_eq!(a.f_pu.to_bits(), b.f_pu.to_bits());
        assert!((a.f_pu - 0.2).abs() < 1e-4);
    }

    #[test]
    fn bounds_are_checked() {
        let p = SystemParams::paper_defaults();
        assert!(fit_fpu(&p, &measured_dt(0.1), (0.3, 0.2)).is_err());
    }
}
