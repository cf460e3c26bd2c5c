//! Time-domain oracle for the closed-form transfer function.
//!
//! Integrates the mean-field equations of motion for the collective
//! amplitudes `β = ⟨b⟩`, `p₁ = ⟨P₁⟩/√N`, `p₃ = ⟨P₃⟩/√N` under a Gaussian probe
//! pulse, then recovers `t(ω)` as the ratio of discrete Fourier sums of the
//! output and input fields:
//!
//! ```text
//! dβ/dt  = −(iω_c + κ/2) β + √(κ/2) s_in − iG₁ p₁ − iG₃ p₃
//! dp₁/dt = −(iω₀ + γ₁) p₁ + 2iΔ p₃ − i(G₁ + 2G₃ f_pu) β
//! dp₃/dt = −(iω₁₂ + γ₃) p₃ − 2i f_pu (G₁ + G₃) β
//! s_out  = √(κ/2) β
//! ```
//!
//! With this drive sign the recovered ratio is `−t(ω)` of
//! [`crate::response::transmission_transfer`]; the transmitted power is the
//! same. Integration is fixed-step RK4 in a frame rotating at a chosen
//! frequency (ω₀ by default), and all stored series are rotating-frame
//! amplitudes.

use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::modes::poles;
use crate::response::{transfer_function, TransferFunction};
use crate::{Error, Result, SpectralGrid, SystemParams};

/// Largest accepted RK4 step, internal time units.
pub const MAX_STEP: f64 = 1e-3;
/// Trajectories must decay below this fraction of their peak cavity field.
pub const DECAY_THRESHOLD: f64 = 1e-6;
/// The probe spectrum must exceed this fraction of its peak at every
/// analysed frequency.
pub const SPECTRAL_FLOOR: f64 = 1e-6;

const I: C64 = C64::new(0.0, 1.0);

/// Gaussian probe pulse `a · exp(−(t − t₀)²/2σ²) · exp(−iω_p t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    /// Carrier frequency ω_p, cm⁻¹.
    pub center: f64,
    /// Temporal standard deviation σ, internal time units.
    pub sigma_t: f64,
    /// Peak time t₀, internal time units.
    pub t0: f64,
    pub amplitude: C64,
}

impl Pulse {
    /// σ = 0.02 centered at t₀ = 0.2 with unit amplitude.
    pub fn broadband(center: f64) -> Pulse {
        Pulse {
            center,
            sigma_t: 0.02,
            t0: 0.2,
            amplitude: C64::new(1.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_t.is_finite() && self.sigma_t > 0.0) {
            return Err(Error::InvalidPulse("sigma_t must be positive"));
        }
        if !(self.center.is_finite() && self.t0.is_finite() && self.amplitude.is_finite()) {
            return Err(Error::InvalidPulse("pulse parameters must be finite"));
        }
        Ok(())
    }

    /// Checks that the spectral width `1/σ` is at least half the largest
    /// distance from the carrier to an edge of `grid`.
    pub fn covers(&self, grid: &SpectralGrid) -> Result<()> {
        let half_width = (grid.min() - self.center)
            .abs()
            .max((grid.max() - self.center).abs());
        if 1.0 / self.sigma_t < half_width / 2.0 {
            return Err(Error::InvalidPulse(
                "pulse bandwidth does not cover the grid",
            ));
        }
        Ok(())
    }

    /// Field in the frame rotating at `frame`.
    pub fn field(&self, t: f64, frame: f64) -> C64 {
        let x = (t - self.t0) / self.sigma_t;
        let phase = -(self.center - frame) * t;
        self.amplitude * libm::exp(-0.5 * x * x) * C64::new(libm::cos(phase), libm::sin(phase))
    }
}

/// Step size, duration and rotating frame of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integration {
    pub dt: f64,
    pub t_end: f64,
    /// Rotating-frame frequency, cm⁻¹.
    pub frame: f64,
}

impl Integration {
    /// `dt = 5e-4`, `t_end = 12` in the frame rotating at ω₀.
    pub fn standard(p: &SystemParams) -> Integration {
        Integration {
            dt: 5e-4,
            t_end: 12.0,
            frame: p.omega_0,
        }
    }
}

/// Rotating-frame amplitudes sampled at `t_k = k·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub frame: f64,
    pub pulse: Pulse,
    pub beta: Vec<C64>,
    pub p1: Vec<C64>,
    pub p3: Vec<C64>,
    pub s_in: Vec<C64>,
    pub s_out: Vec<C64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }
}

#[derive(Clone, Copy)]
struct State([C64; 3]);

impl State {
    fn axpy(self, h: f64, k: State) -> State {
        let [a, b, c] = self.0;
        let [x, y, z] = k.0;
        State([a + h * x, b + h * y, c + h * z])
    }
}

/// Linear right-hand side `y' = A y + drive · s_in(t)`.
struct Equations {
    a: [[C64; 3]; 3],
    drive: f64,
}

impl Equations {
    fn new(p: &SystemParams, frame: f64) -> Equations {
        let d = p.derived();
        let (g1, g3, f) = (p.g1_coll, d.g3_coll, p.f_pu);
        let z = C64::new(0.0, 0.0);
        Equations {
            a: [
                [-(I * (p.omega_c - frame) + p.kappa / 2.0), -I * g1, -I * g3],
                [
                    -I * (g1 + 2.0 * g3 * f),
                    -(I * (p.omega_0 - frame) + d.gamma_1),
                    2.0 * I * p.delta,
                ],
                [
                    -2.0 * I * f * (g1 + g3),
                    z,
                    -(I * (d.omega_12 - frame) + d.gamma_3),
                ],
            ],
            drive: libm::sqrt(p.kappa / 2.0),
        }
    }

    fn rate(&self, y: State, s: C64) -> State {
        let a = &self.a;
        let [b, p1, p3] = y.0;
        State([
            a[0][0] * b + a[0][1] * p1 + a[0][2] * p3 + self.drive * s,
            a[1][0] * b + a[1][1] * p1 + a[1][2] * p3,
            a[2][0] * b + a[2][1] * p1 + a[2][2] * p3,
        ])
    }
}

/// Integrates the mean-field equations from rest under `pulse`.
pub fn simulate(p: &SystemParams, pulse: &Pulse, integration: &Integration) -> Result<Trajectory> {
    p.validate()?;
    pulse.validate()?;
    let Integration { dt, t_end, frame } = *integration;
    if !(dt > 0.0 && t_end > 0.0 && frame.is_finite()) {
        return Err(Error::Precondition(
            "dt, t_end must be positive and frame finite",
        ));
    }
    if dt > MAX_STEP {
        return Err(Error::StepTooLarge {
            dt,
            limit: MAX_STEP,
        });
    }
    let unstable = poles(p)?
        .poles()
        .iter()
        .map(|l| l.im)
        .fold(f64::NEG_INFINITY, f64::max);
    if unstable >= 0.0 {
        return Err(Error::UnstableConfiguration { imag: unstable });
    }

    let eq = Equations::new(p, frame);
    let steps = libm::round(t_end / dt) as usize;
    let mut traj = Trajectory {
        dt,
        frame,
        pulse: *pulse,
        beta: Vec::with_capacity(steps + 1),
        p1: Vec::with_capacity(steps + 1),
        p3: Vec::with_capacity(steps + 1),
        s_in: Vec::with_capacity(steps + 1),
        s_out: Vec::with_capacity(steps + 1),
    };
    let zero = C64::new(0.0, 0.0);
    let mut y = State([zero; 3]);
    for k in 0..=steps {
        let t = k as f64 * dt;
        let s_now = pulse.field(t, frame);
        traj.beta.push(y.0[0]);
        traj.p1.push(y.0[1]);
        traj.p3.push(y.0[2]);
        traj.s_in.push(s_now);
        traj.s_out.push(eq.drive * y.0[0]);
        if k == steps {
            break;
        }
        let s_mid = pulse.field(t + dt / 2.0, frame);
        let s_next = pulse.field(t + dt, frame);
        let k1 = eq.rate(y, s_now);
        let k2 = eq.rate(y.axpy(dt / 2.0, k1), s_mid);
        let k3 = eq.rate(y.axpy(dt / 2.0, k2), s_mid);
        let k4 = eq.rate(y.axpy(dt, k3), s_next);
        let [a1, b1, c1] = k1.0;
        let [a2, b2, c2] = k2.0;
        let [a3, b3, c3] = k3.0;
        let [a4, b4, c4] = k4.0;
        let h = dt / 6.0;
        y = State([
            y.0[0] + h * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
            y.0[1] + h * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
            y.0[2] + h * (c1 + 2.0 * c2 + 2.0 * c3 + c4),
        ]);
    }
    Ok(traj)
}

/// Discrete Fourier sums `Σ_k x_k e^{i(ω − frame) t_k}` of two series at once.
///
/// The phase factor is advanced by multiplication and re-anchored to an exact
/// exponential every 1024 samples.
fn fourier_pair(x: &[C64], y: &[C64], dt: f64, detuning: f64) -> (C64, C64) {
    const ANCHOR: usize = 1024;
    let step = C64::new(libm::cos(detuning * dt), libm::sin(detuning * dt));
    let mut sx = C64::new(0.0, 0.0);
    let mut sy = C64::new(0.0, 0.0);
    let mut phase = C64::new(1.0, 0.0);
    for (k, (a, b)) in x.iter().zip(y).enumerate() {
        if k % ANCHOR == 0 {
            let theta = detuning * dt * k as f64;
            phase = C64::new(libm::cos(theta), libm::sin(theta));
        }
        sx += a * phase;
        sy += b * phase;
        phase *= step;
    }
    (sx, sy)
}

/// `DFT(s_out)(ω) / DFT(s_in)(ω)` at every grid frequency.
///
/// Fails if the cavity field has not decayed by the end of the trajectory, or
/// if the probe spectrum at some grid frequency falls below
/// [`SPECTRAL_FLOOR`] times its value at the carrier.
pub fn transfer_from_trajectory(
    traj: &Trajectory,
    grid: &SpectralGrid,
) -> Result<TransferFunction> {
    let peak = traj.beta.iter().fold(0.0, |m: f64, b| m.max(b.norm()));
    if let Some(last) = traj.beta.last() {
        let ratio = if peak > 0.0 { last.norm() / peak } else { 0.0 };
        if ratio >= DECAY_THRESHOLD {
            return Err(Error::IncompleteDecay { ratio });
        }
    }
    let carrier = traj.pulse.center - traj.frame;
    let (reference, _) = fourier_pair(&traj.s_in, &traj.s_in, traj.dt, carrier);
    let reference = reference.norm();
    let mut values = Vec::with_capacity(grid.len());
    for omega in grid.iter() {
        let (s_in, s_out) = fourier_pair(&traj.s_in, &traj.s_out, traj.dt, omega - traj.frame);
        if !(s_in.norm() > SPECTRAL_FLOOR * reference) {
            return Err(Error::SpectralHole { omega });
        }
        values.push(s_out / s_in);
    }
    TransferFunction::new(*grid, values)
}

/// Agreement between the time-domain and closed-form transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    /// `max_ω | |t̂|² − |t|² | / max_ω |t|²`.
    pub max_relative_error: f64,
    /// Frequency of the largest deviation, cm⁻¹.
    pub worst_omega: f64,
    pub points: usize,
}

/// Simulates a broadband probe through the standard integration and compares
/// the recovered transmission with the closed form on `grid`.
pub fn oracle_check(p: &SystemParams, grid: &SpectralGrid) -> Result<OracleReport> {
    let pulse = Pulse::broadband(p.omega_0);
    pulse.covers(grid)?;
    let traj = simulate(p, &pulse, &Integration::standard(p))?;
    compare(p, &transfer_from_trajectory(&traj, grid)?)
}

/// Compares a recovered transfer function with the closed form on its grid.
pub fn compare(p: &SystemParams, recovered: &TransferFunction) -> Result<OracleReport> {
    let closed = transfer_function(p, recovered.grid())?;
    let scale = closed
        .values()
        .iter()
        .fold(0.0, |m: f64, t| m.max(t.norm_sqr()));
    let mut report = OracleReport {
        max_relative_error: 0.0,
        worst_omega: recovered.grid().min(),
        points: recovered.grid().len(),
    };
    for ((omega, a), b) in recovered.iter().zip(closed.values()) {
        let err = (a.norm_sqr() - b.norm_sqr()).abs() / scale;
        if err > report.max_relative_error {
            report.max_relative_error = err;
            report.worst_omega = omega;
        }
    }
    Ok(report)
}
