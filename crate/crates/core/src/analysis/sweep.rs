use alloc::vec::Vec;

use crate::modes::{build_h, eigenvalues, poles, ResonanceSet};
use crate::response::{
    dark_state_absorption, polariton_absorption, transmission_spectrum, PolaritonAbsorption,
    Spectrum,
};
use crate::{Error, Field, Result, SpectralGrid, SystemParams};

/// `steps` evenly spaced values from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => alloc::vec![from],
        n => {
            let last = (n - 1) as f64;
            (0..n)
                .map(|k| {
                    if k == n - 1 {
                        to
                    } else {
                        from + (to - from) * k as f64 / last
                    }
                })
                .collect()
        }
    }
}

/// Observables at one sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub poles: ResonanceSet,
    /// Eigenvalues of the lossless mode-coupling matrix.
    pub eigenvalues: ResonanceSet,
    /// `|h₁₂|` of the lossless matrix.
    pub h12_abs: f64,
    /// `A(ω_LP) + A(ω_UP)` from the poles of the harmonic linear model.
    pub polariton_absorption: core::result::Result<PolaritonAbsorption, Error>,
    pub dark_state_absorption: f64,
    pub transmission: Option<Spectrum>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub value: f64,
    pub point: core::result::Result<SweepPoint, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub field: Field,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    /// Sweep value with the largest `A(ω_LP) + A(ω_UP)`, skipping failed
    /// points. Ties go to the earliest value.
    pub fn argmax_polariton_absorption(&self) -> Option<f64> {
        let mut best: Option<(f64, f64)> = None;
        for r in &self.records {
            let Ok(point) = &r.point else { continue };
            let Ok(a) = &point.polariton_absorption else {
                continue;
            };
            if best.is_none_or(|(_, v)| a.sum() > v) {
                best = Some((r.value, a.sum()));
            }
        }
        best.map(|(value, _)| value)
    }
}

/// Evaluates the sweep observables with `field` set to `value`.
pub fn sweep_point(
    base: &SystemParams,
    field: Field,
    value: f64,
    grid: Option<&SpectralGrid>,
) -> SweepRecord {
    let p = base.with(field, value);
    let point = evaluate(&p, grid);
    SweepRecord { value, point }
}

fn evaluate(p: &SystemParams, grid: Option<&SpectralGrid>) -> Result<SweepPoint> {
    let h = build_h(p);
    let linear = p.linear_reference();
    Ok(SweepPoint {
        poles: poles(p)?,
        eigenvalues: eigenvalues(&h)?,
        h12_abs: h.entries[0][1].norm(),
        polariton_absorption: poles(&linear).and_then(|res| polariton_absorption(&linear, &res)),
        dark_state_absorption: dark_state_absorption(p),
        transmission: grid.map(|g| transmission_spectrum(p, g)).transpose()?,
    })
}

/// Sequential sweep of `field` over `values`; failures are recorded per point.
pub fn sweep(
    base: &SystemParams,
    field: Field,
    values: &[f64],
    grid: Option<&SpectralGrid>,
) -> SweepResult {
    SweepResult {
        field,
        records: values
            .iter()
            .map(|&v| sweep_point(base, field, v, grid))
            .collect(),
    }
}

pub fn detuning_sweep(
    p: &SystemParams,
    omega_c_values: &[f64],
    grid: Option<&SpectralGrid>,
) -> SweepResult {
    sweep(p, Field::OmegaC, omega_c_values, grid)
}

pub fn fpu_sweep(p: &SystemParams, f_values: &[f64], grid: Option<&SpectralGrid>) -> SweepResult {
    sweep(p, Field::FPu, f_values, grid)
}
