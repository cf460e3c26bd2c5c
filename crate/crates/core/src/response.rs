//! Closed-form frequency-domain response.
//!
//! The probe drives the cavity from the left. With the pump encoded in a
//! constant excited fraction `f_pu`, the mean-field polarizations follow the
//! cavity field linearly:
//!
//! ```text
//! p₃(ω) = χ₃(ω) β(ω),   χ₃ = 2 f_pu (G₁ + G₃) / (ω − ω₁₂ + iγ₃)
//! p₁(ω) = χ₁(ω) β(ω),   χ₁ = [G₁ + 2G₃ f_pu − 2Δ χ₃] / (ω − ω₀ + iγ₁)
//! ```
//!
//! and the right-port output over the left-port input is
//!
//! ```text
//! t(ω) = −i(κ/2)(ω − ω₀ + iγ₁)(ω − ω₁₂ + iγ₃) / D(ω)
//! D(ω) = (ω − ω_c + iκ/2)(ω − ω₀ + iγ₁)(ω − ω₁₂ + iγ₃) − NA(ω)
//! NA(ω) = G₁²(ω − ω₁₂ + iγ₃) + f_pu [4G₁G₃(ω − ω₀ + iγ_m)
//!         + 2G₃²(ω − ω₀ + iγ_m/2) − 4ΔG₁²]
//! ```
//!
//! Reflection uses `b_out = −b_in + √(κ/2) β`, which makes
//! `|t|² + |r|² + A = 1` hold exactly in the unpumped model.

use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::modes::{Cubic, Label, ResonanceSet};
use crate::{Error, Result, SpectralGrid, SystemParams};

/// Imaginary shift applied to the undamped polarization kernels.
pub const POLE_REGULARIZATION: f64 = 1e-6;

/// Above this linewidth-to-splitting ratio the polariton absorption
/// estimates are flagged.
pub const STRONG_COUPLING_RATIO: f64 = 0.3;

const I: C64 = C64::new(0.0, 1.0);

/// Complex amplitudes on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    grid: SpectralGrid,
    values: Vec<C64>,
}

impl TransferFunction {
    pub fn new(grid: SpectralGrid, values: Vec<C64>) -> Result<TransferFunction> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(TransferFunction { grid, values })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, C64)> + '_ {
        self.grid.iter().zip(self.values.iter().copied())
    }

    /// `|t|²` at every grid point.
    pub fn power(&self) -> Spectrum {
        Spectrum {
            grid: self.grid,
            values: self.values.iter().map(|t| t.norm_sqr()).collect(),
        }
    }
}

/// Real values on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: SpectralGrid,
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(grid: SpectralGrid, values: Vec<f64>) -> Result<Spectrum> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(Spectrum { grid, values })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.iter().zip(self.values.iter().copied())
    }

    /// Value at the grid point nearest to `omega`.
    pub fn at(&self, omega: f64) -> f64 {
        self.values[self.grid.nearest_index(omega)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `p₃/β`, the 1→2 polarization per unit cavity field.
pub fn chi_p3(p: &SystemParams, omega: f64) -> Result<C64> {
    let d = p.derived();
    let numerator = 2.0 * p.f_pu * (p.g1_coll + d.g3_coll);
    if numerator == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let denominator = C64::new(omega - d.omega_12, d.gamma_3);
    if denominator.norm() == 0.0 {
        return Err(Error::DivergentResponse { omega });
    }
    Ok(numerator / denominator)
}

/// `p₁/β`, the 0→1 polarization per unit cavity field.
pub fn chi_p1(p: &SystemParams, omega: f64) -> Result<C64> {
    let d = p.derived();
    let numerator =
        C64::new(p.g1_coll + 2.0 * d.g3_coll * p.f_pu, 0.0) - 2.0 * p.delta * chi_p3(p, omega)?;
    if numerator.norm() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let denominator = C64::new(omega - p.omega_0, d.gamma_1);
    if denominator.norm() == 0.0 {
        return Err(Error::DivergentResponse { omega });
    }
    Ok(numerator / denominator)
}

/// The matter term `NA(ω)` of the denominator, linear in ω:
/// returns `(slope, value at ω₀)`.
fn matter_term(p: &SystemParams) -> (C64, C64) {
    let d = p.derived();
    let (g1, g3, f) = (p.g1_coll, d.g3_coll, p.f_pu);
    let slope = C64::new(g1 * g1 + f * (4.0 * g1 * g3 + 2.0 * g3 * g3), 0.0);
    let pumped = 4.0 * g1 * g3 * C64::new(0.0, p.gamma_m)
        + 2.0 * g3 * g3 * C64::new(0.0, p.gamma_m / 2.0)
        - 4.0 * p.delta * g1 * g1;
    let offset = g1 * g1 * C64::new(2.0 * p.delta, d.gamma_3) + f * pumped;
    (slope, offset)
}

fn matter_term_at(p: &SystemParams, omega: f64) -> C64 {
    let d = p.derived();
    let (g1, g3) = (p.g1_coll, d.g3_coll);
    let pumped = 4.0 * g1 * g3 * C64::new(omega - p.omega_0, p.gamma_m)
        + 2.0 * g3 * g3 * C64::new(omega - p.omega_0, p.gamma_m / 2.0)
        - 4.0 * p.delta * g1 * g1;
    g1 * g1 * C64::new(omega - d.omega_12, d.gamma_3) + p.f_pu * pumped
}

/// Transfer-function denominator as a monic cubic in `x = ω − ω₀`.
pub fn denominator_poly(p: &SystemParams) -> Cubic {
    let d = p.derived();
    // Roots of the bare factors, shifted by ω₀.
    let a = C64::new(p.omega_c - p.omega_0, -p.kappa / 2.0);
    let b = C64::new(0.0, -d.gamma_1);
    let c = C64::new(-2.0 * p.delta, -d.gamma_3);
    let (slope, offset) = matter_term(p);
    Cubic {
        center: p.omega_0,
        coeffs: [
            -(a * b * c) - offset,
            a * b + b * c + c * a - slope,
            -(a + b + c),
            C64::new(1.0, 0.0),
        ],
    }
}

struct Factors {
    fundamental: C64,
    overtone: C64,
    denominator: C64,
}

fn factors(p: &SystemParams, omega: f64) -> Result<Factors> {
    let d = p.derived();
    let denominator = denominator_factored(p, omega);
    if denominator.norm() == 0.0 {
        return Err(Error::DivergentResponse { omega });
    }
    Ok(Factors {
        fundamental: C64::new(omega - p.omega_0, d.gamma_1),
        overtone: C64::new(omega - d.omega_12, d.gamma_3),
        denominator,
    })
}

/// Denominator evaluated in factored form.
pub fn denominator_factored(p: &SystemParams, omega: f64) -> C64 {
    let d = p.derived();
    C64::new(omega - p.omega_c, p.kappa / 2.0)
        * C64::new(omega - p.omega_0, d.gamma_1)
        * C64::new(omega - d.omega_12, d.gamma_3)
        - matter_term_at(p, omega)
}

/// Right-port output over left-port input, `⟨b_out^R⟩/⟨b_in^L⟩`.
pub fn transmission_transfer(p: &SystemParams, omega: f64) -> Result<C64> {
    let f = factors(p, omega)?;
    Ok(-I * (p.kappa / 2.0) * f.fundamental * f.overtone / f.denominator)
}

/// Intracavity field per unit input, `β/b_in`, for a drive `+√(κ/2) b_in`.
pub fn cavity_field(p: &SystemParams, omega: f64) -> Result<C64> {
    let f = factors(p, omega)?;
    Ok(I * libm::sqrt(p.kappa / 2.0) * f.fundamental * f.overtone / f.denominator)
}

/// Left-port reflection `−1 + √(κ/2) β/b_in`.
pub fn reflection_transfer(p: &SystemParams, omega: f64) -> Result<C64> {
    Ok(C64::new(-1.0, 0.0) + libm::sqrt(p.kappa / 2.0) * cavity_field(p, omega)?)
}

/// Unpumped harmonic transmission, the two-mode formula
/// `−i(κ/2)(ω − ω₀ + iγ₁) / [(ω − ω_c + iκ/2)(ω − ω₀ + iγ₁) − G₁²]`.
pub fn linear_transmission_transfer(p: &SystemParams, omega: f64) -> Result<C64> {
    let d = p.derived();
    let fundamental = C64::new(omega - p.omega_0, d.gamma_1);
    let denominator =
        C64::new(omega - p.omega_c, p.kappa / 2.0) * fundamental - p.g1_coll * p.g1_coll;
    if denominator.norm() == 0.0 {
        return Err(Error::DivergentResponse { omega });
    }
    Ok(-I * (p.kappa / 2.0) * fundamental / denominator)
}

fn evaluate<T>(grid: &SpectralGrid, f: impl Fn(f64) -> Result<T>) -> Result<Vec<T>> {
    grid.iter().map(f).collect()
}

pub fn transfer_function(p: &SystemParams, grid: &SpectralGrid) -> Result<TransferFunction> {
    p.validate()?;
    TransferFunction::new(*grid, evaluate(grid, |w| transmission_transfer(p, w))?)
}

pub fn reflection_function(p: &SystemParams, grid: &SpectralGrid) -> Result<TransferFunction> {
    p.validate()?;
    TransferFunction::new(*grid, evaluate(grid, |w| reflection_transfer(p, w))?)
}

/// `T(ω) = |t(ω)|²` with the stored `f_pu`.
pub fn transmission_spectrum(p: &SystemParams, grid: &SpectralGrid) -> Result<Spectrum> {
    Ok(transfer_function(p, grid)?.power())
}

pub fn reflection_spectrum(p: &SystemParams, grid: &SpectralGrid) -> Result<Spectrum> {
    Ok(reflection_function(p, grid)?.power())
}

/// Linear absorption on a grid, see [`absorption_linear`].
pub fn absorption_spectrum(p: &SystemParams, grid: &SpectralGrid) -> Result<Spectrum> {
    p.validate()?;
    Spectrum::new(
        *grid,
        grid.iter().map(|w| absorption_linear(p, w)).collect(),
    )
}

/// Differential transmission `ΔT = T(f_pu) − T(0)`.
pub fn pump_probe_spectrum(p: &SystemParams, grid: &SpectralGrid) -> Result<Spectrum> {
    p.validate()?;
    let unpumped = p.unpumped();
    let values = evaluate(grid, |w| {
        Ok(transmission_transfer(p, w)?.norm_sqr()
            - transmission_transfer(&unpumped, w)?.norm_sqr())
    })?;
    Spectrum::new(*grid, values)
}

/// Linear absorption of the harmonic cavity-molecule system,
/// `G₁²γ_mκ/2 / |(ω − ω₀ + iγ_m/2)(ω − ω_c + iκ/2) − G₁²|²`.
///
/// Pump fraction and anharmonicities do not enter.
pub fn absorption_linear(p: &SystemParams, omega: f64) -> f64 {
    let g2 = p.g1_coll * p.g1_coll;
    let numerator = g2 * p.gamma_m * p.kappa / 2.0;
    if numerator == 0.0 {
        return 0.0;
    }
    let denominator = C64::new(omega - p.omega_0, p.gamma_m / 2.0)
        * C64::new(omega - p.omega_c, p.kappa / 2.0)
        - g2;
    numerator / denominator.norm_sqr()
}

/// Why a polariton absorption estimate may be unreliable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValidityWarning {
    /// Largest polariton linewidth over the Rabi splitting exceeds
    /// [`STRONG_COUPLING_RATIO`].
    WeakSplitting { ratio: f64 },
    /// `|(γ_m − κ)(ω_c − ω₀)|/Ω_R²` exceeds [`STRONG_COUPLING_RATIO`], so the
    /// two polariton linewidths are not close to `(γ_m + κ)/2`.
    UnequalLinewidths { ratio: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolaritonAbsorption {
    pub lp: f64,
    pub up: f64,
    pub warnings: Vec<ValidityWarning>,
}

impl PolaritonAbsorption {
    pub fn sum(&self) -> f64 {
        self.lp + self.up
    }
}

/// Absorption at the two polariton frequencies estimated from their complex
/// poles: `A(ω_LP) = 2G₁²γ_mκ / [γ_LP²(Ω_R² + γ_UP²/4)]` and its partner.
///
/// `res` should hold the unpumped harmonic poles, e.g.
/// [`crate::modes::poles`] of [`SystemParams::linear_reference`].
pub fn polariton_absorption(p: &SystemParams, res: &ResonanceSet) -> Result<PolaritonAbsorption> {
    let splitting = res.rabi_splitting();
    if !(splitting > 0.0) {
        return Err(Error::DegenerateResonances { splitting });
    }
    let gamma_lp = res.linewidth(Label::Lp);
    let gamma_up = res.linewidth(Label::Up);
    if !(gamma_lp > 0.0 && gamma_up > 0.0) {
        return Err(Error::OutsideValidity(
            "polariton linewidths must be positive",
        ));
    }
    let scale = 2.0 * p.g1_coll * p.g1_coll * p.gamma_m * p.kappa;
    let omega2 = splitting * splitting;
    let mut warnings = Vec::new();
    let ratio = gamma_lp.max(gamma_up) / splitting;
    if ratio > STRONG_COUPLING_RATIO {
        warnings.push(ValidityWarning::WeakSplitting { ratio });
    }
    Ok(PolaritonAbsorption {
        lp: scale / (gamma_lp * gamma_lp * (omega2 + gamma_up * gamma_up / 4.0)),
        up: scale / (gamma_up * gamma_up * (omega2 + gamma_lp * gamma_lp / 4.0)),
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionEstimate {
    pub value: f64,
    pub warnings: Vec<ValidityWarning>,
}

/// Strong-coupling estimate of `A(ω_LP) + A(ω_UP)`:
/// `2G₁²γ_mκ/Ω_R² · (1/γ_LP² + 1/γ_UP²)` with `Ω_R = 2√(G₁² + (ω_c − ω₀)²/4)`
/// and both linewidths set to `(γ_m + κ)/2`.
pub fn absorption_sum_estimate(p: &SystemParams) -> Result<AbsorptionEstimate> {
    p.validate()?;
    let shared = (p.gamma_m + p.kappa) / 2.0;
    if shared == 0.0 {
        return Err(Error::OutsideValidity(
            "estimate diverges for vanishing polariton linewidth",
        ));
    }
    let detuning = p.detuning();
    let splitting = 2.0 * libm::sqrt(p.g1_coll * p.g1_coll + detuning * detuning / 4.0);
    if splitting == 0.0 {
        return Err(Error::DegenerateResonances { splitting });
    }
    let omega2 = splitting * splitting;
    let value =
        2.0 * p.g1_coll * p.g1_coll * p.gamma_m * p.kappa / omega2 * (2.0 / (shared * shared));

    let mut warnings = Vec::new();
    let ratio = shared / splitting;
    if ratio > STRONG_COUPLING_RATIO {
        warnings.push(ValidityWarning::WeakSplitting { ratio });
    }
    let asymmetry = ((p.gamma_m - p.kappa) * detuning).abs() / omega2;
    if asymmetry > STRONG_COUPLING_RATIO {
        warnings.push(ValidityWarning::UnequalLinewidths { ratio: asymmetry });
    }
    Ok(AbsorptionEstimate { value, warnings })
}

/// Approximate absorption at the dark-state frequency ω₀,
/// `G₁²γ_mκ/2 / (G₁⁴ + G₁²κγ_m/2 + γ_m²(ω₀ − ω_c)²/4)`.
///
/// Compared with the exact linear absorption at ω₀ this drops a `κ²γ_m²/16`
/// term from the denominator.
pub fn dark_state_absorption(p: &SystemParams) -> f64 {
    let g2 = p.g1_coll * p.g1_coll;
    let numerator = g2 * p.gamma_m * p.kappa / 2.0;
    if numerator == 0.0 {
        return 0.0;
    }
    let detuning = p.detuning();
    numerator
        / (g2 * g2
            + g2 * p.kappa * p.gamma_m / 2.0
            + p.gamma_m * p.gamma_m * detuning * detuning / 4.0)
}

/// Pump-probe polarization kernels (polarization per unit driving field).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationComponents {
    /// Unpumped linear response.
    pub p_np: C64,
    /// Ground-state bleach.
    pub p_gsb: C64,
    /// Stimulated emission.
    pub p_se: C64,
    /// Excited-state absorption (the whole 1→2 component).
    pub p_esa: C64,
}

impl PolarizationComponents {
    /// The 0↔1 component, `p_np + p_gsb + p_se = (1 − 2f_pu) p_np`.
    pub fn p_01(&self) -> C64 {
        self.p_np + self.p_gsb + self.p_se
    }

    pub fn p_12(&self) -> C64 {
        self.p_esa
    }

    pub fn total(&self) -> C64 {
        self.p_01() + self.p_12()
    }
}

/// Undamped polarization kernels, regularized by [`POLE_REGULARIZATION`]:
///
/// ```text
/// p_np  = −i G₁² / (ω − ω₀ + iε)
/// p_gsb = p_se = −f_pu · p_np
/// p_esa = −i 2f_pu (G₁ + G₃)² / (ω − ω₁₂ + iε)
/// ```
pub fn polarization_components(p: &SystemParams, omega: f64) -> PolarizationComponents {
    let d = p.derived();
    let p_np = -I * (p.g1_coll * p.g1_coll) / C64::new(omega - p.omega_0, POLE_REGULARIZATION);
    let p_gsb = p_np * -p.f_pu;
    let g2 = p.g1_coll + d.g3_coll;
    let p_esa = -I * (2.0 * p.f_pu * g2 * g2) / C64::new(omega - d.omega_12, POLE_REGULARIZATION);
    PolarizationComponents {
        p_np,
        p_gsb,
        p_se: p_gsb,
        p_esa,
    }
}
