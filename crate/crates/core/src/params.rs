//! Physical parameter model, derived rates and the spectral grid.
//!
//! The response depends on the number of molecules `N` only through the
//! collective coupling `G₁ = g₁√N`, its electrical-anharmonic partner
//! `G₃ = (g₃/g₁)·G₁`, and the pumped fraction `f_pu`, so `N` is not stored.

use core::fmt;

use crate::{Error, Result};

/// Internal time unit `1/(2πc · 1 cm⁻¹)` in picoseconds.
///
/// With frequencies in cm⁻¹ and times in this unit, `ω·t` is a phase in radians.
pub const INTERNAL_TIME_UNIT_PS: f64 =
    1.0e12 / (2.0 * core::f64::consts::PI * SPEED_OF_LIGHT_CM_PER_S);

/// Speed of light in cm/s.
pub const SPEED_OF_LIGHT_CM_PER_S: f64 = 2.997_924_58e10;

pub fn ps_to_internal(t_ps: f64) -> f64 {
    t_ps / INTERNAL_TIME_UNIT_PS
}

pub fn internal_to_ps(t: f64) -> f64 {
    t * INTERNAL_TIME_UNIT_PS
}

/// Names of the eight model parameters, keyed as in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Omega0,
    OmegaC,
    Kappa,
    GammaM,
    Delta,
    G1Coll,
    G3Ratio,
    FPu,
}

impl Field {
    pub const ALL: [Field; 8] = [
        Field::Omega0,
        Field::OmegaC,
        Field::Kappa,
        Field::GammaM,
        Field::Delta,
        Field::G1Coll,
        Field::G3Ratio,
        Field::FPu,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Field::Omega0 => "omega_0_cm1",
            Field::OmegaC => "omega_c_cm1",
            Field::Kappa => "kappa_cm1",
            Field::GammaM => "gamma_m_cm1",
            Field::Delta => "delta_cm1",
            Field::G1Coll => "g1_coll_cm1",
            Field::G3Ratio => "g3_ratio",
            Field::FPu => "f_pu",
        }
    }

    pub fn from_key(key: &str) -> Option<Field> {
        Field::ALL.into_iter().find(|f| f.key() == key)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// All physical constants of the model. Frequencies and linewidths in cm⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Fundamental (0→1) vibrational frequency.
    pub omega_0: f64,
    /// Cavity mode frequency.
    pub omega_c: f64,
    /// Total cavity linewidth κ.
    pub kappa: f64,
    /// Molecular FWHM γ_m.
    pub gamma_m: f64,
    /// Mechanical anharmonicity Δ; the 1→2 transition sits at `omega_0 - 2Δ`.
    pub delta: f64,
    /// Collective coupling G₁ = g₁√N.
    pub g1_coll: f64,
    /// Electrical anharmonicity g₃/g₁ (μ₁→₂ = √2 μ₀→₁ (1 + g₃/g₁)).
    pub g3_ratio: f64,
    /// Fraction of molecules in the first excited state at the probe delay.
    pub f_pu: f64,
}

/// Rates that follow from [`SystemParams`] by fixed definitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    /// Damping of the 0→1 polarization, γ_m/2.
    pub gamma_1: f64,
    /// Damping of the 1→2 polarization, 3γ_m/2.
    pub gamma_3: f64,
    /// 1→2 transition frequency ω₀ − 2Δ.
    pub omega_12: f64,
    /// Collective electrical-anharmonic coupling G₃ = (g₃/g₁)·G₁.
    pub g3_coll: f64,
}

impl SystemParams {
    /// W(CO)₆ in hexane in a resonant Fabry-Perot cavity.
    pub const PAPER_DEFAULTS: SystemParams = SystemParams {
        omega_0: 1983.0,
        omega_c: 1983.0,
        kappa: 11.0,
        gamma_m: 3.0,
        delta: 7.5,
        g1_coll: 19.0,
        g3_ratio: -0.25,
        f_pu: 0.075,
    };

    pub fn paper_defaults() -> SystemParams {
        Self::PAPER_DEFAULTS
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        let checks = [
            (Field::Omega0, positive(self.omega_0)),
            (Field::OmegaC, positive(self.omega_c)),
            (Field::Kappa, nonneg(self.kappa)),
            (Field::GammaM, nonneg(self.gamma_m)),
            (Field::Delta, self.delta.is_finite()),
            (Field::G1Coll, nonneg(self.g1_coll)),
            (Field::G3Ratio, self.g3_ratio.is_finite()),
            (Field::FPu, nonneg(self.f_pu) && self.f_pu <= 1.0),
        ];
        match checks.into_iter().find(|(_, ok)| !ok) {
            Some((field, _)) => Err(Error::OutOfRange(field)),
            None => Ok(()),
        }
    }

    pub fn derived(&self) -> DerivedRates {
        DerivedRates {
            gamma_1: self.gamma_m / 2.0,
            gamma_3: 3.0 * (self.gamma_m / 2.0),
            omega_12: self.omega_0 - 2.0 * self.delta,
            g3_coll: self.g3_ratio * self.g1_coll,
        }
    }

    /// Cavity detuning ω_c − ω₀.
    pub fn detuning(&self) -> f64 {
        self.omega_c - self.omega_0
    }

    /// Cavity photon lifetime 1/κ in picoseconds (infinite for κ = 0).
    pub fn cavity_lifetime_ps(&self) -> f64 {
        internal_to_ps(1.0 / self.kappa)
    }

    pub fn get(&self, field: Field) -> f64 {
        match field {
            Field::Omega0 => self.omega_0,
            Field::OmegaC => self.omega_c,
            Field::Kappa => self.kappa,
            Field::GammaM => self.gamma_m,
            Field::Delta => self.delta,
            Field::G1Coll => self.g1_coll,
            Field::G3Ratio => self.g3_ratio,
            Field::FPu => self.f_pu,
        }
    }

    pub fn set(&mut self, field: Field, value: f64) {
        let slot = match field {
            Field::Omega0 => &mut self.omega_0,
            Field::OmegaC => &mut self.omega_c,
            Field::Kappa => &mut self.kappa,
            Field::GammaM => &mut self.gamma_m,
            Field::Delta => &mut self.delta,
            Field::G1Coll => &mut self.g1_coll,
            Field::G3Ratio => &mut self.g3_ratio,
            Field::FPu => &mut self.f_pu,
        };
        *slot = value;
    }

    /// Copy with one field replaced.
    pub fn with(mut self, field: Field, value: f64) -> SystemParams {
        self.set(field, value);
        self
    }

    /// The unpumped system (`f_pu = 0`).
    pub fn unpumped(self) -> SystemParams {
        self.with(Field::FPu, 0.0)
    }

    /// The harmonic linear model used for absorption: no pump and no
    /// anharmonicity. Its three poles are always ordered LP < dark < UP.
    pub fn linear_reference(self) -> SystemParams {
        SystemParams {
            delta: 0.0,
            g3_ratio: 0.0,
            f_pu: 0.0,
            ..self
        }
    }

    /// Collective coupling from a single-molecule coupling and molecule count.
    pub fn collective_coupling(g1: f64, n_molecules: f64) -> f64 {
        g1 * libm::sqrt(n_molecules)
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::PAPER_DEFAULTS
    }
}

/// Uniform frequency grid `min, min + step, ...` up to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    min: f64,
    max: f64,
    step: f64,
    len: usize,
}

impl SpectralGrid {
    pub fn new(min: f64, max: f64, step: f64) -> Result<SpectralGrid> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return Err(Error::InvalidGrid("bounds and step must be finite"));
        }
        if min >= max {
            return Err(Error::InvalidGrid("omega_min must be below omega_max"));
        }
        if step <= 0.0 {
            return Err(Error::InvalidGrid("step must be positive"));
        }
        // Tolerate representation error in (max - min)/step, e.g. 170/0.01.
        let span = (max - min) / step;
        let len = libm::floor(span + 1e-9 * span.max(1.0)) as usize + 1;
        Ok(SpectralGrid {
            min,
            max,
            step,
            len,
        })
    }

    /// 1900–2070 cm⁻¹ at 0.01 cm⁻¹.
    pub fn paper() -> SpectralGrid {
        SpectralGrid::new(1900.0, 2070.0, 0.01).expect("constant grid is valid")
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn at(&self, index: usize) -> f64 {
        self.min + index as f64 * self.step
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.at(i))
    }

    /// Index of the grid point nearest to `omega`, clamped to the grid.
    pub fn nearest_index(&self, omega: f64) -> usize {
        let x = libm::round((omega - self.min) / self.step);
        if x <= 0.0 {
            0
        } else {
            (x as usize).min(self.len - 1)
        }
    }
}
