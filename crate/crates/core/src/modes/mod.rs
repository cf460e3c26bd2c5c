//! Transient mode-coupling matrices and their resonances.
//!
//! In the basis (cavity photon, 0↔1 polarization, 1→2 polarization) the pumped
//! system is described by a 3×3 complex matrix whose eigenvalues coincide with
//! the poles of the transmission transfer function. The lossless variant
//! neglects molecular damping; the damped variant keeps it but needs
//! `g3_ratio = 0` and `κ ≠ 3γ_m`.

mod cubic;

use core::fmt;

use num_complex::Complex64 as C64;

use crate::response::denominator_poly;
use crate::{Error, Result, SystemParams};

pub use cubic::{cubic_roots, sort_by_real, Cubic};

/// Minimum `|κ − 3γ_m|` accepted by [`build_h_damped`].
pub const DAMPED_LINEWIDTH_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// No molecular damping on the diagonal; `h23 = h32 = 0`.
    Lossless,
    /// Molecular damping included (requires `g3_ratio = 0`).
    Damped,
}

impl MatrixKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::Lossless => "lossless",
            MatrixKind::Damped => "damped",
        }
    }
}

/// 3×3 mode-coupling matrix in cm⁻¹, indices (photon, P₀↔₁, P₁→₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMatrix {
    pub entries: [[C64; 3]; 3],
    pub kind: MatrixKind,
}

impl ModeMatrix {
    pub fn diagonal(d: [C64; 3]) -> ModeMatrix {
        let z = C64::new(0.0, 0.0);
        ModeMatrix {
            entries: [[d[0], z, z], [z, d[1], z], [z, z, d[2]]],
            kind: MatrixKind::Lossless,
        }
    }

    pub fn trace(&self) -> C64 {
        self.entries[0][0] + self.entries[1][1] + self.entries[2][2]
    }

    /// `det(λI − M)` expanded about the mean real part of the diagonal.
    pub fn characteristic(&self) -> Cubic {
        let m = &self.entries;
        let center = (m[0][0].re + m[1][1].re + m[2][2].re) / 3.0;
        let a = m[0][0] - center;
        let b = m[1][1] - center;
        let c = m[2][2] - center;
        let p12 = m[0][1] * m[1][0];
        let p13 = m[0][2] * m[2][0];
        let p23 = m[1][2] * m[2][1];
        let minors = a * b + b * c + c * a - p12 - p13 - p23;
        let det = a * b * c - a * p23 - b * p13 - c * p12
            + m[0][1] * m[1][2] * m[2][0]
            + m[0][2] * m[1][0] * m[2][1];
        Cubic {
            center,
            coeffs: [-det, minors, -(a + b + c), C64::new(1.0, 0.0)],
        }
    }
}

/// Lossless mode-coupling matrix of the pumped system.
///
/// `h12 = G₁√(1 − 2f_pu)` continues to `i·G₁√(2f_pu − 1)` above half
/// inversion; `h13 = (G₁ + G₃)√(2f_pu)`.
pub fn build_h(p: &SystemParams) -> ModeMatrix {
    let d = p.derived();
    let zero = C64::new(0.0, 0.0);
    let x = 1.0 - 2.0 * p.f_pu;
    let h12 = if x >= 0.0 {
        C64::new(p.g1_coll * libm::sqrt(x), 0.0)
    } else {
        C64::new(0.0, p.g1_coll * libm::sqrt(-x))
    };
    let h13 = C64::new((p.g1_coll + d.g3_coll) * libm::sqrt(2.0 * p.f_pu), 0.0);
    ModeMatrix {
        entries: [
            [C64::new(p.omega_c, -p.kappa / 2.0), h12, h13],
            [h12, C64::new(p.omega_0, 0.0), zero],
            [h13, zero, C64::new(d.omega_12, 0.0)],
        ],
        kind: MatrixKind::Lossless,
    }
}

/// Mode-coupling matrix with molecular damping, for `g3_ratio = 0`.
///
/// With `q = γ_m/(κ − 3γ_m)`, `s = 2f_pu(κ − γ_m)/(κ − 3γ_m)` and
/// `u = √(γ_m/(2κ − 6γ_m))·(ω_c − ω₁₂)`:
///
/// ```text
/// h12 = √(G₁²(1 − s) − u²) − iu     h21 = √(G₁²(1 − s) − u²) + iu
/// h13 = −i√(2f_pu)·G₁              h31 = +i√(2f_pu)·G₁
/// h23 = h32 = 2√f_pu·G₁·√q
/// ```
///
/// Square roots take the principal branch, so `κ < 3γ_m` and `f_pu > 1/2`
/// are covered. The characteristic polynomial equals the transfer-function
/// denominator identically.
pub fn build_h_damped(p: &SystemParams) -> Result<ModeMatrix> {
    p.validate()?;
    if p.g3_ratio != 0.0 {
        return Err(Error::UnsupportedElectricalAnharmonicity {
            g3_ratio: p.g3_ratio,
        });
    }
    let split = p.kappa - 3.0 * p.gamma_m;
    if split.abs() < DAMPED_LINEWIDTH_GUARD {
        return Err(Error::DegenerateLinewidths { difference: split });
    }
    let d = p.derived();
    let g1 = p.g1_coll;
    let i = C64::new(0.0, 1.0);
    let real = |x: f64| C64::new(x, 0.0);

    let q = p.gamma_m / split;
    let s = 2.0 * p.f_pu * (p.kappa - p.gamma_m) / split;
    let u = real(p.gamma_m / (2.0 * split)).sqrt() * (p.omega_c - d.omega_12);
    let x = (real(g1 * g1 * (1.0 - s)) - u * u).sqrt();
    let c13 = libm::sqrt(2.0 * p.f_pu) * g1;
    let h23 = real(q).sqrt() * (2.0 * libm::sqrt(p.f_pu) * g1);

    Ok(ModeMatrix {
        entries: [
            [C64::new(p.omega_c, -p.kappa / 2.0), x - i * u, -i * c13],
            [x + i * u, C64::new(p.omega_0, -d.gamma_1), h23],
            [i * c13, h23, C64::new(d.omega_12, -d.gamma_3)],
        ],
        kind: MatrixKind::Damped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Lp,
    Mid,
    Up,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Lp, Label::Mid, Label::Up];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Lp => "LP",
            Label::Mid => "MID",
            Label::Up => "UP",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Three complex resonances `λ = ω − iγ/2`, labelled LP / MID / UP by
/// ascending real part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceSet {
    poles: [C64; 3],
}

impl ResonanceSet {
    pub fn new(mut poles: [C64; 3]) -> ResonanceSet {
        sort_by_real(&mut poles);
        ResonanceSet { poles }
    }

    pub fn poles(&self) -> &[C64; 3] {
        &self.poles
    }

    pub fn get(&self, label: Label) -> C64 {
        self.poles[label as usize]
    }

    pub fn lp(&self) -> C64 {
        self.poles[0]
    }

    pub fn mid(&self) -> C64 {
        self.poles[1]
    }

    pub fn up(&self) -> C64 {
        self.poles[2]
    }

    /// Full width at half maximum, `−2·Im λ`.
    pub fn linewidth(&self, label: Label) -> f64 {
        -2.0 * self.get(label).im
    }

    /// `Ω_R = Re λ_UP − Re λ_LP`.
    pub fn rabi_splitting(&self) -> f64 {
        self.up().re - self.lp().re
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, C64)> + '_ {
        Label::ALL.into_iter().zip(self.poles.iter().copied())
    }

    pub fn sum(&self) -> C64 {
        self.poles.iter().sum()
    }
}

/// Roots of `det(m − λI)`.
pub fn eigenvalues(m: &ModeMatrix) -> Result<ResonanceSet> {
    Ok(ResonanceSet::new(m.characteristic().roots()?))
}

/// Poles of the transmission transfer function.
pub fn poles(p: &SystemParams) -> Result<ResonanceSet> {
    p.validate()?;
    Ok(ResonanceSet::new(denominator_poly(p).roots()?))
}

/// Smallest, over the six pairings, of the largest pairwise distance.
pub fn pairing_distance(a: &ResonanceSet, b: &ResonanceSet) -> f64 {
    const PERMUTATIONS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let (x, y) = (a.poles(), b.poles());
    PERMUTATIONS
        .iter()
        .map(|perm| {
            (0..3)
                .map(|k| (x[k] - y[perm[k]]).norm())
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Distance between the transfer-function poles and the eigenvalues of the
/// requested mode-coupling matrix.
///
/// The lossless matrix reproduces the poles only without molecular damping,
/// so `gamma_m` must be zero for [`MatrixKind::Lossless`].
pub fn match_poles_eigenvalues(p: &SystemParams, kind: MatrixKind) -> Result<f64> {
    let matrix = match kind {
        MatrixKind::Lossless => {
            if p.gamma_m != 0.0 {
                return Err(Error::Precondition(
                    "lossless matrix comparison requires gamma_m = 0",
                ));
            }
            build_h(p)
        }
        MatrixKind::Damped => build_h_damped(p)?,
    };
    Ok(pairing_distance(&poles(p)?, &eigenvalues(&matrix)?))
}

/// Rabi splitting of the unpumped system from its transfer-function poles.
///
/// At `f_pu = 0` the 1→2 pole `ω₁₂ − iγ₃` decouples exactly; the splitting is
/// the real-part gap between the two remaining poles.
pub fn rabi_splitting(p: &SystemParams) -> Result<f64> {
    if p.f_pu != 0.0 {
        return Err(Error::Precondition("rabi_splitting requires f_pu = 0"));
    }
    let res = poles(p)?;
    let d = p.derived();
    let bare = C64::new(d.omega_12, -d.gamma_3);
    let decoupled = (0..3)
        .min_by(|&i, &j| {
            (res.poles()[i] - bare)
                .norm()
                .total_cmp(&(res.poles()[j] - bare).norm())
        })
        .expect("three poles");
    let mut rest = res
        .poles()
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != decoupled);
    let (_, lo) = rest.next().expect("two poles remain");
    let (_, hi) = rest.next().expect("two poles remain");
    Ok((hi.re - lo.re).abs())
}
