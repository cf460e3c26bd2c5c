use alloc::vec::Vec;

use crate::modes::rabi_splitting;
use crate::response::{transmission_spectrum, Spectrum};
use crate::{Error, Result, SpectralGrid, SystemParams};

/// Default absolute height below which local maxima are ignored.
pub const PEAK_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Refined position, cm⁻¹.
    pub frequency: f64,
    /// Refined height.
    pub height: f64,
    /// Whether the three-point parabola moved the estimate off the grid point.
    pub refined: bool,
}

/// Peaks in ascending frequency.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeakList {
    peaks: Vec<Peak>,
}

impl PeakList {
    pub fn as_slice(&self) -> &[Peak] {
        &self.peaks
    }

    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Peak> {
        self.peaks.iter()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.frequency).collect()
    }

    /// Tallest peak whose refined frequency lies in `[lo, hi]`.
    pub fn highest_in(&self, lo: f64, hi: f64) -> Option<Peak> {
        self.peaks
            .iter()
            .filter(|p| (lo..=hi).contains(&p.frequency))
            .max_by(|a, b| a.height.total_cmp(&b.height))
            .copied()
    }

    /// The `n` tallest peaks, returned in ascending frequency.
    pub fn tallest(&self, n: usize) -> Vec<Peak> {
        let mut by_height = self.peaks.clone();
        by_height.sort_by(|a, b| b.height.total_cmp(&a.height));
        by_height.truncate(n);
        by_height.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        by_height
    }
}

/// Interior strict local maxima above `threshold`, each refined by the
/// parabola through it and its two neighbours.
pub fn find_peaks(s: &Spectrum, threshold: f64) -> PeakList {
    let v = s.values();
    let grid = s.grid();
    let mut peaks = Vec::new();
    for i in 1..v.len().saturating_sub(1) {
        let (left, mid, right) = (v[i - 1], v[i], v[i + 1]);
        if !(mid > left && mid > right && mid > threshold) {
            continue;
        }
        let curvature = left - 2.0 * mid + right;
        let offset = 0.5 * (left - right) / curvature;
        let (offset, height) = if offset.is_finite() {
            (offset, mid - 0.25 * (left - right) * offset)
        } else {
            (0.0, mid)
        };
        peaks.push(Peak {
            frequency: grid.at(i) + offset * grid.step(),
            height,
            refined: offset != 0.0,
        });
    }
    PeakList { peaks }
}

/// Red-shift of the upper polariton under pumping: the tallest `T⁰` peak
/// minus the tallest `T^pu` peak within `[ω₀ + Ω_R/4, ω₀ + Ω_R]`.
///
/// Positive values mean the pumped UP sits at lower frequency.
pub fn up_redshift(p: &SystemParams, grid: &SpectralGrid) -> Result<f64> {
    p.validate()?;
    let linear = p.unpumped();
    let splitting = rabi_splitting(&linear)?;
    let (lo, hi) = (p.omega_0 + splitting / 4.0, p.omega_0 + splitting);
    let locate = |params: &SystemParams| -> Result<f64> {
        find_peaks(&transmission_spectrum(params, grid)?, PEAK_THRESHOLD)
            .highest_in(lo, hi)
            .map(|peak| peak.frequency)
            .ok_or(Error::MissingPeak { lo, hi })
    };
    Ok(locate(&linear)? - locate(p)?)
}
