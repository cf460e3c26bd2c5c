//! Closed-form cubic roots with Newton polishing.

use core::cmp::Ordering;

use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Cubic `c3 x³ + c2 x² + c1 x + c0` in the shifted variable `x = ω − center`.
///
/// Physical polynomials here have roots near 2000 cm⁻¹ but spread over only a
/// few tens of cm⁻¹; expanding about a nearby center keeps the coefficients
/// small and evaluation free of cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic {
    pub center: f64,
    /// Coefficients `[c0, c1, c2, c3]`.
    pub coeffs: [C64; 4],
}

impl Cubic {
    /// Monic cubic with the given roots.
    pub fn from_roots(center: f64, roots: [C64; 3]) -> Cubic {
        let [a, b, c] = roots.map(|r| r - center);
        Cubic {
            center,
            coeffs: [
                -(a * b * c),
                a * b + b * c + c * a,
                -(a + b + c),
                C64::new(1.0, 0.0),
            ],
        }
    }

    pub fn eval(&self, omega: f64) -> C64 {
        self.eval_shifted(C64::new(omega - self.center, 0.0))
    }

    pub fn eval_complex(&self, omega: C64) -> C64 {
        self.eval_shifted(omega - self.center)
    }

    fn eval_shifted(&self, x: C64) -> C64 {
        let [c0, c1, c2, c3] = self.coeffs;
        ((c3 * x + c2) * x + c1) * x + c0
    }

    /// Roots in absolute frequency, ascending real part.
    pub fn roots(&self) -> Result<[C64; 3]> {
        let [c0, c1, c2, c3] = self.coeffs;
        let mut roots = cubic_roots(c3, c2, c1, c0)?.map(|r| r + self.center);
        sort_by_real(&mut roots);
        Ok(roots)
    }
}

/// Ascending real part, ties broken by ascending imaginary part.
pub fn sort_by_real(roots: &mut [C64]) {
    roots.sort_by(|a, b| match a.re.total_cmp(&b.re) {
        Ordering::Equal => a.im.total_cmp(&b.im),
        other => other,
    });
}

/// Roots of `c3 x³ + c2 x² + c1 x + c0`, ascending by real part.
///
/// Cardano's formula on the depressed cubic, then guarded Newton steps on the
/// original polynomial (a step is kept only if it lowers `|p(x)|`).
pub fn cubic_roots(c3: C64, c2: C64, c1: C64, c0: C64) -> Result<[C64; 3]> {
    if c3 == C64::new(0.0, 0.0) {
        return Err(Error::LeadingZero);
    }
    let a = c2 / c3;
    let b = c1 / c3;
    let c = c0 / c3;
    let shift = -a / 3.0;

    // y³ + p y + q = 0 with x = y + shift.
    let p = b - a * a / 3.0;
    let q = a * a * a * (2.0 / 27.0) - a * b / 3.0 + c;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let w_plus = -q / 2.0 + disc;
    let w_minus = -q / 2.0 - disc;
    let w = if w_plus.norm() >= w_minus.norm() {
        w_plus
    } else {
        w_minus
    };

    let mut roots = if w.norm() == 0.0 {
        [shift; 3]
    } else {
        let u = w.cbrt();
        let v = -p / (3.0 * u);
        let rot = C64::new(-0.5, libm::sqrt(3.0) / 2.0);
        let rot2 = rot.conj();
        [u + v, u * rot + v * rot2, u * rot2 + v * rot].map(|y| y + shift)
    };

    let eval = |x: C64| ((x + a) * x + b) * x + c;
    let slope = |x: C64| (3.0 * x + 2.0 * a) * x + b;
    for root in roots.iter_mut() {
        for _ in 0..4 {
            let f = eval(*root);
            let df = slope(*root);
            if f.norm() == 0.0 || df.norm() == 0.0 {
                break;
            }
            let next = *root - f / df;
            if eval(next).norm() < f.norm() {
                *root = next;
            } else {
                break;
            }
        }
    }
    sort_by_real(&mut roots);
    Ok(roots)
}
