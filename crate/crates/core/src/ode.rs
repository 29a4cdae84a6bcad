//! Embedded Dormand–Prince 5(4) integrator with PI-free step control.
//!
//! The integrator advances between caller-chosen output abscissae, clipping
//! the last internal step so every output lands exactly on its grid point.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order weights minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Adaptive integrator state for an autonomous-or-not system of fixed size.
pub struct DormandPrince<const N: usize> {
    pub rtol: f64,
    pub atol: f64,
    /// Current step size suggestion (signed, follows integration direction).
    pub h: f64,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl<const N: usize> DormandPrince<N> {
    pub fn new(tol: f64, h0: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            h: h0,
            steps_accepted: 0,
            steps_rejected: 0,
        }
    }

    /// Advance `y` from `s` to `s_end`. Returns the state at `s_end`.
    pub fn advance<F>(&mut self, f: &F, mut s: f64, mut y: [f64; N], s_end: f64) -> Result<[f64; N]>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let dir = (s_end - s).signum();
        if dir == 0.0 {
            return Ok(y);
        }
        if self.h * dir <= 0.0 {
            self.h = -self.h;
        }
        // Below a few ulps the error estimate is pure rounding noise and no
        // step size can meet the request.
        if self.rtol < 10.0 * f64::EPSILON {
            return Err(Error::StepUnderflow { s, h: 0.0 });
        }
        let mut k1 = f(s, &y);
        loop {
            let remaining = s_end - s;
            if remaining * dir <= 0.0 {
                return Ok(y);
            }
            let last = self.h.abs() >= remaining.abs();
            let h = if last { remaining } else { self.h };
            if h.abs() <= 1e-14 * s.abs().max(1.0) && !last {
                return Err(Error::StepUnderflow { s, h: h.abs() });
            }

            let k2 = f(s + C2 * h, &axpy(&y, &[(A21, &k1)], h));
            let k3 = f(s + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
            let k4 = f(s + C4 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
            let k5 = f(
                s + C5 * h,
                &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
            );
            let k6 = f(
                s + h,
                &axpy(
                    &y,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                    h,
                ),
            );
            let y_new = axpy(
                &y,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
                h,
            );
            let k7 = f(s + h, &y_new);

            let mut err = 0.0f64;
            for i in 0..N {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((e / sc).abs());
            }

            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                s = if last { s_end } else { s + h };
                y = y_new;
                k1 = k7;
                self.steps_accepted += 1;
                // A clipped final step says nothing about the natural step size.
                if !last {
                    self.h = h * factor;
                }
            } else {
                self.steps_rejected += 1;
                self.h = h * factor.min(1.0);
                if self.h.abs() <= 1e-14 * s.abs().max(1.0) {
                    return Err(Error::StepUnderflow { s, h: self.h.abs() });
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_one_period() {
        let f = |_s: f64, y: &[f64; 2]| [y[1], -y[0]];
        let mut dp = DormandPrince::<2>::new(1e-12, 0.1);
        let y = dp
            .advance(&f, 0.0, [1.0, 0.0], 2.0 * std::f64::consts::PI)
            .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10);
        assert!(y[1].abs() < 1e-10);
    }

    #[test]
    fn integrates_backwards() {
        let f = |_s: f64, y: &[f64; 1]| [y[0]];
        let mut dp = DormandPrince::<1>::new(1e-12, 0.1);
        let y = dp.advance(&f, 0.0, [1.0], -1.0).unwrap();
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn underflow_is_reported() {
        // Finite-time blow-up at s = 1.
        let f = |_s: f64, y: &[f64; 1]| [y[0] * y[0]];
        let mut dp = DormandPrince::<1>::new(1e-10, 0.1);
        let r = dp.advance(&f, 0.0, [1.0], 2.0);
        assert!(matches!(r, Err(Error::StepUnderflow { .. })));
    }
}
