//! Scalar root finding and minimisation on a bracket.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]`; requires a sign change. Stops when the bracket is
/// narrower than `xtol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::NoBracket(format!(
            "f({lo}) = {flo:e}, f({hi}) = {fhi:e} have the same sign"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scan `[lo, hi]` in `n` equal pieces for the first sign change of `f`,
/// then bisect it.
pub fn first_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, n: usize, xtol: f64) -> Result<f64> {
    let mut a = lo;
    let mut fa = f(a);
    for k in 1..=n {
        let b = lo + (hi - lo) * k as f64 / n as f64;
        let fb = f(b);
        if fa == 0.0 {
            return Ok(a);
        }
        if fa.signum() != fb.signum() {
            return bisect(&mut f, a, b, xtol);
        }
        a = b;
        fa = fb;
    }
    Err(Error::NoBracket(format!("no sign change on [{lo}, {hi}]")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisect_rejects_unbracketed() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn first_root_picks_smallest() {
        let r = first_root(|x: f64| x.sin(), 0.5, 10.0, 100, 1e-12).unwrap();
        assert!((r - std::f64::consts::PI).abs() < 1e-11);
    }
}
