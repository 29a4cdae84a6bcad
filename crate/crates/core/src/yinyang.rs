//! The Yin-Yang rotating soliton.
//!
//! The curve through the origin of
//!
//! ```text
//! x' = cos((x² + y²)/2),   y' = sin((x² + y²)/2),   F(0) = 0
//! ```
//!
//! is arclength parametrized, its curvature is `H = x x' + y y' = <F, T>`, and
//! `e^{it} F` solves curve shortening flow. Only `s >= 0` is stored; the other
//! half follows from `F(-s) = -F(s)`.
//!
//! Polar picture: `r(s) = |F(s)|` is strictly increasing for `s > 0` and the
//! lifted angle `θ(s)` is increasing too, so the positive wall is a polar
//! graph `r = R⁺(θ)`, `θ > 0`, and the negative wall is `R⁻(θ) = R⁺(θ - π)`,
//! `θ > π`. The corridor is the region `R⁻(θ) < r < R⁺(θ)` (with `R⁻ = 0` for
//! `θ <= π`).

use crate::curve::PlaneCurve;
use crate::error::{invalid, Error, Result};
use crate::ode::DormandPrince;
use crate::roots::bisect;
use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Smallest `|s|` accepted by corridor queries. Below it the radial chord
/// check is not meaningful (the walls have not yet separated into a corridor).
pub const CORRIDOR_MIN_ABS_S: f64 = 1.0;

/// Base point of the angle lift; `θ(S0) = atan2(y, x)` there.
pub const LIFT_BASE_S: f64 = 1.0;

pub const DEFAULT_STEP: f64 = 0.01;
pub const DEFAULT_TOL: f64 = 1e-12;

#[inline]
pub fn rhs(p: Vec2) -> Vec2 {
    Vec2::from_angle(0.5 * p.norm_sq())
}

#[derive(Debug, Clone)]
pub struct YinYangProfile {
    step: f64,
    tol: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    theta: Vec<f64>,
}

/// Radial chord of the corridor at a negative-wall point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CorridorQuery {
    pub s: f64,
    pub sigma: f64,
    pub width: f64,
}

/// Position of a point relative to the corridor.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CorridorMargin {
    /// Lifted angle assigned to the point (the lift just past the positive wall).
    pub theta: f64,
    /// Signed radial distance to the nearer wall along the ray; positive inside.
    pub radial: f64,
    /// `radial` projected on the normal of that wall, to first order the
    /// signed distance to it. Smaller than `radial` where the wall runs
    /// close to the ray (near the origin).
    pub normal: f64,
    /// Signed angular distance to the nearer wall at the point's radius.
    pub angular: f64,
}

impl CorridorMargin {
    pub fn inside(&self) -> bool {
        self.radial > 0.0 && self.angular > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stencil {
    /// Three-point differences and the plain trapezoid rule.
    Second,
    /// Five-point differences and the end-corrected trapezoid rule.
    Fourth,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Residual {
    pub abs: f64,
    /// `|r| / max(1, |largest term|)`.
    pub rel: f64,
    pub at_s: f64,
}

impl Residual {
    fn record(&mut self, r: f64, scale: f64, s: f64) {
        let rel = r.abs() / scale.abs().max(1.0);
        if rel > self.rel || self.rel.is_nan() {
            self.rel = rel;
            self.at_s = s;
        }
        self.abs = self.abs.max(r.abs());
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub stencil: Stencil,
    pub step: f64,
    pub s_range: (f64, f64),
    /// `|x' - cos(r²/2)|`, `|y' - sin(r²/2)|` with `x'` from differences of positions.
    pub ode: Residual,
    pub frenet_x: Residual,
    pub frenet_y: Residual,
    /// `<F,T>` against the Frenet curvature `x'y'' - x''y'`.
    pub soliton: Residual,
    /// `<F,N> + ∫₀ˢ H²`.
    pub integral: Residual,
    /// `H' - 1 - H <F,N>`.
    pub h_prime: Residual,
}

impl IdentityReport {
    pub fn max_rel(&self) -> f64 {
        [
            self.ode.rel,
            self.frenet_x.rel,
            self.frenet_y.rel,
            self.soliton.rel,
            self.integral.rel,
            self.h_prime.rel,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HInflection {
    pub s_inflection: f64,
    pub s_max_h: f64,
    pub h_max: f64,
    /// Sign changes of `H'` on the sampled half line.
    pub critical_points: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AsymptoticRatios {
    pub s: f64,
    /// `H(s) (3s)^{1/3}`
    pub curvature: f64,
    /// `|F(s)| / (3s)^{1/3}`
    pub radius: f64,
    /// `w(-s) (3s)^{1/3} / π`
    pub width: f64,
    /// `|F(σ) - F(s)| (3s)^{1/3} / 2π` with `θ(σ) = θ(s) + 2π`
    pub full_turn: f64,
}

impl YinYangProfile {
    pub fn integrate(s_max: f64, tol: f64) -> Result<Self> {
        Self::integrate_with_step(s_max, tol, DEFAULT_STEP)
    }

    pub fn integrate_with_step(s_max: f64, tol: f64, step: f64) -> Result<Self> {
        if !(s_max > 0.0 && s_max.is_finite()) {
            return Err(invalid("s_max", format!("must be positive and finite, got {s_max}")));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err(invalid("tol", format!("must lie in (0, 1), got {tol}")));
        }
        if !(step > 0.0 && step <= s_max) {
            return Err(invalid("step", format!("must lie in (0, s_max], got {step}")));
        }
        let n = (s_max / step).round().max(1.0) as usize;
        let f = |_s: f64, u: &[f64; 2]| {
            let t = rhs(Vec2::new(u[0], u[1]));
            [t.x, t.y]
        };
        let mut dp = DormandPrince::<2>::new(tol, step.min(0.01));
        let mut x = Vec::with_capacity(n + 1);
        let mut y = Vec::with_capacity(n + 1);
        x.push(0.0);
        y.push(0.0);
        let mut u = [0.0, 0.0];
        for k in 0..n {
            u = dp.advance(&f, k as f64 * step, u, (k + 1) as f64 * step)?;
            x.push(u[0]);
            y.push(u[1]);
        }
        let theta = lift_angles(&x, &y, step);
        Ok(Self { step, tol, x, y, theta })
    }

    /// Rebuild from stored samples at `s = k·step`, `k = 0..`.
    pub fn from_samples(step: f64, tol: f64, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::Format("profile needs at least two samples".into()));
        }
        if x[0] != 0.0 || y[0] != 0.0 {
            return Err(Error::Format("profile must start at the origin".into()));
        }
        let theta = lift_angles(&x, &y, step);
        Ok(Self { step, tol, x, y, theta })
    }

    /// The same samples restricted to `|s| <= s_max`.
    pub fn truncated(&self, s_max: f64) -> Result<Self> {
        if !(s_max >= self.step) {
            return Err(invalid("s_max", format!("must be at least one step ({}), got {s_max}", self.step)));
        }
        let n = ((s_max / self.step).floor() as usize + 1).min(self.x.len());
        Self::from_samples(self.step, self.tol, self.x[..n].to_vec(), self.y[..n].to_vec())
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Number of stored samples on `[0, s_max]`.
    pub fn half_len(&self) -> usize {
        self.x.len()
    }

    pub fn s_max(&self) -> f64 {
        (self.x.len() - 1) as f64 * self.step
    }

    #[inline]
    pub fn s_at(&self, k: i64) -> f64 {
        k as f64 * self.step
    }

    /// Sample at signed index `k` (`s = k·step`).
    #[inline]
    pub fn point_at(&self, k: i64) -> Vec2 {
        let i = k.unsigned_abs() as usize;
        let p = Vec2::new(self.x[i], self.y[i]);
        if k < 0 {
            -p
        } else {
            p
        }
    }

    #[inline]
    pub fn tangent_at(&self, k: i64) -> Vec2 {
        rhs(self.point_at(k))
    }

    #[inline]
    pub fn curvature_at(&self, k: i64) -> f64 {
        let p = self.point_at(k);
        p.dot(rhs(p))
    }

    /// `<F, N>` at a signed sample index.
    #[inline]
    pub fn fn_at(&self, k: i64) -> f64 {
        let p = self.point_at(k);
        p.dot(rhs(p).perp())
    }

    fn check_range(&self, s: f64) -> Result<()> {
        let m = self.s_max();
        if s.abs() > m || s.is_nan() {
            return Err(Error::OutOfRange { s, s_max: m });
        }
        Ok(())
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let n = self.x.len() - 1;
        let q = s / self.step;
        let k = (q.floor() as usize).min(n - 1);
        (k, q - k as f64)
    }

    /// `F(s)` by cubic Hermite interpolation with exact tangents.
    pub fn position(&self, s: f64) -> Result<Vec2> {
        self.check_range(s)?;
        Ok(self.position_unchecked(s))
    }

    pub(crate) fn position_unchecked(&self, s: f64) -> Vec2 {
        if s < 0.0 {
            return -self.position_unchecked(-s);
        }
        let (k, u) = self.locate(s);
        let p0 = Vec2::new(self.x[k], self.y[k]);
        let p1 = Vec2::new(self.x[k + 1], self.y[k + 1]);
        hermite(p0, rhs(p0) * self.step, p1, rhs(p1) * self.step, u)
    }

    pub fn tangent(&self, s: f64) -> Result<Vec2> {
        Ok(rhs(self.position(s)?))
    }

    pub fn normal(&self, s: f64) -> Result<Vec2> {
        Ok(self.tangent(s)?.perp())
    }

    pub fn curvature(&self, s: f64) -> Result<f64> {
        let p = self.position(s)?;
        Ok(p.dot(rhs(p)))
    }

    /// Point, tangent, curvature and `<F,N>` in one evaluation.
    pub fn frame(&self, s: f64) -> Result<Frame> {
        let p = self.position(s)?;
        let t = rhs(p);
        Ok(Frame {
            s,
            p,
            t,
            h: p.dot(t),
            f_n: p.dot(t.perp()),
        })
    }

    /// Continuous lift of `arg F(s)`; `θ(-s) = θ(s) + π`.
    pub fn lifted_angle(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Err(invalid("s", "the angle is undefined at the origin"));
        }
        self.check_range(s)?;
        if s < 0.0 {
            return Ok(self.theta_pos(-s) + PI);
        }
        Ok(self.theta_pos(s))
    }

    #[inline]
    fn dtheta(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let p = Vec2::new(self.x[k], self.y[k]);
        p.cross(rhs(p)) / p.norm_sq()
    }

    fn theta_pos(&self, s: f64) -> f64 {
        let (k, u) = self.locate(s);
        hermite1(
            self.theta[k],
            self.dtheta(k) * self.step,
            self.theta[k + 1],
            self.dtheta(k + 1) * self.step,
            u,
        )
    }

    /// Positive-wall arclength with lifted angle `theta`.
    pub fn s_of_theta(&self, theta: f64) -> Result<f64> {
        let n = self.theta.len() - 1;
        if !(theta > 0.0) || theta > self.theta[n] {
            return Err(Error::Beyond {
                what: "lifted angle",
                value: theta,
                max: self.theta[n],
            });
        }
        let k = self.theta.partition_point(|&t| t < theta).clamp(1, n);
        let (lo, hi) = (self.s_at(k as i64 - 1), self.s_at(k as i64));
        Ok(invert_monotone(|s| self.theta_pos(s), lo, hi, theta))
    }

    /// Positive-wall arclength with `|F| = rho`.
    pub fn s_of_radius(&self, rho: f64) -> Result<f64> {
        let n = self.x.len() - 1;
        let r = |k: usize| self.x[k].hypot(self.y[k]);
        if !(rho >= 0.0) || rho > r(n) {
            return Err(Error::Beyond {
                what: "radius",
                value: rho,
                max: r(n),
            });
        }
        let (mut lo, mut hi) = (0usize, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if r(mid) < rho {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(invert_monotone(
            |s| self.position_unchecked(s).norm(),
            self.s_at(lo as i64),
            self.s_at(hi as i64),
            rho,
        ))
    }

    /// `R⁺(θ)`, the positive-wall radius at lifted angle `θ > 0`.
    pub fn r_plus(&self, theta: f64) -> Result<f64> {
        Ok(self.position_unchecked(self.s_of_theta(theta)?).norm())
    }

    /// `R⁻(θ) = R⁺(θ - π)`, zero for `θ <= π`.
    pub fn r_minus(&self, theta: f64) -> Result<f64> {
        if theta <= PI {
            return Ok(0.0);
        }
        self.r_plus(theta - PI)
    }

    /// Where `p` sits relative to the corridor rotated by `t`.
    pub fn corridor_margin(&self, p: Vec2, t: f64) -> Result<CorridorMargin> {
        let q = p.rotate(-t);
        let rho = q.norm();
        let s_rho = self.s_of_radius(rho)?;
        let theta_rho = if s_rho > 0.0 { self.theta_pos(s_rho) } else { 0.0 };
        // Smallest lift of arg q strictly beyond the positive wall at this radius.
        let phi = q.angle();
        let k = ((theta_rho - phi) / TAU).floor() + 1.0;
        let mut theta = phi + TAU * k;
        if theta <= theta_rho {
            theta += TAU;
        }
        let at = |theta: f64| -> Result<CorridorMargin> {
            let sp = self.s_of_theta(theta)?;
            let out = self.position_unchecked(sp).norm() - rho;
            let (radial, s_wall) = if theta > PI {
                let sm = self.s_of_theta(theta - PI)?;
                let inn = rho - self.position_unchecked(sm).norm();
                if inn < out {
                    (inn, sm)
                } else {
                    (out, sp)
                }
            } else {
                (out.min(rho), sp)
            };
            // |sin| of the angle between wall and ray is sqrt(1 - (H/|F|)²)
            // since <F, T> = H; F(-s) = -F(s) gives the negative wall the same value.
            let f = self.position_unchecked(s_wall);
            let sin = (1.0 - (f.dot(rhs(f)) / f.norm().max(1e-300)).powi(2)).max(0.0).sqrt();
            Ok(CorridorMargin {
                theta,
                radial,
                normal: radial * sin,
                angular: (theta - theta_rho).min(theta_rho + PI - theta),
            })
        };
        let best = at(theta)?;
        // A point on the positive wall can round either way; the lift just
        // below it then is the meaningful one.
        if theta - TAU > 0.0 && theta - theta_rho > PI {
            let alt = at(theta - TAU)?;
            if alt.radial > best.radial {
                return Ok(alt);
            }
        }
        Ok(best)
    }

    /// The radial chord of the corridor at the negative-wall point `F(s)`.
    pub fn corridor_width(&self, s: f64) -> Result<CorridorQuery> {
        if !(s <= -CORRIDOR_MIN_ABS_S) {
            return Err(invalid(
                "s",
                format!("corridor width needs s <= -{CORRIDOR_MIN_ABS_S}, got {s}"),
            ));
        }
        self.check_range(s)?;
        let theta_a = self.theta_pos(-s) + PI;
        let n = self.theta.len() - 1;
        if theta_a > self.theta[n] {
            return Err(Error::NoBracket(format!(
                "ray through F({s}) leaves the profile before meeting the positive wall; raise s_max"
            )));
        }
        let k = self.theta.partition_point(|&t| t < theta_a).clamp(1, n);
        let sigma = bisect(
            |x| self.theta_pos(x) - theta_a,
            self.s_at(k as i64 - 1),
            self.s_at(k as i64),
            1e-10,
        )?;
        let a = self.position_unchecked(s);
        let b = self.position_unchecked(sigma);
        let q = CorridorQuery {
            s,
            sigma,
            width: a.dist(b),
        };
        for j in 1..=64 {
            let m = a.lerp(b, j as f64 / 65.0);
            let c = self.corridor_margin(m, 0.0)?;
            if !c.inside() {
                return Err(Error::NoBracket(format!(
                    "chord at s = {s} leaves the corridor at {m:?} (margin {:e})",
                    c.radial
                )));
            }
        }
        Ok(q)
    }

    /// `σ > s` with `θ(σ) = θ(s) + 2π` (same wall, one turn out).
    pub fn full_turn_partner(&self, s: f64) -> Result<f64> {
        let a = s.abs();
        let target = self.lifted_angle(a)? + TAU;
        let sigma = self.s_of_theta(target)?;
        Ok(if s < 0.0 { -sigma } else { sigma })
    }

    /// Inflection of `H` on the positive half line (bisection on the
    /// central second difference) together with the maximum of `H`.
    pub fn find_h_inflection(&self) -> Result<HInflection> {
        let n = self.x.len() as i64 - 1;
        let h = self.step;
        let (mut kmax, mut hmax) = (0i64, f64::NEG_INFINITY);
        let mut crit = 0;
        let mut prev_d = 1.0f64;
        for k in 1..n {
            let v = self.curvature_at(k);
            if v > hmax {
                hmax = v;
                kmax = k;
            }
            let d = self.curvature_at(k + 1) - self.curvature_at(k - 1);
            if d != 0.0 && d.signum() != prev_d.signum() {
                crit += 1;
                prev_d = d;
            }
        }
        let hc = |s: f64| {
            let p = self.position_unchecked(s);
            p.dot(rhs(p))
        };
        let d2 = |s: f64| (hc(s + h) - 2.0 * hc(s) + hc(s - h)) / (h * h);
        // H'' < 0 up to and past the maximum; the first sign change after it.
        let start = kmax as f64 * h;
        let stop = self.s_max() - 2.0 * h;
        let mut a = start;
        let mut fa = d2(a);
        let mut s_inf = None;
        let mut b = a;
        while b < stop {
            b = (a + 0.05).min(stop);
            let fb = d2(b);
            if fa.signum() != fb.signum() {
                s_inf = Some(bisect(d2, a, b, 1e-10)?);
                break;
            }
            a = b;
            fa = fb;
        }
        let s_inflection = s_inf.ok_or_else(|| Error::NoBracket("H'' keeps its sign on the profile".into()))?;
        Ok(HInflection {
            s_inflection,
            s_max_h: kmax as f64 * h,
            h_max: hmax,
            critical_points: crit,
        })
    }

    pub fn asymptotic_ratios(&self, s: f64) -> Result<AsymptoticRatios> {
        if !(s >= CORRIDOR_MIN_ABS_S) {
            return Err(invalid("s", format!("ratios are taken at s >= {CORRIDOR_MIN_ABS_S}")));
        }
        let c = (3.0 * s).cbrt();
        let fr = self.frame(s)?;
        let w = self.corridor_width(-s)?.width;
        let sig = self.full_turn_partner(s)?;
        let turn = self.position(sig)?.dist(fr.p);
        Ok(AsymptoticRatios {
            s,
            curvature: fr.h * c,
            radius: fr.p.norm() / c,
            width: w * c / PI,
            full_turn: turn * c / TAU,
        })
    }

    /// Residuals of the soliton identities over `s ∈ [-s_hi, s_hi]`. By
    /// antisymmetry every residual is even or odd in `s`, so only the
    /// positive samples are visited (index `0` uses mirrored neighbours).
    pub fn identity_report(&self, stencil: Stencil, s_hi: f64) -> IdentityReport {
        let n = self.x.len() as i64 - 1;
        let kmax = ((s_hi / self.step).floor() as i64).min(n - 2);
        let h = self.step;
        let d1 = |f: &dyn Fn(i64) -> f64, k: i64| match stencil {
            Stencil::Second => (f(k + 1) - f(k - 1)) / (2.0 * h),
            Stencil::Fourth => (f(k - 2) - 8.0 * f(k - 1) + 8.0 * f(k + 1) - f(k + 2)) / (12.0 * h),
        };
        let xs = |k: i64| self.point_at(k).x;
        let ys = |k: i64| self.point_at(k).y;
        let txs = |k: i64| self.tangent_at(k).x;
        let tys = |k: i64| self.tangent_at(k).y;
        let hs = |k: i64| self.curvature_at(k);

        let mut rep = IdentityReport {
            stencil,
            step: h,
            s_range: (-(kmax as f64) * h, kmax as f64 * h),
            ode: Residual::default(),
            frenet_x: Residual::default(),
            frenet_y: Residual::default(),
            soliton: Residual::default(),
            integral: Residual::default(),
            h_prime: Residual::default(),
        };
        // Running ∫₀ˢ H² with compensated summation.
        let mut integral = 0.0f64;
        let mut comp = 0.0f64;
        let mut prev_f = 0.0f64;
        let mut prev_df = 0.0f64;
        for k in 0..=kmax {
            let s = k as f64 * h;
            let t = self.tangent_at(k);
            let hk = hs(k);
            let xp = d1(&xs, k);
            let yp = d1(&ys, k);
            let xpp = d1(&txs, k);
            let ypp = d1(&tys, k);
            let hp = d1(&hs, k);
            rep.ode.record((xp - t.x).abs().max((yp - t.y).abs()), 1.0, s);
            rep.frenet_x.record(xpp + hk * t.y, xpp.abs().max(hk), s);
            rep.frenet_y.record(ypp - hk * t.x, ypp.abs().max(hk), s);
            let h_frenet = t.x * ypp - xpp * t.y;
            rep.soliton.record(hk - h_frenet, hk, s);

            let f = hk * hk;
            let df = 2.0 * hk * hp;
            if k > 0 {
                let mut inc = 0.5 * h * (prev_f + f);
                if stencil == Stencil::Fourth {
                    inc -= h * h / 12.0 * (df - prev_df);
                }
                let y = inc - comp;
                let tsum = integral + y;
                comp = (tsum - integral) - y;
                integral = tsum;
            }
            prev_f = f;
            prev_df = df;
            let f_n = self.fn_at(k);
            rep.integral.record(f_n + integral, integral, s);
            let rhs_h = 1.0 + hk * f_n;
            rep.h_prime.record(hp - rhs_h, rhs_h.abs().max((hk * f_n).abs()), s);
        }
        rep
    }

    /// Integrate the negative branch directly (backwards from the origin) over
    /// `[-span, 0]` and return the largest deviation from the mirrored branch.
    pub fn direct_negative_check(&self, span: f64) -> Result<f64> {
        let span = span.min(self.s_max());
        let n = (span / self.step).round() as usize;
        let f = |_s: f64, u: &[f64; 2]| {
            let t = rhs(Vec2::new(u[0], u[1]));
            [t.x, t.y]
        };
        let mut dp = DormandPrince::<2>::new(self.tol, self.step.min(0.01));
        let mut u = [0.0, 0.0];
        let mut worst = 0.0f64;
        for k in 0..n {
            u = dp.advance(&f, -(k as f64) * self.step, u, -((k + 1) as f64) * self.step)?;
            let m = self.point_at(-(k as i64 + 1));
            worst = worst.max(Vec2::new(u[0], u[1]).dist(m));
        }
        Ok(worst)
    }

    /// Samples on `[s_lo, s_hi]` as an open curve.
    pub fn window(&self, s_lo: f64, s_hi: f64) -> Result<PlaneCurve> {
        self.check_range(s_lo)?;
        self.check_range(s_hi)?;
        let k0 = (s_lo / self.step).ceil() as i64;
        let k1 = (s_hi / self.step).floor() as i64;
        let pts = (k0..=k1).map(|k| self.point_at(k)).collect();
        Ok(PlaneCurve::new(pts, false, self.step))
    }

    /// Distance from `q` to the profile near arclength `guess`, by Newton on
    /// the foot-point condition `<F(s) - q, T(s)> = 0`.
    pub fn distance_near(&self, q: Vec2, guess: f64) -> Result<f64> {
        let mut s = guess;
        for _ in 0..20 {
            let f = self.frame(s)?;
            let g = (f.p - q).dot(f.t);
            let ds = g / (1.0 + (f.p - q).dot(f.n()) * f.h);
            s = (s - ds).clamp(-self.s_max(), self.s_max());
            if ds.abs() < 1e-15 {
                break;
            }
        }
        Ok(self.position(s)?.dist(q))
    }

    /// The whole profile rotated by `t` about the origin.
    pub fn rotate(&self, t: f64) -> PlaneCurve {
        let n = self.x.len() as i64 - 1;
        let pts = (-n..=n).map(|k| self.point_at(k).rotate(t)).collect();
        PlaneCurve::new(pts, false, self.step)
    }

    /// Wall arclength `L` of the point where the ray at lifted angle `theta`
    /// meets the wall: positive wall for `side > 0`, negative wall otherwise.
    pub fn wall_arclength(&self, theta: f64, positive: bool) -> Result<f64> {
        if positive {
            self.s_of_theta(theta)
        } else {
            self.s_of_theta(theta - PI)
        }
    }
}

/// Position, unit tangent, curvature and `<F,N>` at one arclength.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub s: f64,
    pub p: Vec2,
    pub t: Vec2,
    pub h: f64,
    pub f_n: f64,
}

impl Frame {
    pub fn n(&self) -> Vec2 {
        self.t.perp()
    }
}

fn lift_angles(x: &[f64], y: &[f64], step: f64) -> Vec<f64> {
    let n = x.len();
    let mut theta = vec![0.0; n];
    if n < 2 {
        return theta;
    }
    let base = ((LIFT_BASE_S / step).round() as usize).clamp(1, n - 1);
    let raw = |k: usize| y[k].atan2(x[k]);
    theta[base] = raw(base);
    let wrap = |d: f64| d - TAU * (d / TAU).round();
    for k in base + 1..n {
        theta[k] = theta[k - 1] + wrap(raw(k) - raw(k - 1));
    }
    for k in (1..base).rev() {
        theta[k] = theta[k + 1] + wrap(raw(k) - raw(k + 1));
    }
    theta
}

#[inline]
fn hermite(p0: Vec2, m0: Vec2, p1: Vec2, m1: Vec2, u: f64) -> Vec2 {
    let u2 = u * u;
    let u3 = u2 * u;
    p0 * (2.0 * u3 - 3.0 * u2 + 1.0) + m0 * (u3 - 2.0 * u2 + u) + p1 * (3.0 * u2 - 2.0 * u3) + m1 * (u3 - u2)
}

#[inline]
fn hermite1(p0: f64, m0: f64, p1: f64, m1: f64, u: f64) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    p0 * (2.0 * u3 - 3.0 * u2 + 1.0) + m0 * (u3 - 2.0 * u2 + u) + p1 * (3.0 * u2 - 2.0 * u3) + m1 * (u3 - u2)
}

/// Solve `f(s) = target` for increasing `f` on `[lo, hi]` (secant steps
/// guarded by bisection).
fn invert_monotone<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, target: f64) -> f64 {
    let mut flo = f(lo) - target;
    let mut fhi = f(hi) - target;
    if flo >= 0.0 {
        return lo;
    }
    if fhi <= 0.0 {
        return hi;
    }
    for _ in 0..100 {
        let mut m = lo - flo * (hi - lo) / (fhi - flo);
        if !(m > lo && m < hi) {
            m = 0.5 * (lo + hi);
        }
        let fm = f(m) - target;
        if fm == 0.0 {
            return m;
        }
        if fm < 0.0 {
            lo = m;
            flo = fm;
        } else {
            hi = m;
            fhi = fm;
        }
        // Plain secant stalls on one side; force a bisection when it does.
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid) - target;
        if fmid < 0.0 {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    if -flo < fhi {
        lo
    } else {
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> YinYangProfile {
        YinYangProfile::integrate(60.0, 1e-12).unwrap()
    }

    #[test]
    fn starts_at_origin_heading_east() {
        let p = small();
        assert_eq!(p.point_at(0), Vec2::ZERO);
        assert_eq!(p.tangent_at(0), Vec2::new(1.0, 0.0));
        assert_eq!(p.curvature_at(0), 0.0);
    }

    #[test]
    fn h_prime_at_origin_is_one() {
        let p = small();
        let d = (p.curvature(1e-4).unwrap() - p.curvature(-1e-4).unwrap()) / 2e-4;
        assert!((d - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(YinYangProfile::integrate(-1.0, 1e-10).is_err());
        assert!(YinYangProfile::integrate(10.0, 0.0).is_err());
    }

    #[test]
    fn tight_tolerance_underflows() {
        let r = YinYangProfile::integrate(20.0, 1e-17);
        assert!(matches!(r, Err(Error::StepUnderflow { .. })), "{r:?}");
    }

    #[test]
    fn interpolation_hits_samples() {
        let p = small();
        for k in [-500i64, -3, 0, 7, 4000] {
            let s = p.s_at(k);
            assert!((p.position(s).unwrap() - p.point_at(k)).norm() < 1e-14);
        }
    }

    #[test]
    fn direct_negative_branch_matches_mirror() {
        let p = small();
        assert!(p.direct_negative_check(60.0).unwrap() <= 1e-12);
    }

    #[test]
    fn lifted_angle_inverts() {
        let p = small();
        for s in [1.5, 10.0, 42.0] {
            let th = p.lifted_angle(s).unwrap();
            assert!((p.s_of_theta(th).unwrap() - s).abs() < 1e-9);
            let r = p.position(s).unwrap().norm();
            assert!((p.s_of_radius(r).unwrap() - s).abs() < 1e-9);
        }
        assert!(p.lifted_angle(0.0).is_err());
        let d = p.lifted_angle(-7.0).unwrap() - p.lifted_angle(7.0).unwrap();
        assert!((d - PI).abs() < 1e-12);
    }

    #[test]
    fn corridor_chord_is_radial_and_outward() {
        let p = small();
        let q = p.corridor_width(-20.0).unwrap();
        let a = p.position(q.s).unwrap();
        let b = p.position(q.sigma).unwrap();
        assert!(a.cross(b).abs() < 1e-8 * a.norm() * b.norm());
        assert!(a.dot(b) > 0.0);
        assert!(b.norm() > a.norm());
        assert!(q.sigma > 0.0);
    }

    #[test]
    fn walls_sit_on_the_corridor_boundary() {
        let p = small();
        for s in [5.0, 25.0] {
            let a = p.position(-s).unwrap();
            let m = p.corridor_margin(a, 0.0).unwrap();
            assert!(m.radial.abs() < 1e-8, "{m:?}");
        }
        let far = p.position(-25.0).unwrap() * 0.9;
        assert!(!p.corridor_margin(far, 0.0).unwrap().inside());
    }

    #[test]
    fn normal_margin_is_distance_to_the_wall() {
        let p = small();
        for s in [1.5, 4.0, 20.0] {
            let f = p.frame(s).unwrap();
            for d in [1e-4, -1e-4] {
                let m = p.corridor_margin(f.p + f.n() * d, 0.0).unwrap();
                assert!((m.normal.abs() - 1e-4).abs() < 1e-6, "s = {s}: {m:?}");
            }
        }
    }

    #[test]
    fn rotation_by_quarter_turn_is_multiplication_by_i() {
        let p = YinYangProfile::integrate(5.0, 1e-12).unwrap();
        let c = p.rotate(PI / 2.0);
        let n = p.half_len() as i64 - 1;
        for (j, q) in c.points().iter().enumerate() {
            let f = p.point_at(j as i64 - n);
            assert!((*q - f.perp()).norm() < 1e-14);
        }
        let id = p.rotate(TAU);
        for (j, q) in id.points().iter().enumerate() {
            assert!((*q - p.point_at(j as i64 - n)).norm() < 1e-12);
        }
    }
}
