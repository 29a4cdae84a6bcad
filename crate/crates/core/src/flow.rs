//! Curve shortening flow `∂t γ = H N` on polygons.
//!
//! Two schemes: explicit Euler on the turning-angle curvature, and a
//! semi-implicit mass-lumped scheme (one cyclic tridiagonal solve per
//! coordinate) for long stiff runs. Open curves keep their endpoints pinned to
//! caller-supplied positions.

use crate::curve::{edge_spacing, PlaneCurve};
use crate::error::{invalid, Error, Result};
use crate::vec2::Vec2;
use crate::yinyang::{YinYangProfile, CORRIDOR_MIN_ABS_S};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Explicit,
    SemiImplicit,
    /// Two semi-implicit half steps extrapolated against one full step
    /// (`2 x_{1/2,1/2} - x_1`). Second order in `dt` and still damps the
    /// stiffest modes.
    Extrapolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DtPolicy {
    /// `dt = cfl * h_min² / max(1, max|H|)`.
    Cfl { cfl: f64 },
    Fixed { dt: f64 },
    /// `dt = c * max_turn / max(1, max|H|)²`: the sharpest point moves a
    /// fraction `c` of its own spacing per step.
    Curvature { c: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FlowConfig {
    pub scheme: Scheme,
    pub dt: DtPolicy,
    /// Spacing on flat stretches (and everywhere when `max_turn` is zero).
    pub h: f64,
    /// Curvature-adaptive spacing `max_turn / |H|`, clamped to `[h_min, h]`.
    /// Zero disables it.
    pub max_turn: f64,
    pub h_min: f64,
    /// Cap on the chord sag `h² |H| / 8`. Zero disables it.
    #[serde(default)]
    pub max_sag: f64,
    pub grading: f64,
    pub theta_h: f64,
    /// Full self-intersection sweep every this many steps (0 = never).
    pub embed_check_every: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Explicit,
            dt: DtPolicy::Cfl { cfl: 0.2 },
            h: 0.05,
            max_turn: 0.0,
            h_min: 0.05,
            max_sag: 0.0,
            grading: 0.15,
            theta_h: 1e-3,
            embed_check_every: 20,
        }
    }
}

impl FlowConfig {
    pub fn uniform(scheme: Scheme, h: f64, dt: DtPolicy) -> Self {
        Self {
            scheme,
            dt,
            h,
            h_min: h,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, name: &'static str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be positive, got {v}")))
            }
        };
        pos(self.h, "h")?;
        pos(self.h_min, "h_min")?;
        pos(self.grading, "grading")?;
        pos(self.theta_h, "theta_h")?;
        if self.h_min > self.h {
            return Err(invalid("h_min", "must not exceed h"));
        }
        if !(self.max_sag >= 0.0 && self.max_sag.is_finite()) {
            return Err(invalid("max_sag", format!("must be non-negative, got {}", self.max_sag)));
        }
        if !(self.max_turn >= 0.0 && self.max_turn < 1.0) {
            return Err(invalid("max_turn", format!("must lie in [0, 1), got {}", self.max_turn)));
        }
        match self.dt {
            DtPolicy::Cfl { cfl } => pos(cfl, "cfl"),
            DtPolicy::Fixed { dt } => pos(dt, "dt"),
            DtPolicy::Curvature { c } => pos(c, "dt.c"),
        }?;
        if self.scheme == Scheme::Explicit && matches!(self.dt, DtPolicy::Cfl { cfl } if cfl > 0.25) {
            return Err(invalid("cfl", "explicit Euler needs cfl <= 0.25"));
        }
        Ok(())
    }

    /// Target spacing per vertex for the current curvature.
    pub fn target_spacing(&self, curve: &PlaneCurve) -> Vec<f64> {
        if self.max_turn == 0.0 {
            return vec![self.h; curve.len()];
        }
        let mut t: Vec<f64> = curve
            .curvature()
            .iter()
            .map(|&k| edge_spacing(k, self.max_turn, self.max_sag, self.h_min, self.h))
            .collect();
        curve.grade_spacing(&mut t, self.grading);
        t
    }

    pub fn time_step(&self, curve: &PlaneCurve) -> f64 {
        let k = curve.max_abs_curvature().max(1.0);
        match self.dt {
            DtPolicy::Cfl { cfl } => cfl * self.h_min * self.h_min / k,
            DtPolicy::Fixed { dt } => dt,
            DtPolicy::Curvature { c } => c * self.max_turn.max(self.h_min) / (k * k),
        }
    }
}

/// Tip of a curve sitting in the rotating corridor.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tip {
    pub index: usize,
    pub point: Vec2,
    /// Corridor lift of the tip direction (in the co-rotating frame).
    pub theta: f64,
    pub l_plus: f64,
    pub l_minus: f64,
    pub plus_point: Vec2,
    pub minus_point: Vec2,
    pub w_tip: f64,
    pub radial_tangencies: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowState {
    pub curve: PlaneCurve,
    pub t: f64,
    pub steps: usize,
    pub inflections: usize,
    pub area: f64,
    pub length: f64,
    pub tip: Option<Tip>,
    pub h_max_tip: f64,
    pub h_max_away: f64,
}

impl FlowState {
    pub fn new(curve: PlaneCurve, t: f64, cfg: &FlowConfig) -> Self {
        Self {
            inflections: curve.inflection_count(cfg.theta_h),
            area: if curve.closed() { curve.signed_area() } else { 0.0 },
            length: curve.length(),
            h_max_tip: 0.0,
            h_max_away: curve.max_abs_curvature(),
            curve,
            t,
            steps: 0,
            tip: None,
        }
    }

    /// One time step of size `dt`. For open curves `ends` gives the endpoint
    /// positions at `t + dt` (default: endpoints stay put).
    pub fn step(&self, dt: f64, cfg: &FlowConfig, ends: Option<(Vec2, Vec2)>) -> Result<FlowState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", format!("must be positive, got {dt}")));
        }
        let c = &self.curve;
        let n = c.len();
        if n < if c.closed() { 4 } else { 3 } {
            return Err(Error::Flow {
                t: self.t,
                reason: format!("only {n} vertices left"),
            });
        }
        let mut pts = match cfg.scheme {
            Scheme::Explicit => explicit_update(c, dt),
            Scheme::SemiImplicit => semi_implicit_update(c, dt),
            Scheme::Extrapolated => {
                let full = semi_implicit_update(c, dt);
                let mid = PlaneCurve::new(semi_implicit_update(c, 0.5 * dt), c.closed(), c.resample_h());
                let half = semi_implicit_update(&mid, 0.5 * dt);
                half.iter().zip(&full).map(|(&a, &b)| a * 2.0 - b).collect()
            }
        };
        if !c.closed() {
            let (a, b) = ends.unwrap_or((c.points()[0], c.points()[n - 1]));
            pts[0] = a;
            pts[n - 1] = b;
        }
        if pts.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::Flow {
                t: self.t + dt,
                reason: "non-finite vertex".into(),
            });
        }
        let mut curve = PlaneCurve::new(pts, c.closed(), c.resample_h());
        remesh(&mut curve, cfg);

        let t = self.t + dt;
        let kmax = curve.max_abs_curvature();
        if kmax > 1.0 / (5.0 * cfg.h_min) {
            return Err(Error::Flow {
                t,
                reason: format!("curvature {kmax:.4e} beyond 1/(5 h_min); near extinction"),
            });
        }
        let area = if curve.closed() { curve.signed_area() } else { 0.0 };
        if curve.closed() && area.abs() < 10.0 * cfg.h_min * cfg.h_min {
            return Err(Error::Flow {
                t,
                reason: format!("enclosed area {area:.4e} below 10 h_min²; near extinction"),
            });
        }
        let steps = self.steps + 1;
        if curve.closed() && cfg.embed_check_every > 0 && steps % cfg.embed_check_every == 0 && !curve.is_embedded() {
            return Err(Error::Flow {
                t,
                reason: "self-intersection".into(),
            });
        }
        Ok(FlowState {
            inflections: curve.inflection_count(cfg.theta_h),
            length: curve.length(),
            area,
            h_max_tip: 0.0,
            h_max_away: kmax,
            curve,
            t,
            steps,
            tip: None,
        })
    }

    /// Step with the configured time-step policy.
    pub fn advance(&self, cfg: &FlowConfig) -> Result<FlowState> {
        self.step(cfg.time_step(&self.curve), cfg, None)
    }

    /// Locate the tip (maximum of the angle function) and its wall
    /// projections in the corridor rotated by `t`.
    pub fn track_tip(&mut self, profile: &YinYangProfile, radius_mult: f64) -> Result<Tip> {
        let tip = track_tip(&self.curve, profile, self.t)?;
        let r = radius_mult * tip.w_tip;
        let (mut near, mut far) = (0.0f64, 0.0f64);
        for (p, k) in self.curve.points().iter().zip(self.curve.curvature()) {
            if p.dist(tip.point) <= r {
                near = near.max(k.abs());
            } else {
                far = far.max(k.abs());
            }
        }
        self.h_max_tip = near;
        self.h_max_away = far;
        self.tip = Some(tip);
        Ok(tip)
    }

    /// Signed area and the instantaneous rate `-∮ H ds` (which is `-2π` for
    /// any embedded closed curve).
    pub fn area_and_sweep(&self) -> (f64, f64) {
        let c = &self.curve;
        let mut rate = 0.0;
        for i in 0..c.len() {
            let prev = if i == 0 { c.len() - 1 } else { i - 1 };
            let l = 0.5 * (c.edge_len(prev) + c.edge_len(i));
            rate -= c.curvature()[i] * l;
        }
        (self.area, rate)
    }

    /// True when every vertex outside the core disk lies inside the corridor
    /// rotated by `t`, up to `tol`. Returns the smallest wall distance too.
    pub fn containment(&self, profile: &YinYangProfile, tol: f64) -> Result<(bool, f64)> {
        containment(&self.curve, profile, self.t, tol)
    }
}

pub fn containment(curve: &PlaneCurve, profile: &YinYangProfile, t: f64, tol: f64) -> Result<(bool, f64)> {
    // Inside |F(±1)| both walls wind through the origin and the polar
    // corridor is not defined.
    let core = profile.position(CORRIDOR_MIN_ABS_S)?.norm();
    let r_max = profile.position(profile.s_max())?.norm();
    let mut worst = f64::INFINITY;
    for &p in curve.points() {
        let r = p.norm();
        if r < core {
            continue;
        }
        if r >= r_max {
            return Ok((false, f64::NEG_INFINITY));
        }
        worst = worst.min(profile.corridor_margin(p, t)?.normal);
    }
    Ok((worst > -tol, worst))
}

/// Leading error of a three-point curvature stencil on an uneven mesh is
/// `c (q₊ - q₋) H'` (`c = 1/4` for the turning angle, `1/3` for the lumped
/// Laplacian). Returns `(q₊ - q₋) H'` per vertex, zero at open ends, so the
/// schemes can subtract it.
fn uneven_mesh_error(c: &PlaneCurve) -> Vec<f64> {
    let n = c.len();
    let k = c.curvature();
    (0..n)
        .map(|i| {
            if !c.closed() && (i == 0 || i + 1 == n) {
                return 0.0;
            }
            let prev = if i == 0 { n - 1 } else { i - 1 };
            let next = (i + 1) % n;
            let (q0, q1) = (c.edge_len(prev), c.edge_len(i));
            (q1 - q0) * (k[next] - k[prev]) / (q0 + q1)
        })
        .collect()
}

fn explicit_update(c: &PlaneCurve, dt: f64) -> Vec<Vec2> {
    let k = c.curvature();
    let e = uneven_mesh_error(c);
    c.points()
        .iter()
        .enumerate()
        .map(|(i, &p)| p + c.normal(i) * (dt * (k[i] - 0.25 * e[i])))
        .collect()
}

/// Mass-lumped backward step `M (x' - x)/dt = (x'_{i+1} - x'_i)/q_i -
/// (x'_i - x'_{i-1})/q_{i-1}` with edge lengths `q` frozen at the old curve.
fn semi_implicit_update(c: &PlaneCurve, dt: f64) -> Vec<Vec2> {
    let n = c.len();
    let pts = c.points();
    let closed = c.closed();
    let q: Vec<f64> = (0..c.num_edges()).map(|e| c.edge_len(e)).collect();
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rx = vec![0.0; n];
    let mut ry = vec![0.0; n];
    let err = uneven_mesh_error(c);
    for i in 0..n {
        let (ql, qr) = if closed {
            (q[if i == 0 { n - 1 } else { i - 1 }], q[i])
        } else if i == 0 || i + 1 == n {
            // Dirichlet rows.
            diag[i] = 1.0;
            rx[i] = pts[i].x;
            ry[i] = pts[i].y;
            continue;
        } else {
            (q[i - 1], q[i])
        };
        let m = 0.5 * (ql + qr) / dt;
        lower[i] = -1.0 / ql;
        upper[i] = -1.0 / qr;
        diag[i] = m + 1.0 / ql + 1.0 / qr;
        // Explicit correction of the uneven-mesh error.
        let p = pts[i] - c.normal(i) * (dt * err[i] / 3.0);
        rx[i] = m * p.x;
        ry[i] = m * p.y;
    }
    let (xs, ys) = if closed {
        (
            solve_cyclic_tridiagonal(&lower, &diag, &upper, &rx),
            solve_cyclic_tridiagonal(&lower, &diag, &upper, &ry),
        )
    } else {
        lower[0] = 0.0;
        upper[n - 1] = 0.0;
        (
            solve_tridiagonal(&lower, &diag, &upper, &rx),
            solve_tridiagonal(&lower, &diag, &upper, &ry),
        )
    };
    xs.into_iter().zip(ys).map(|(x, y)| Vec2::new(x, y)).collect()
}

/// Thomas algorithm; `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / m } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}

/// Cyclic system: `lower[0]` couples row 0 to `x[n-1]`, `upper[n-1]` couples
/// row `n-1` to `x[0]`. Sherman–Morrison on top of the Thomas solve.
pub fn solve_cyclic_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let alpha = upper[n - 1];
    let beta = lower[0];
    let gamma = -diag[0];
    let mut b = diag.to_vec();
    b[0] -= gamma;
    b[n - 1] -= alpha * beta / gamma;
    let x = solve_tridiagonal(lower, &b, upper, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tridiagonal(lower, &b, upper, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn remesh(curve: &mut PlaneCurve, cfg: &FlowConfig) {
    if cfg.max_turn == 0.0 {
        let (lo, hi) = curve.spacing_range();
        if lo < 0.5 * cfg.h || hi > 2.0 * cfg.h {
            *curve = curve.resample_uniform(cfg.h);
        }
    } else {
        let target = cfg.target_spacing(curve);
        curve.remesh_local(&target, 1.5, 1.0);
    }
}

/// Count of sign changes of `<p, i T>` around a closed curve: critical points
/// of the polar angle along the curve.
pub fn radial_tangencies(curve: &PlaneCurve) -> usize {
    let c: Vec<f64> = curve
        .points()
        .iter()
        .zip(curve.tangents())
        .map(|(p, t)| p.cross(*t))
        .collect();
    let thr = 1e-9 * c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let n = c.len();
    let Some(start) = (0..n).find(|&i| c[i].abs() > thr) else {
        return 0;
    };
    let mut sign = c[start].signum();
    let mut count = 0;
    for k in 1..=n {
        let v = c[(start + k) % n];
        if v.abs() > thr && v.signum() != sign {
            sign = v.signum();
            count += 1;
        }
    }
    count
}

/// Tip of a closed curve in the corridor rotated by `t`: the vertex where the
/// polar angle, unwrapped along the curve starting next to the origin, peaks.
pub fn track_tip(curve: &PlaneCurve, profile: &YinYangProfile, t: f64) -> Result<Tip> {
    if !curve.closed() {
        return Err(Error::Tip("curve must be closed".into()));
    }
    let radial = radial_tangencies(curve);
    if radial > 2 {
        return Err(Error::Tip(format!("{radial} radial tangencies, expected at most 2")));
    }
    let pts = curve.points();
    let n = pts.len();
    let start = (0..n)
        .min_by(|&a, &b| pts[a].norm().total_cmp(&pts[b].norm()))
        .unwrap_or(0);
    let (mut phi, mut best, mut index) = (0.0, f64::NEG_INFINITY, start);
    for k in 1..n {
        let a = pts[(start + k - 1) % n];
        let b = pts[(start + k) % n];
        if k > 1 {
            phi += a.cross(b).atan2(a.dot(b));
        }
        if phi > best {
            best = phi;
            index = (start + k) % n;
        }
    }
    let point = pts[index];
    let theta = profile.corridor_margin(point, t)?.theta;
    let l_plus = profile.s_of_theta(theta)?;
    let l_minus = profile.s_of_theta(theta - PI)?;
    let fp = profile.position(l_plus)?;
    let fm = profile.position(-l_minus)?;
    Ok(Tip {
        index,
        point,
        theta,
        l_plus,
        l_minus,
        plus_point: fp.rotate(t),
        minus_point: fm.rotate(t),
        w_tip: fp.norm() - fm.norm(),
        radial_tangencies: radial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(r: f64, n: usize) -> PlaneCurve {
        let pts = (0..n)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / n as f64;
                Vec2::new(r * a.cos(), r * a.sin())
            })
            .collect();
        PlaneCurve::new(pts, true, 2.0 * PI * r / n as f64)
    }

    #[test]
    fn cyclic_solver_matches_dense_product() {
        let n = 7;
        let lower: Vec<f64> = (0..n).map(|i| -1.0 - 0.1 * i as f64).collect();
        let upper: Vec<f64> = (0..n).map(|i| -0.5 + 0.05 * i as f64).collect();
        let diag: Vec<f64> = (0..n).map(|i| 4.0 + i as f64).collect();
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let rhs: Vec<f64> = (0..n)
            .map(|i| lower[i] * x[(i + n - 1) % n] + diag[i] * x[i] + upper[i] * x[(i + 1) % n])
            .collect();
        let got = solve_cyclic_tridiagonal(&lower, &diag, &upper, &rhs);
        for i in 0..n {
            assert!((got[i] - x[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn circle_area_rate_is_minus_two_pi() {
        let cfg = FlowConfig::uniform(Scheme::Explicit, 0.02, DtPolicy::Cfl { cfl: 0.2 });
        let s = FlowState::new(circle(1.0, 314), 0.0, &cfg);
        let (a, rate) = s.area_and_sweep();
        assert!((a - PI).abs() < 1e-3);
        assert!((rate + 2.0 * PI).abs() < 1e-12);
        assert_eq!(s.inflections, 0);
    }

    #[test]
    fn semi_implicit_circle_shrinks() {
        let cfg = FlowConfig::uniform(Scheme::SemiImplicit, 0.02, DtPolicy::Fixed { dt: 1e-4 });
        let mut s = FlowState::new(circle(1.0, 314), 0.0, &cfg);
        while s.t < 0.1 - 1e-12 {
            s = s.advance(&cfg).unwrap();
        }
        let exact = (1.0 - 2.0 * s.t).sqrt();
        for p in s.curve.points() {
            assert!((p.norm() - exact).abs() < 2e-3, "{} {}", p.norm(), exact);
        }
        let (lo, hi) = s.curve.spacing_range();
        assert!(lo >= 0.5 * 0.02 && hi <= 2.0 * 0.02);
    }

    #[test]
    fn extinction_is_reported() {
        let cfg = FlowConfig::uniform(Scheme::Explicit, 0.02, DtPolicy::Cfl { cfl: 0.2 });
        let mut s = FlowState::new(circle(0.2, 63), 0.0, &cfg);
        let err = loop {
            match s.advance(&cfg) {
                Ok(n) => s = n,
                Err(e) => break e,
            }
        };
        assert!(matches!(err, Error::Flow { .. }));
        assert!(s.t < 0.02);
    }
}
