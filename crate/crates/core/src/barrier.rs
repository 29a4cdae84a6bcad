//! The hyperbolic barrier `Γ(s,t) = e^{it}(F(s) + φ(s,t) N(s))` over the
//! Yin-Yang, its linear and quadratic operators, the exact supersolution
//! residual, and the endpoint algebra.

use crate::curve::{PlaneCurve, SegmentGrid};
use crate::error::{invalid, Result};
use crate::reaper::graph;
use crate::vec2::Vec2;
use crate::yinyang::{Frame, YinYangProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const DEFAULT_EPS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierParams {
    pub eps: f64,
    pub lam_minus: f64,
    pub lam_plus: f64,
    pub lam: f64,
    pub w: f64,
    pub a: f64,
    pub l: f64,
    pub r: f64,
    /// Time derivatives of `a`, `L`, `R` (zero unless supplied).
    pub a_dot: f64,
    pub l_dot: f64,
    pub r_dot: f64,
}

impl BarrierParams {
    /// The simplified choice `λ± = 1/(π(1-ε))`, `λ = 100/(π(1-ε))`.
    pub fn new(eps: f64, w: f64, l_minus: f64, l_plus: f64) -> Result<Self> {
        let k = 1.0 / (PI * (1.0 - eps));
        Self::with_lambdas(eps, k, k, 100.0 * k, w, l_minus, l_plus)
    }

    pub fn with_lambdas(eps: f64, lam_minus: f64, lam_plus: f64, lam: f64, w: f64, l_minus: f64, l_plus: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps < 1.0) {
            return Err(invalid("eps", format!("must lie in [0, 1), got {eps}")));
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(invalid("w", format!("must be positive, got {w}")));
        }
        if !(lam > 0.0 && lam_minus > 0.0 && lam_plus > 0.0) {
            return Err(invalid("lambda", "λ, λ± must be positive"));
        }
        let floor = (-lam).exp();
        if !(lam_minus > floor && lam_plus > floor) {
            return Err(invalid("lambda", format!("λ± must exceed e^-λ = {floor:e}")));
        }
        let l = l_minus - lam * w;
        let r = l_plus - lam * w;
        if !(-l < r) {
            return Err(invalid("L", format!("empty barrier interval [-{l}, {r}]")));
        }
        Ok(Self {
            eps,
            lam_minus,
            lam_plus,
            lam,
            w,
            a: PI * (1.0 - eps) / w,
            l,
            r,
            a_dot: 0.0,
            l_dot: 0.0,
            r_dot: 0.0,
        })
    }

    pub fn with_rates(self, a_dot: f64, l_dot: f64, r_dot: f64) -> Self {
        Self {
            a_dot,
            l_dot,
            r_dot,
            ..self
        }
    }

    /// The two exponential halves `(ψ, η)`.
    pub fn halves(&self, s: f64) -> (f64, f64) {
        (
            self.lam_minus * self.w * (-self.a * (self.l + s)).exp(),
            self.lam_plus * self.w * (-self.a * (self.r - s)).exp(),
        )
    }

    pub fn phi(&self, s: f64) -> PhiBundle {
        let (psi, eta) = self.halves(s);
        let a = self.a;
        // w ∝ 1/a, so ẇ/w = -ȧ/a.
        let log_rate = -self.a_dot / a;
        PhiBundle {
            phi: psi + eta,
            phi_s: -a * psi + a * eta,
            phi_ss: a * a * (psi + eta),
            phi_t: psi * (log_rate - self.a_dot * (self.l + s) - a * self.l_dot)
                + eta * (log_rate - self.a_dot * (self.r - s) - a * self.r_dot),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiBundle {
    pub phi: f64,
    pub phi_s: f64,
    pub phi_ss: f64,
    pub phi_t: f64,
}

impl PhiBundle {
    pub const ZERO: PhiBundle = PhiBundle {
        phi: 0.0,
        phi_s: 0.0,
        phi_ss: 0.0,
        phi_t: 0.0,
    };

    pub fn scale(self, c: f64) -> Self {
        Self {
            phi: c * self.phi,
            phi_s: c * self.phi_s,
            phi_ss: c * self.phi_ss,
            phi_t: c * self.phi_t,
        }
    }
}

/// `A(φ) = φ_t - φ_ss + φ_s <F,N> - φ H²`.
pub fn a_op(f: &Frame, b: &PhiBundle) -> f64 {
    b.phi_t - b.phi_ss + b.phi_s * f.f_n - b.phi * f.h * f.h
}

/// `Q(φ) = -H (3 φ A(φ) + 2 φ φ_ss + φ_s² + φ² H²)`.
pub fn q_op(f: &Frame, b: &PhiBundle) -> f64 {
    -f.h * (3.0 * b.phi * a_op(f, b) + 2.0 * b.phi * b.phi_ss + b.phi_s * b.phi_s + b.phi * b.phi * f.h * f.h)
}

/// Right-hand side of the regrouped form `(1 - 3φH) A - H(2φφ_ss + φ_s² + φ²H²)`.
pub fn regrouped(f: &Frame, b: &PhiBundle) -> f64 {
    (1.0 - 3.0 * b.phi * f.h) * a_op(f, b) - f.h * (2.0 * b.phi * b.phi_ss + b.phi_s * b.phi_s + b.phi * b.phi * f.h * f.h)
}

/// `|Γ_s|² <Γ_t, iΓ_s> - <Γ_ss, iΓ_s>` evaluated exactly in the co-rotating
/// frame (`Γ_t` includes the rotation `iΓ`). Uses `T' = HN`, `N' = -HT`,
/// `<F,T> = H` and `H' = 1 + H<F,N>`.
pub fn full_residual(f: &Frame, b: &PhiBundle) -> f64 {
    let (h, fnn) = (f.h, f.f_n);
    let h_s = 1.0 + h * fnn;
    let g = 1.0 - b.phi * h;
    // Components in the (T, N) frame.
    let gs = (g, b.phi_s);
    let igs = (-b.phi_s, g);
    let gt = (-fnn - b.phi, h + b.phi_t);
    let gss = (-b.phi * h_s - 2.0 * b.phi_s * h, g * h + b.phi_ss);
    let dot = |u: (f64, f64), v: (f64, f64)| u.0 * v.0 + u.1 * v.1;
    dot(gs, gs) * dot(gt, igs) - dot(gss, igs)
}

/// Largest `|full_residual(φ ≡ 0)| / max(1, |H|)` over every stored sample
/// of the profile, and where it occurs. The unperturbed graph is the
/// soliton itself, so this only sees rounding.
pub fn zero_residual_scan(profile: &YinYangProfile) -> (f64, f64) {
    let n = profile.half_len() as i64 - 1;
    let mut worst = (0.0f64, 0.0f64);
    for k in -n..=n {
        let p = profile.point_at(k);
        let t = profile.tangent_at(k);
        let f = Frame {
            s: profile.s_at(k),
            p,
            t,
            h: profile.curvature_at(k),
            f_n: profile.fn_at(k),
        };
        let r = full_residual(&f, &PhiBundle::ZERO).abs() / f.h.abs().max(1.0);
        if r > worst.0 {
            worst = (r, f.s);
        }
    }
    worst
}

/// Geometric position of `Γ(s, t)`.
pub fn gamma_point(profile: &YinYangProfile, params: &BarrierParams, s: f64, t: f64) -> Result<Vec2> {
    let f = profile.frame(s)?;
    Ok((f.p + f.n() * params.phi(s).phi).rotate(t))
}

/// Samples of the barrier over `[-L, R]`, dense near the two ends where `φ`
/// is of order `1/a`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BarrierCurve {
    pub params: BarrierParams,
    pub t: f64,
    pub s: Vec<f64>,
    pub points: Vec<Vec2>,
    pub phi: Vec<PhiBundle>,
}

impl BarrierCurve {
    pub fn sample(profile: &YinYangProfile, params: BarrierParams, t: f64, h_far: f64) -> Result<Self> {
        let (lo, hi) = (-params.l, params.r);
        let fine = 0.05 / params.a;
        let band = 40.0 / params.a;
        let mut s = Vec::new();
        let mut x = lo;
        while x < hi {
            s.push(x);
            let d = (x - lo).min(hi - x);
            x += if d < band { fine } else { h_far.max(fine) };
        }
        s.push(hi);
        let mut points = Vec::with_capacity(s.len());
        let mut phi = Vec::with_capacity(s.len());
        for &si in &s {
            let f = profile.frame(si)?;
            let b = params.phi(si);
            points.push((f.p + f.n() * b.phi).rotate(t));
            phi.push(b);
        }
        Ok(Self {
            params,
            t,
            s,
            points,
            phi,
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InsideReport {
    pub inside: bool,
    /// Smallest signed distance to the curve (positive inside), capped at `cap`.
    pub min_signed_distance: f64,
    pub worst_s: f64,
    /// Samples strictly outside the polygon (including those within `tol`).
    pub outside_count: usize,
    /// Smallest signed distance among samples within `lambda w` of either
    /// barrier end (where `φ` is not negligible).
    pub end_margin: f64,
}

/// Every barrier sample inside the closed curve, up to `tol`.
pub fn barrier_inside(barrier: &BarrierCurve, curve: &PlaneCurve, tol: f64, cap: f64) -> InsideReport {
    let grid = SegmentGrid::build(curve);
    let p = &barrier.params;
    let (lo, hi) = (-p.l, p.r);
    let near_end = p.lam * p.w;
    let mut min_d = f64::INFINITY;
    let mut end_margin = f64::INFINITY;
    let mut worst_s = lo;
    let mut outside = 0;
    for (q, &s) in barrier.points.iter().zip(&barrier.s) {
        let d = grid.distance_within(curve, *q, cap).unwrap_or(cap);
        let sd = if grid.winding_number(curve, *q) != 0 {
            d
        } else {
            outside += 1;
            -d
        };
        if sd < min_d {
            min_d = sd;
            worst_s = s;
        }
        if s - lo <= near_end || hi - s <= near_end {
            end_margin = end_margin.min(sd);
        }
    }
    InsideReport {
        inside: min_d > -tol,
        min_signed_distance: min_d,
        worst_s,
        outside_count: outside,
        end_margin,
    }
}

/// The endpoint quartic `10φ/a² ∓ 3aφ² + a⁴φ³ ∓ a³φ⁴` (`sign` is the upper
/// sign: `+1` at the right end, `-1` at the left).
pub fn endpoint_quartic(a: f64, phi: f64, sign: f64) -> f64 {
    10.0 * phi / (a * a) - sign * 3.0 * a * phi * phi + a.powi(4) * phi.powi(3) - sign * a.powi(3) * phi.powi(4)
}

/// The same quantity as a sum of squares and a positive cubic term.
pub fn endpoint_factored(a: f64, phi: f64, sign: f64) -> f64 {
    let m = 3.0 / a - sign * 0.5 * a * a * phi;
    phi * (1.0 / (a * a) + m * m + a.powi(3) * phi * phi * (0.75 * a - sign * phi))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridFailure {
    pub a: f64,
    pub phi: f64,
    pub sign: f64,
    pub quartic: f64,
    pub factored: f64,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndpointReport {
    pub n_a: usize,
    pub n_phi: usize,
    pub max_rel_diff: f64,
    pub min_value: f64,
    pub failures: Vec<GridFailure>,
    /// At `φ = 1/a`, `a = 10³`: size of the cubic and linear terms.
    pub cubic_term_at_top: f64,
    pub linear_term_at_top: f64,
    pub pass: bool,
}

/// Equality and nonnegativity over a log grid `a ∈ [10, 10³]`,
/// `aφ ∈ [10⁻⁸, 1]`, both signs. `flip` negates the alternating terms of the
/// quartic only, which must break the equality.
pub fn endpoint_check(n_a: usize, n_phi: usize, flip: bool) -> EndpointReport {
    let logspace = |lo: f64, hi: f64, n: usize, i: usize| {
        if n == 1 {
            return hi;
        }
        (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()
    };
    let mut max_rel = 0.0f64;
    let mut min_value = f64::INFINITY;
    let mut failures = Vec::new();
    for i in 0..n_a {
        let a = logspace(10.0, 1e3, n_a, i);
        for j in 0..n_phi {
            let phi = logspace(1e-8, 1.0, n_phi, j) / a;
            for sign in [1.0, -1.0] {
                let q = endpoint_quartic(a, phi, if flip { -sign } else { sign });
                let f = endpoint_factored(a, phi, sign);
                let scale = 10.0 * phi / (a * a) + 3.0 * a * phi * phi + a.powi(4) * phi.powi(3) + a.powi(3) * phi.powi(4);
                let rel = (q - f).abs() / scale;
                max_rel = max_rel.max(rel);
                min_value = min_value.min(q.min(f));
                if rel > 1e-12 || q < 0.0 || f < 0.0 {
                    failures.push(GridFailure {
                        a,
                        phi,
                        sign,
                        quartic: q,
                        factored: f,
                        rel_diff: rel,
                    });
                }
            }
        }
    }
    let a = 1e3f64;
    let phi = 1.0 / a;
    EndpointReport {
        n_a,
        n_phi,
        max_rel_diff: max_rel,
        min_value,
        pass: failures.is_empty(),
        failures,
        cubic_term_at_top: a.powi(4) * phi.powi(3),
        linear_term_at_top: 10.0 * phi / (a * a),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityFuzz {
    pub samples: usize,
    pub seed: u64,
    pub max_rel: f64,
    pub pass: bool,
}

/// `A + Q` against its regrouped form on random φ-bundles at random profile
/// points.
pub fn identity_fuzz(profile: &YinYangProfile, samples: usize, seed: u64) -> Result<IdentityFuzz> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s_max = profile.s_max();
    let mut max_rel = 0.0f64;
    for _ in 0..samples {
        let s = rng.gen_range(-s_max..s_max);
        let f = profile.frame(s)?;
        let mut v = || rng.gen_range(-1.0..1.0) * 10f64.powf(rng.gen_range(-3.0..1.0));
        let b = PhiBundle {
            phi: v(),
            phi_s: v(),
            phi_ss: v(),
            phi_t: v(),
        };
        let lhs = a_op(&f, &b) + q_op(&f, &b);
        let rhs = regrouped(&f, &b);
        let scale = a_op(&f, &b).abs() * (1.0 + (3.0 * b.phi * f.h).abs())
            + f.h.abs() * (2.0 * (b.phi * b.phi_ss).abs() + b.phi_s * b.phi_s + (b.phi * f.h).powi(2));
        max_rel = max_rel.max((lhs - rhs).abs() / scale.max(f64::MIN_POSITIVE));
    }
    Ok(IdentityFuzz {
        samples,
        seed,
        max_rel,
        pass: max_rel <= 1e-10,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruncationFit {
    pub s: f64,
    pub scales: Vec<f64>,
    pub remainders: Vec<f64>,
    /// Least-squares slope of `log|residual - (A + Q)|` against `log c`.
    pub exponent: f64,
}

/// Scale a φ-bundle by `c` and fit how fast the part of the exact residual
/// not captured by `A + Q` vanishes.
pub fn truncation_fit(profile: &YinYangProfile, s: f64, base: &PhiBundle, scales: &[f64]) -> Result<TruncationFit> {
    let f = profile.frame(s)?;
    let rem: Vec<f64> = scales
        .iter()
        .map(|&c| {
            let b = base.scale(c);
            (full_residual(&f, &b) - a_op(&f, &b) - q_op(&f, &b)).abs()
        })
        .collect();
    let xs: Vec<f64> = scales.iter().map(|c| c.ln()).collect();
    let ys: Vec<f64> = rem.iter().map(|r| r.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(TruncationFit {
        s,
        scales: scales.to_vec(),
        remainders: rem,
        exponent: sxy / sxx,
    })
}

/// Finds where the exact residual of the barrier first becomes positive when
/// walking in from each end, in units of `log(a)/a`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Crossover {
    pub left: f64,
    pub right: f64,
    pub min_residual: f64,
    pub min_at: f64,
}

pub fn residual_crossover(profile: &YinYangProfile, params: &BarrierParams, n: usize) -> Result<Crossover> {
    let (lo, hi) = (-params.l, params.r);
    let unit = params.a.ln() / params.a;
    let reach = (20.0 * unit).min(0.5 * (hi - lo));
    let mut left = 0.0;
    let mut right = 0.0;
    let mut min_r = f64::INFINITY;
    let mut min_at = lo;
    for k in 0..=n {
        let d = reach * k as f64 / n as f64;
        for (s, side) in [(lo + d, 0), (hi - d, 1)] {
            let r = full_residual(&profile.frame(s)?, &params.phi(s));
            if r < min_r {
                min_r = r;
                min_at = s;
            }
            if r <= 0.0 {
                if side == 0 {
                    left = d / unit;
                } else {
                    right = d / unit;
                }
            }
        }
    }
    Ok(Crossover {
        left,
        right,
        min_residual: min_r,
        min_at,
    })
}

/// Lower bounds on the tip drift, compared with finite-difference rates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DriftMargins {
    pub t: f64,
    pub l_minus_rate: f64,
    pub w_rate: f64,
    pub a_rate: f64,
    /// `-L̇₋ - (<F,N> + a sqrt(1 - H²/|F|²))` at `s = -L₋`.
    pub tip_advance: f64,
    /// `ẇ - w³/π²`.
    pub width_rate: f64,
    /// `ẇ - (1-ε)³/a³`.
    pub width_rate_a: f64,
    /// `-a L̇ - (a² + a<F,N> + 10/a²)` with `L = L₋ - λw`.
    pub shift_rate: f64,
    /// `-ȧ - (1-ε)²/a`.
    pub a_decay: f64,
}

impl DriftMargins {
    pub fn min(&self) -> f64 {
        self.tip_advance.min(self.width_rate).min(self.width_rate_a).min(self.shift_rate).min(self.a_decay)
    }
}

/// Three-point backward derivative on a non-uniform grid, at the last point.
pub fn backward_rate(t: [f64; 3], y: [f64; 3]) -> f64 {
    let (h1, h2) = (t[2] - t[1], t[1] - t[0]);
    let c2 = (2.0 * h1 + h2) / (h1 * (h1 + h2));
    let c1 = -(h1 + h2) / (h1 * h2);
    let c0 = h1 / (h2 * (h1 + h2));
    c2 * y[2] + c1 * y[1] + c0 * y[0]
}

/// Margins at the last of three samples `(t, L₋, w)`.
pub fn drift_margins(profile: &YinYangProfile, eps: f64, lam: f64, t: [f64; 3], l_minus: [f64; 3], w: [f64; 3]) -> Result<DriftMargins> {
    let ld = backward_rate(t, l_minus);
    let wd = backward_rate(t, w);
    let a_of = |w: f64| PI * (1.0 - eps) / w;
    let ad = backward_rate(t, [a_of(w[0]), a_of(w[1]), a_of(w[2])]);
    let a = a_of(w[2]);
    let f = profile.frame(-l_minus[2])?;
    let r = f.p.norm();
    let advance_bound = f.f_n + a * (1.0 - (f.h / r).powi(2)).max(0.0).sqrt();
    // L = L₋ - λ w.
    let l_rate = ld - lam * wd;
    Ok(DriftMargins {
        t: t[2],
        l_minus_rate: ld,
        w_rate: wd,
        a_rate: ad,
        tip_advance: -ld - advance_bound,
        width_rate: wd - w[2].powi(3) / (PI * PI),
        width_rate_a: wd - ((1.0 - eps) / a).powi(3),
        shift_rate: -a * l_rate - (a * a + a * f.f_n + 10.0 / (a * a)),
        a_decay: -ad - (1.0 - eps).powi(2) / a,
    })
}

/// Scan of `a|<F,N>| + H²` on `[-span, span]`; returns the argmin.
pub fn convexity_scan(profile: &YinYangProfile, a: f64, span: f64, n: usize) -> Result<f64> {
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=n {
        let s = -span + 2.0 * span * k as f64 / n as f64;
        let f = profile.frame(s)?;
        let v = a * f.f_n.abs() + f.h * f.h;
        if v < best.0 {
            best = (v, s);
        }
    }
    Ok(best.1)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StabilityReport {
    pub w: f64,
    /// Rescaled curvature at the tip vertex.
    pub tip_curvature: f64,
    /// Max vertical and angular deviation from the standard reaper over the
    /// compared window (rescaled units).
    pub c0: f64,
    pub c1: f64,
    pub window_vertices: usize,
    /// Max rescaled curvature outside the ball of radius `radius_mult * w`.
    pub away_ball: f64,
    /// Max rescaled curvature outside the compared tip window.
    pub away_window: f64,
}

/// Compare the tip neighbourhood, rescaled by `π/w` and aligned with the
/// inward normal at the tip, with the standard reaper on `|x| <= x_max`.
pub fn stability_check(curve: &PlaneCurve, tip_index: usize, w: f64, radius_mult: f64, x_max: f64) -> Result<StabilityReport> {
    if tip_index >= curve.len() {
        return Err(invalid("tip_index", "out of range"));
    }
    let scale = PI / w;
    let pts = curve.points();
    let n = pts.len();
    let tip = pts[tip_index];
    let axis = curve.normal(tip_index);
    let lateral = -axis.perp();
    let local = |p: Vec2| {
        let d = (p - tip) * scale;
        Vec2::new(d.dot(lateral), d.dot(axis))
    };
    let mut in_window = vec![false; n];
    let (mut c0, mut c1) = (0.0f64, 0.0f64);
    let mut count = 0;
    for dir in [1usize, n - 1] {
        let mut i = tip_index;
        for _ in 0..n {
            let q = local(pts[i]);
            if q.x.abs() > x_max {
                break;
            }
            if !in_window[i] {
                in_window[i] = true;
                count += 1;
                c0 = c0.max((q.y - graph(1.0, q.x)).abs() * q.x.cos());
                let t = curve.tangents()[i];
                let tl = Vec2::new(t.dot(lateral), t.dot(axis));
                let reference = Vec2::new(q.x.cos(), q.x.sin());
                c1 = c1.max(tl.cross(reference).abs().asin());
            }
            i = (i + dir) % n;
        }
    }
    let r = radius_mult * w;
    let (mut ball, mut win) = (0.0f64, 0.0f64);
    for i in 0..n {
        let k = curve.curvature()[i].abs() / scale;
        if pts[i].dist(tip) > r {
            ball = ball.max(k);
        }
        if !in_window[i] {
            win = win.max(k);
        }
    }
    Ok(StabilityReport {
        w,
        tip_curvature: curve.curvature()[tip_index] / scale,
        c0,
        c1,
        window_vertices: count,
        away_ball: ball,
        away_window: win,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile() -> YinYangProfile {
        YinYangProfile::integrate(60.0, 1e-12).unwrap()
    }

    #[test]
    fn phi_closed_forms() {
        let p = BarrierParams::new(0.1, 0.3, 40.0, 45.0).unwrap();
        let (psi, _) = p.halves(-p.l);
        assert!((psi - 1.0 / p.a).abs() < 1e-15 * psi);
        let mid = 0.5 * (p.r - p.l);
        let b = p.phi(mid);
        let approx = 2.0 * (-p.a * (p.r + p.l) / 2.0).exp() / p.a;
        assert!((b.phi - approx).abs() < 1e-12 * approx);
    }

    #[test]
    fn phi_derivatives_match_finite_differences() {
        let p = BarrierParams::new(0.1, 0.5, 30.0, 31.0).unwrap().with_rates(-0.3, -2.0, -1.5);
        let s = -p.l + 0.2;
        let d = 1e-5;
        let b = p.phi(s);
        let fd_s = (p.phi(s + d).phi - p.phi(s - d).phi) / (2.0 * d);
        let fd_ss = (p.phi(s + d).phi - 2.0 * b.phi + p.phi(s - d).phi) / (d * d);
        assert!((fd_s - b.phi_s).abs() < 1e-8 * b.phi_s.abs());
        assert!((fd_ss - b.phi_ss).abs() < 1e-5 * b.phi_ss.abs());
        // Time derivative through the parameters (a, L, R at t ± d).
        let at = |dt: f64| {
            let a = p.a + p.a_dot * dt;
            let w = PI * (1.0 - p.eps) / a;
            let k = 1.0 / (PI * (1.0 - p.eps));
            let l = p.l + p.l_dot * dt;
            let r = p.r + p.r_dot * dt;
            k * w * (-a * (l + s)).exp() + k * w * (-a * (r - s)).exp()
        };
        let fd_t = (at(d) - at(-d)) / (2.0 * d);
        assert!((fd_t - b.phi_t).abs() < 1e-8 * b.phi_t.abs(), "{fd_t} {}", b.phi_t);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BarrierParams::new(1.0, 0.3, 40.0, 40.0).is_err());
        assert!(BarrierParams::new(0.1, 0.3, 5.0, 5.0).is_err());
        assert!(BarrierParams::with_lambdas(0.1, 1e-9, 0.3, 10.0, 0.3, 40.0, 40.0).is_err());
    }

    #[test]
    fn operators_on_zero_and_scaling() {
        let pr = profile();
        let f = pr.frame(7.3).unwrap();
        assert_eq!(a_op(&f, &PhiBundle::ZERO), 0.0);
        assert_eq!(q_op(&f, &PhiBundle::ZERO), 0.0);
        let b = PhiBundle {
            phi: 0.02,
            phi_s: -0.1,
            phi_ss: 0.4,
            phi_t: 0.05,
        };
        let a1 = a_op(&f, &b);
        assert!((a_op(&f, &b.scale(3.7)) - 3.7 * a1).abs() < 1e-14 * a1.abs().max(1.0));
        let q1 = q_op(&f, &b);
        assert!((q_op(&f, &b.scale(2.0)) - 4.0 * q1).abs() < 1e-14 * q1.abs().max(1e-3));
    }

    #[test]
    fn a_over_psi_matches_expanded_form() {
        let pr = profile();
        let p = BarrierParams::new(0.1, 0.4, 30.0, 32.0).unwrap().with_rates(-0.2, -3.0, -2.5);
        // Left half only: η is negligible near s = -L.
        let p = BarrierParams { lam_plus: 1e-300, ..p };
        for s in [-p.l + 0.01, -p.l + 0.3, -p.l + 1.0] {
            let f = pr.frame(s).unwrap();
            let b = p.phi(s);
            let direct = a_op(&f, &b) / b.phi;
            let a = p.a;
            let formula = -p.a_dot / a - p.a_dot * (p.l + s) - a * p.l_dot - a * a - a * f.f_n - f.h * f.h;
            assert!((direct - formula).abs() < 1e-8 * formula.abs(), "{direct} {formula}");
        }
    }

    #[test]
    fn exact_residual_vanishes_on_the_soliton() {
        let pr = profile();
        for s in [-50.0, -3.0, 0.0, 1.5, 40.0] {
            let f = pr.frame(s).unwrap();
            assert!(full_residual(&f, &PhiBundle::ZERO).abs() < 1e-12);
        }
    }

    #[test]
    fn endpoint_forms_agree() {
        let r = endpoint_check(100, 100, false);
        assert!(r.pass, "{:?}", r.failures.first());
        assert!(r.max_rel_diff < 1e-12);
        assert!(r.min_value >= 0.0);
        let flipped = endpoint_check(10, 10, true);
        assert!(!flipped.pass);
    }

    #[test]
    fn backward_rate_is_exact_for_quadratics() {
        let f = |t: f64| 3.0 * t * t - 2.0 * t + 1.0;
        let t = [0.1, 0.25, 0.32];
        let r = backward_rate(t, [f(t[0]), f(t[1]), f(t[2])]);
        assert!((r - (6.0 * 0.32 - 2.0)).abs() < 1e-12);
    }
}
