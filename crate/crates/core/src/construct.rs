//! Admissible initial curves: a Grim Reaper tip glued into the Yin-Yang
//! corridor.
//!
//! Everything is built in the frame where the anchor `A = F(s)` lies on the
//! positive y-axis. In that frame the corridor runs horizontally near the
//! chord `AB`, the origin side is `+x`, and the reaper opens towards `+x`.
//! The finished closed curve is rotated back so it sits in the unrotated
//! corridor.

use crate::curve::{edge_spacing, PlaneCurve};
use crate::error::{invalid, Error, Result};
use crate::flow::radial_tangencies;
use crate::reaper::{ReaperPose, DEFAULT_CLIP};
use crate::roots::bisect;
use crate::vec2::Vec2;
use crate::yinyang::{rhs, YinYangProfile, CORRIDOR_MIN_ABS_S};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConstructConfig {
    /// Smallest accepted `|s|`.
    pub min_abs_s: f64,
    /// Largest turning angle per edge used to set vertex spacing.
    pub max_turn: f64,
    /// Spacing cap on the nearly straight walls.
    pub h_max: f64,
    /// Cap on the chord sag of each edge. Zero disables it.
    #[serde(default)]
    pub max_sag: f64,
    /// Spacing may grow by this much per unit arclength.
    pub grading: f64,
    /// Arclength from Q to U and to V, in units of `w`.
    pub glue_offset: f64,
    /// Half width of the blend window around P, in units of `w`.
    pub blend_half_window: f64,
    /// Bound asserted on the rescaled curvature of the whole curve.
    pub m_bound: f64,
    /// Inflection hysteresis, relative to the max |curvature|.
    pub theta_h: f64,
    /// Containment slack, in units of `w`.
    pub containment_tol: f64,
}

impl Default for ConstructConfig {
    fn default() -> Self {
        Self {
            min_abs_s: 200.0,
            max_turn: 0.05,
            h_max: 0.5,
            max_sag: 0.0,
            grading: 0.15,
            glue_offset: 1.0,
            blend_half_window: 1.0,
            m_bound: 1.5,
            theta_h: 1e-3,
            containment_tol: 0.01,
        }
    }
}

impl ConstructConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, name: &'static str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be positive, got {v}")))
            }
        };
        pos(self.min_abs_s, "min_abs_s")?;
        pos(self.max_turn, "max_turn")?;
        pos(self.h_max, "h_max")?;
        if !(self.max_sag >= 0.0 && self.max_sag.is_finite()) {
            return Err(invalid("max_sag", format!("must be non-negative, got {}", self.max_sag)));
        }
        pos(self.grading, "grading")?;
        pos(self.glue_offset, "glue_offset")?;
        pos(self.blend_half_window, "blend_half_window")?;
        pos(self.m_bound, "m_bound")?;
        pos(self.theta_h, "theta_h")?;
        pos(self.containment_tol, "containment_tol")
    }
}

/// The profile seen in the rotated construction frame.
#[derive(Clone, Copy)]
pub struct RotatedWall<'a> {
    pub profile: &'a YinYangProfile,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct WallPoint {
    pub p: Vec2,
    pub t: Vec2,
    pub h: f64,
}

impl RotatedWall<'_> {
    pub fn at(&self, s: f64) -> Result<WallPoint> {
        let q = self.profile.position(s)?;
        let t = rhs(q);
        Ok(WallPoint {
            p: q.rotate(self.beta),
            t: t.rotate(self.beta),
            h: q.dot(t),
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Chord {
    pub s: f64,
    pub sigma: f64,
    pub width: f64,
    /// Rotation taking the profile into the construction frame.
    pub beta: f64,
    pub a: Vec2,
    pub b: Vec2,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Slide {
    pub reaper: ReaperPose,
    pub p: Vec2,
    pub s0: f64,
    /// Distance the tip moved from the chord midpoint towards the origin.
    pub delta: f64,
    /// Reaper arclength of P (lower arm, positive).
    pub l_p: f64,
    /// `|sin|` of the angle between wall and reaper tangents at P.
    pub tangency_sin: f64,
    /// `Λ`: rescaled distance from P to the line OA.
    pub lambda_cap: f64,
    pub reaper_curvature_rescaled: f64,
    pub wall_curvature_rescaled: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Crossing {
    pub q: Vec2,
    pub sigma0: f64,
    /// Reaper arclength of Q (upper arm, negative).
    pub l_q: f64,
    pub transversality_sin: f64,
    /// `Λ̄`: rescaled distance from Q to the line OB.
    pub lambda_bar: f64,
    pub distance_to_ray: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GlueSide {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Glue {
    pub side: GlueSide,
    /// Fine samples of the joint, in traversal order.
    pub points: Vec<Vec2>,
    pub curvature: Vec<f64>,
    pub max_rescaled_curvature: f64,
    pub inflections: usize,
    /// Largest mismatch of (position, tangent angle, curvature) at the ends.
    pub end_mismatch: [f64; 3],
    /// Intersection of the end tangent lines (positive side only).
    pub w_point: Option<Vec2>,
    pub w_far: bool,
    /// Joint lies in both tangent half-planes (positive side only).
    pub inside_wuv: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstructionSite {
    pub s: f64,
    pub sigma: f64,
    pub s0: f64,
    pub sigma0: f64,
    pub width: f64,
    #[serde(rename = "Lambda")]
    pub lambda_cap: f64,
    #[serde(rename = "LambdaBar")]
    pub lambda_bar: f64,
    /// `Λ̄` for the reaper before sliding (upper asymptote through B).
    #[serde(rename = "LambdaBarUnslid")]
    pub lambda_bar_unslid: f64,
    pub beta: f64,
    pub a: Vec2,
    pub b: Vec2,
    pub p: Vec2,
    pub q: Vec2,
    pub u: Vec2,
    pub v: Vec2,
    pub w_point: Option<Vec2>,
    /// Reaper arclength of U and Yin-Yang arclength of V.
    pub u_arclength: f64,
    pub v_arclength: f64,
    pub reaper: ReaperPose,
    pub slide: f64,
    pub tangency_sin: f64,
    pub transversality_sin: f64,
    pub reaper_curvature_rescaled: f64,
    pub wall_curvature_rescaled: f64,
    /// Max rescaled curvature over the whole closed curve.
    pub m_observed: f64,
    pub glue_max_positive: f64,
    pub glue_max_negative: f64,
    pub negative_glue_inflections: usize,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissibleCurve {
    pub curve: PlaneCurve,
    pub site: ConstructionSite,
    pub inflection_count: usize,
    pub embedded: bool,
    pub radial_tangencies: usize,
    /// Smallest signed distance to the corridor walls over the vertices
    /// (negative = outside).
    pub min_corridor_margin: f64,
    /// Tip of the curve in the unrotated frame.
    pub tip: Vec2,
    /// Samples of the positive joint and the negative blend, in the
    /// construction frame (rotated by `site.beta`).
    pub glue_points: [Vec<Vec2>; 2],
}

pub fn select_chord(profile: &YinYangProfile, s: f64) -> Result<Chord> {
    let q = profile.corridor_width(s)?;
    let a0 = profile.position(s)?;
    let beta = PI / 2.0 - a0.angle();
    let mut a = a0.rotate(beta);
    a.x = 0.0;
    let b = profile.position(q.sigma)?.rotate(beta);
    Ok(Chord {
        s,
        sigma: q.sigma,
        width: q.width,
        beta,
        a,
        b,
    })
}

/// Place a reaper of width `|AB|` with its tip at the chord midpoint, then
/// slide it towards the origin until it touches the negative wall.
pub fn place_and_slide(profile: &YinYangProfile, chord: &Chord) -> Result<Slide> {
    let wall = RotatedWall { profile, beta: chord.beta };
    let w = chord.width;
    let lambda = PI / w;
    let y_mid = 0.5 * (chord.a.y + chord.b.y);
    let axis = (-chord.a.perp()).normalized();
    let tip_x = chord.a.x;

    // Gap between the lower arm and the wall, measured vertically.
    let gap = |s: f64| -> f64 {
        let wp = wall.at(s).unwrap();
        let x = (wp.p.x - tip_x).max(0.0);
        y_mid - (-lambda * x).exp().acos() / lambda - wp.p.y
    };
    let dgap = |s: f64| -> f64 {
        let wp = wall.at(s).unwrap();
        let x = (wp.p.x - tip_x).max(1e-300);
        -wp.t.x / (2.0 * lambda * x).exp_m1().sqrt() - wp.t.y
    };
    let ds = w / 16.0;
    let mut lo = chord.s + 1e-9 * w;
    if dgap(lo) >= 0.0 {
        return Err(Error::Construction {
            step: "place_and_slide",
            reason: "the wall does not recede from the lower arm at A".into(),
        });
    }
    let mut hi = lo;
    loop {
        let next = (hi + ds).min(-1e-9);
        if next <= hi {
            return Err(Error::Construction {
                step: "place_and_slide",
                reason: "no tangency with the negative wall within the slide range".into(),
            });
        }
        hi = next;
        let wp = wall.at(hi)?;
        if wp.p.x - tip_x > 40.0 * w {
            return Err(Error::Construction {
                step: "place_and_slide",
                reason: "no tangency within 40 widths of the chord".into(),
            });
        }
        if dgap(hi) > 0.0 {
            break;
        }
        lo = hi;
    }
    let s0 = bisect(dgap, lo, hi, 1e-12)?;
    let delta = gap(s0);
    if !(delta > 0.0) {
        return Err(Error::Construction {
            step: "place_and_slide",
            reason: format!("reaper already crosses the negative wall (gap {delta:e})"),
        });
    }
    let tip = Vec2::new(tip_x, y_mid - delta);
    let reaper = ReaperPose::new(lambda, tip, axis, DEFAULT_CLIP)?;
    let wp = wall.at(s0)?;
    let u = reaper.to_local(wp.p).x;
    let l_p = reaper.arclength_of_u(u);
    let tr = reaper.tangent_at_arclength(l_p);
    let lambda_cap = PI * (wp.p.x - tip_x) / w;
    Ok(Slide {
        reaper,
        p: wp.p,
        s0,
        delta,
        l_p,
        tangency_sin: tr.cross(wp.t).abs(),
        lambda_cap,
        reaper_curvature_rescaled: reaper.curvature_at_arclength(l_p) * w / PI,
        wall_curvature_rescaled: wp.h.abs() * w / PI,
    })
}

/// First crossing of the upper reaper arm with the positive wall, scanning
/// the wall from B towards the origin.
pub fn first_intersection(profile: &YinYangProfile, chord: &Chord, reaper: &ReaperPose) -> Result<Crossing> {
    let wall = RotatedWall { profile, beta: chord.beta };
    let w = chord.width;
    let lambda = reaper.lambda;
    let yc = reaper.tip.y;
    let tip_x = reaper.tip.x;
    let excess = |s: f64| -> f64 {
        let wp = wall.at(s).unwrap();
        let x = (wp.p.x - tip_x).max(0.0);
        wp.p.y - yc - (-lambda * x).exp().acos() / lambda
    };
    let ds = w / 16.0;
    let mut hi = chord.sigma;
    if !(excess(hi) > 0.0) {
        return Err(Error::Construction {
            step: "first_intersection",
            reason: "upper arm starts outside the positive wall".into(),
        });
    }
    let mut lo = hi;
    loop {
        lo = (lo - ds).max(1e-9);
        if excess(lo) <= 0.0 {
            break;
        }
        if lo <= 1e-9 || wall.at(lo)?.p.x - tip_x > 40.0 * w {
            return Err(Error::Construction {
                step: "first_intersection",
                reason: "upper arm never meets the positive wall".into(),
            });
        }
        hi = lo;
    }
    let sigma0 = bisect(excess, lo, hi, 1e-10)?;
    let wp = wall.at(sigma0)?;
    let u = reaper.to_local(wp.p).x;
    let l_q = reaper.arclength_of_u(u);
    let tr = reaper.tangent_at_arclength(l_q);
    let dist = (wp.p.x - tip_x).abs();
    Ok(Crossing {
        q: wp.p,
        sigma0,
        l_q,
        transversality_sin: tr.cross(wp.t).abs(),
        lambda_bar: PI * dist / w,
        distance_to_ray: dist,
    })
}

/// Quintic on `[0, 1]` from value, first and second derivative at both ends.
#[derive(Debug, Clone, Copy)]
pub struct Quintic {
    c: [f64; 6],
}

impl Quintic {
    pub fn hermite(p0: f64, d0: f64, e0: f64, p1: f64, d1: f64, e1: f64) -> Self {
        let (c0, c1, c2) = (p0, d0, 0.5 * e0);
        let r0 = p1 - c0 - c1 - c2;
        let r1 = d1 - c1 - 2.0 * c2;
        let r2 = e1 - 2.0 * c2;
        Self {
            c: [
                c0,
                c1,
                c2,
                10.0 * r0 - 4.0 * r1 + 0.5 * r2,
                -15.0 * r0 + 7.0 * r1 - r2,
                6.0 * r0 - 3.0 * r1 + 0.5 * r2,
            ],
        }
    }

    /// Value, first and second derivative.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let c = &self.c;
        let f = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
        let d = c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])));
        let e = 2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]));
        (f, d, e)
    }
}

/// `6t⁵ - 15t⁴ + 10t³`, flat to second order at both ends.
#[inline]
pub fn smoothstep5(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

/// Convex joint from `V` on the positive wall to `U` on the reaper, as a
/// quintic graph over the chord `UV`.
pub struct PositiveJoint {
    pub v: Vec2,
    pub u: Vec2,
    pub e1: Vec2,
    pub e2: Vec2,
    pub len: f64,
    pub poly: Quintic,
    pub v_arclength: f64,
    pub u_arclength: f64,
}

impl PositiveJoint {
    pub fn new(profile: &YinYangProfile, chord: &Chord, reaper: &ReaperPose, cross: &Crossing, cfg: &ConstructConfig) -> Result<Self> {
        let wall = RotatedWall { profile, beta: chord.beta };
        let off = cfg.glue_offset * chord.width;
        let l_u = cross.l_q + off;
        if l_u >= 0.0 {
            return Err(Error::Construction {
                step: "glue",
                reason: format!("U would pass the reaper tip (l_U = {l_u:.4}); increase |s|"),
            });
        }
        let s_v = cross.sigma0 - off;
        if s_v <= 0.0 {
            return Err(Error::Construction {
                step: "glue",
                reason: "V would pass the origin".into(),
            });
        }
        let vw = wall.at(s_v)?;
        let u = reaper.point_at_arclength(l_u);
        let tu = reaper.tangent_at_arclength(l_u);
        let ku = reaper.curvature_at_arclength(l_u);
        let d = u - vw.p;
        let len = d.norm();
        let e1 = d / len;
        let e2 = e1.perp();
        let slope = |t: Vec2| -> Result<f64> {
            let c = t.dot(e1);
            if c <= 0.0 {
                return Err(Error::Construction {
                    step: "glue",
                    reason: "joint end tangent is not graphical over UV".into(),
                });
            }
            Ok(t.dot(e2) / c)
        };
        let m0 = slope(vw.t)?;
        let m1 = slope(tu)?;
        let a0 = vw.h * (1.0 + m0 * m0).powf(1.5);
        let a1 = ku * (1.0 + m1 * m1).powf(1.5);
        let poly = Quintic::hermite(0.0, len * m0, len * len * a0, 0.0, len * m1, len * len * a1);
        Ok(Self {
            v: vw.p,
            u,
            e1,
            e2,
            len,
            poly,
            v_arclength: s_v,
            u_arclength: l_u,
        })
    }

    /// Point and signed curvature at chord fraction `t`.
    pub fn eval(&self, t: f64) -> (Vec2, f64) {
        let (f, d, e) = self.poly.eval(t);
        let (d1, d2) = (d / self.len, e / (self.len * self.len));
        let p = self.v + self.e1 * (t * self.len) + self.e2 * f;
        (p, d2 / (1.0 + d1 * d1).powf(1.5))
    }

    pub fn tangent(&self, t: f64) -> Vec2 {
        let (_, d, _) = self.poly.eval(t);
        (self.e1 + self.e2 * (d / self.len)).normalized()
    }
}

/// Blend from the reaper's lower arm into the negative wall around P, in
/// graph coordinates over the common tangent at P.
pub struct NegativeBlend<'a> {
    wall: RotatedWall<'a>,
    reaper: ReaperPose,
    pub p: Vec2,
    pub e1: Vec2,
    pub e2: Vec2,
    pub half: f64,
    s0: f64,
    l_p: f64,
}

impl<'a> NegativeBlend<'a> {
    pub fn new(profile: &'a YinYangProfile, chord: &Chord, slide: &Slide, cfg: &ConstructConfig) -> Result<Self> {
        let wall = RotatedWall { profile, beta: chord.beta };
        let wp = wall.at(slide.s0)?;
        // Keep the window on the lower arm: the tip projects to a negative
        // tangent coordinate and the reaper stops being a graph beyond it.
        let tip_xi = (slide.reaper.tip - wp.p).dot(wp.t);
        if !(tip_xi < 0.0) {
            return Err(invalid("blend", format!("reaper tip projects ahead of P ({tip_xi})")));
        }
        Ok(Self {
            wall,
            reaper: slide.reaper,
            p: wp.p,
            e1: wp.t,
            e2: wp.t.perp(),
            half: (cfg.blend_half_window * chord.width).min(0.5 * -tip_xi),
            s0: slide.s0,
            l_p: slide.l_p,
        })
    }

    /// Reaper arclength whose point projects to `xi` on the tangent line.
    pub fn reaper_param(&self, xi: f64) -> f64 {
        let g = |l: f64| (self.reaper.point_at_arclength(l) - self.p).dot(self.e1) - xi;
        // The projection is monotone on the lower arm only (l > 0).
        let span = 4.0 * self.half + xi.abs();
        bisect(g, 0.0, self.l_p + span, 0.0).unwrap_or(f64::NAN)
    }

    /// Wall arclength whose point projects to `xi` on the tangent line.
    pub fn wall_param(&self, xi: f64) -> f64 {
        let g = |s: f64| (self.wall.at(s).unwrap().p - self.p).dot(self.e1) - xi;
        let span = 4.0 * self.half + xi.abs();
        bisect(g, self.s0 - span, (self.s0 + span).min(-1e-9), 0.0).unwrap_or(f64::NAN)
    }

    fn heights(&self, xi: f64) -> (f64, f64, f64, f64) {
        let lr = self.reaper_param(xi);
        let sw = self.wall_param(xi);
        let hr = (self.reaper.point_at_arclength(lr) - self.p).dot(self.e2);
        let hw = (self.wall.at(sw).unwrap().p - self.p).dot(self.e2);
        let kr = self.reaper.curvature_at_arclength(lr);
        let kw = self.wall.at(sw).unwrap().h;
        (hr, hw, kr, kw)
    }

    /// Blended point at tangent coordinate `xi` and an interpolated curvature
    /// (used only to size the mesh).
    pub fn eval(&self, xi: f64) -> (Vec2, f64) {
        let chi = smoothstep5((xi + self.half) / (2.0 * self.half));
        let (hr, hw, kr, kw) = self.heights(xi);
        let eta = (1.0 - chi) * hr + chi * hw;
        (self.p + self.e1 * xi + self.e2 * eta, (1.0 - chi) * kr + chi * kw)
    }

    pub fn window(&self) -> (f64, f64) {
        (-self.half, self.half)
    }
}

fn three_point_curvature(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    2.0 * (b - a).cross(c - b) / (a.dist(b) * b.dist(c) * a.dist(c))
}

/// Sign changes with hysteresis on an open sequence.
fn sign_changes(k: &[f64], theta_h: f64) -> usize {
    let thr = theta_h * k.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut sign = 0.0;
    let mut n = 0;
    for &v in k {
        if v.abs() > thr {
            if sign != 0.0 && v.signum() != sign {
                n += 1;
            }
            sign = v.signum();
        }
    }
    n
}

const GLUE_SAMPLES: usize = 2001;

pub fn glue_positive(profile: &YinYangProfile, chord: &Chord, reaper: &ReaperPose, cross: &Crossing, cfg: &ConstructConfig) -> Result<(PositiveJoint, Glue)> {
    let j = PositiveJoint::new(profile, chord, reaper, cross, cfg)?;
    let wall = RotatedWall { profile, beta: chord.beta };
    let w = chord.width;
    let mut points = Vec::with_capacity(GLUE_SAMPLES);
    let mut curvature = Vec::with_capacity(GLUE_SAMPLES);
    for i in 0..GLUE_SAMPLES {
        let (p, k) = j.eval(i as f64 / (GLUE_SAMPLES - 1) as f64);
        points.push(p);
        curvature.push(k);
    }
    let vw = wall.at(j.v_arclength)?;
    let ang = |a: Vec2, b: Vec2| a.cross(b).atan2(a.dot(b)).abs();
    let end_mismatch = [
        points[0].dist(vw.p).max(points[GLUE_SAMPLES - 1].dist(j.u)),
        ang(j.tangent(0.0), vw.t).max(ang(j.tangent(1.0), reaper.tangent_at_arclength(j.u_arclength))),
        (curvature[0] - vw.h)
            .abs()
            .max((curvature[GLUE_SAMPLES - 1] - reaper.curvature_at_arclength(j.u_arclength)).abs()),
    ];
    // Tangent lines at V and U and their intersection W.
    let tv = vw.t;
    let tu = reaper.tangent_at_arclength(j.u_arclength);
    let den = tv.cross(tu);
    let w_point = (den.abs() > 1e-14).then(|| vw.p + tv * ((j.u - vw.p).cross(tu) / den));
    let mid = vw.p.lerp(j.u, 0.5);
    let w_far = w_point.map_or(true, |wp| wp.dist(mid) > 10.0 * w);
    let slack = 1e-12 * w;
    let inside_wuv = points
        .iter()
        .all(|&p| tv.cross(p - vw.p) >= -slack && tu.cross(p - j.u) >= -slack);
    let max_k = curvature.iter().fold(0.0f64, |m, k| m.max(k.abs()));
    let glue = Glue {
        side: GlueSide::Positive,
        inflections: sign_changes(&curvature, cfg.theta_h),
        max_rescaled_curvature: max_k * w / PI,
        points,
        curvature,
        end_mismatch,
        w_point,
        w_far,
        inside_wuv,
    };
    Ok((j, glue))
}

pub fn glue_negative<'a>(profile: &'a YinYangProfile, chord: &Chord, slide: &Slide, cfg: &ConstructConfig) -> Result<(NegativeBlend<'a>, Glue)> {
    let b = NegativeBlend::new(profile, chord, slide, cfg)?;
    let w = chord.width;
    let (lo, hi) = b.window();
    let points: Vec<Vec2> = (0..GLUE_SAMPLES)
        .map(|i| b.eval(lo + (hi - lo) * i as f64 / (GLUE_SAMPLES - 1) as f64).0)
        .collect();
    let mut curvature = vec![0.0; GLUE_SAMPLES];
    for i in 1..GLUE_SAMPLES - 1 {
        curvature[i] = three_point_curvature(points[i - 1], points[i], points[i + 1]);
    }
    curvature[0] = curvature[1];
    curvature[GLUE_SAMPLES - 1] = curvature[GLUE_SAMPLES - 2];
    // C² check: one-sided stencils straddling each end, blend against host.
    let d = (hi - lo) / (GLUE_SAMPLES - 1) as f64;
    let host_r = |xi: f64| b.reaper.point_at_arclength(b.reaper_param(xi));
    let host_w = |xi: f64| b.wall.at(b.wall_param(xi)).unwrap().p;
    let kb = |f: &dyn Fn(f64) -> Vec2, xi: f64| three_point_curvature(f(xi - d), f(xi), f(xi + d));
    let blend = |xi: f64| b.eval(xi).0;
    let end_mismatch = [
        points[0].dist(host_r(lo)).max(points[GLUE_SAMPLES - 1].dist(host_w(hi))),
        {
            let t = |f: &dyn Fn(f64) -> Vec2, xi: f64| (f(xi + d) - f(xi - d)).normalized();
            let a1 = t(&blend, lo).cross(t(&host_r, lo)).abs();
            let a2 = t(&blend, hi).cross(t(&host_w, hi)).abs();
            a1.max(a2)
        },
        (kb(&blend, lo) - kb(&host_r, lo)).abs().max((kb(&blend, hi) - kb(&host_w, hi)).abs()),
    ];
    let max_k = curvature.iter().fold(0.0f64, |m, k| m.max(k.abs()));
    let glue = Glue {
        side: GlueSide::Negative,
        inflections: sign_changes(&curvature, cfg.theta_h),
        max_rescaled_curvature: max_k * w / PI,
        points,
        curvature,
        end_mismatch,
        w_point: None,
        w_far: false,
        inside_wuv: true,
    };
    Ok((b, glue))
}

/// Dense samples of one arclength-like parametrized piece, last point excluded.
fn sample_piece<F: Fn(f64) -> (Vec2, f64)>(f: F, t0: f64, t1: f64, max_turn: f64, h_lo: f64, h_hi: f64, out: &mut Vec<(Vec2, f64)>) {
    let dir = (t1 - t0).signum();
    let len = (t1 - t0).abs();
    let mut t = 0.0;
    while t < len {
        let (p, k) = f(t0 + dir * t);
        out.push((p, k));
        let size = |k: f64| (max_turn / k.abs().max(1e-300)).clamp(h_lo, h_hi);
        let mut h = size(k);
        // Look ahead so a step never lands deep inside a sharper stretch.
        for _ in 0..8 {
            let ahead = size(f(t0 + dir * (t + h).min(len)).1);
            if ahead >= h {
                break;
            }
            h = ahead.max(0.5 * h);
        }
        t += h;
        if t > len - 0.25 * h && t < len {
            t = len;
        }
    }
}

pub fn build_admissible(profile: &YinYangProfile, s: f64, cfg: &ConstructConfig) -> Result<AdmissibleCurve> {
    cfg.validate()?;
    if !(s < 0.0 && s.abs() >= cfg.min_abs_s) {
        return Err(invalid(
            "s",
            format!("anchor must satisfy s <= -{}, got {s}", cfg.min_abs_s),
        ));
    }
    let chord = select_chord(profile, s)?;
    let w = chord.width;
    let slide = place_and_slide(profile, &chord)?;
    let reaper = slide.reaper;
    let cross = first_intersection(profile, &chord, &reaper)?;
    let unslid = ReaperPose {
        tip: Vec2::new(reaper.tip.x, reaper.tip.y + slide.delta),
        ..reaper
    };
    let cross0 = first_intersection(profile, &chord, &unslid)?;
    let (pj, gpos) = glue_positive(profile, &chord, &reaper, &cross, cfg)?;
    let (nb, gneg) = glue_negative(profile, &chord, &slide, cfg)?;
    let mut notes = Vec::new();

    if gpos.inflections != 0 {
        return Err(Error::Construction {
            step: "glue",
            reason: format!("positive joint is not convex ({} sign changes); increase |s|", gpos.inflections),
        });
    }
    if gpos.max_rescaled_curvature > 1.0 {
        return Err(Error::Construction {
            step: "glue",
            reason: format!(
                "positive joint rescaled curvature {:.4} exceeds 1; increase |s|",
                gpos.max_rescaled_curvature
            ),
        });
    }
    if gneg.inflections != 1 {
        return Err(Error::Construction {
            step: "glue",
            reason: format!("negative blend has {} inflections, expected 1", gneg.inflections),
        });
    }
    if gpos.w_far {
        notes.push(format!(
            "tangent lines at U and V meet farther than 10 w from the chord (W = {:?})",
            gpos.w_point
        ));
    }

    // Dense pieces in traversal order (counter-clockwise).
    let wall = RotatedWall { profile, beta: chord.beta };
    let h_lo = cfg.max_turn * w / PI / 4.0;
    let h_hi = cfg.h_max / 4.0;
    let turn = cfg.max_turn / 4.0;
    let (xl, xh) = nb.window();
    let s_b = nb.wall_param(xh);
    let l_a = nb.reaper_param(xl);
    let mut dense: Vec<(Vec2, f64)> = Vec::new();
    sample_piece(
        |t| {
            let wp = wall.at(t).unwrap();
            (wp.p, wp.h)
        },
        s_b,
        pj.v_arclength,
        turn,
        h_lo,
        h_hi,
        &mut dense,
    );
    sample_piece(|t| pj.eval(t / pj.len), 0.0, pj.len, turn, h_lo, h_hi, &mut dense);
    sample_piece(
        |t| (reaper.point_at_arclength(t), reaper.curvature_at_arclength(t)),
        pj.u_arclength,
        l_a,
        turn,
        h_lo,
        h_hi,
        &mut dense,
    );
    sample_piece(|t| nb.eval(t), xl, xh, turn, h_lo, h_hi, &mut dense);

    let pts: Vec<Vec2> = dense.iter().map(|d| d.0).collect();
    let dense_curve = PlaneCurve::new(pts, true, h_hi);
    let mut target: Vec<f64> = dense
        .iter()
        .map(|d| edge_spacing(d.1, cfg.max_turn, cfg.max_sag, 4.0 * h_lo, cfg.h_max))
        .collect();
    dense_curve.grade_spacing(&mut target, cfg.grading);
    let rotated = dense_curve.resample_graded(&target);
    let curve = rotated.map_points(|p| p.rotate(-chord.beta));

    let m_observed = curve.max_abs_curvature() * w / PI;
    if m_observed > cfg.m_bound {
        return Err(Error::Construction {
            step: "build_admissible",
            reason: format!("rescaled curvature {m_observed:.4} exceeds M = {}", cfg.m_bound),
        });
    }
    let inflection_count = curve.inflection_count(cfg.theta_h);
    let embedded = curve.is_embedded();
    // Inside |F(±1)| both walls wind through the origin and the polar
    // corridor is not defined; the curve follows the profile exactly there.
    let core = profile.position(CORRIDOR_MIN_ABS_S)?.norm();
    let mut min_margin = f64::INFINITY;
    for &p in curve.points().iter().filter(|p| p.norm() >= core) {
        let m = profile.corridor_margin(p, 0.0)?;
        min_margin = min_margin.min(m.normal);
    }
    let site = ConstructionSite {
        s,
        sigma: chord.sigma,
        s0: slide.s0,
        sigma0: cross.sigma0,
        width: w,
        lambda_cap: slide.lambda_cap,
        lambda_bar: cross.lambda_bar,
        lambda_bar_unslid: cross0.lambda_bar,
        beta: chord.beta,
        a: chord.a,
        b: chord.b,
        p: slide.p,
        q: cross.q,
        u: pj.u,
        v: pj.v,
        w_point: gpos.w_point,
        u_arclength: pj.u_arclength,
        v_arclength: pj.v_arclength,
        reaper,
        slide: slide.delta,
        tangency_sin: slide.tangency_sin,
        transversality_sin: cross.transversality_sin,
        reaper_curvature_rescaled: slide.reaper_curvature_rescaled,
        wall_curvature_rescaled: slide.wall_curvature_rescaled,
        m_observed,
        glue_max_positive: gpos.max_rescaled_curvature,
        glue_max_negative: gneg.max_rescaled_curvature,
        negative_glue_inflections: gneg.inflections,
        notes,
    };
    let radial = radial_tangencies(&curve);
    Ok(AdmissibleCurve {
        tip: reaper.tip.rotate(-chord.beta),
        curve,
        site,
        inflection_count,
        embedded,
        radial_tangencies: radial,
        min_corridor_margin: min_margin,
        glue_points: [gpos.points, gneg.points],
    })
}

impl AdmissibleCurve {
    /// True when every vertex is inside the corridor up to the configured slack.
    pub fn contained(&self, cfg: &ConstructConfig) -> bool {
        self.min_corridor_margin > -cfg.containment_tol * self.site.width
    }
}

/// The circle/reaper intersection model for `Λ̄`: the root `z ∈ (0, π/2)` of
/// `sqrt(2Rz - z²) = -log sin z`.
pub fn circle_model_z(r: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(invalid("R", format!("must exceed 1, got {r}")));
    }
    let g = |z: f64| (2.0 * r * z - z * z).sqrt() + z.sin().ln();
    bisect(g, 1e-300, PI / 2.0, 0.0)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LambdaReport {
    pub s: f64,
    pub width: f64,
    #[serde(rename = "Lambda")]
    pub lambda_cap: f64,
    #[serde(rename = "LambdaBar")]
    pub lambda_bar: f64,
    #[serde(rename = "LambdaBarUnslid")]
    pub lambda_bar_unslid: f64,
    /// `Λ e^Λ w² / π²`
    pub lambda_ratio: f64,
    /// `Λ̄² e^Λ̄ w² / (2π²)` for the slid reaper.
    pub lambda_bar_ratio: f64,
    /// Same with the unslid reaper, the configuration of the circle model.
    pub lambda_bar_unslid_ratio: f64,
    /// `Λ / Λ̄`
    pub lambda_over_bar: f64,
    /// `Λ / Λ̄` with the unslid `Λ̄`.
    pub lambda_over_bar_unslid: f64,
    pub circle_model_r: f64,
    pub circle_model_z: f64,
    pub circle_model_lambda_bar: f64,
    pub circle_model_residual: f64,
    /// Rescaled wall curvature at P over `e^{-Λ}/Λ`.
    pub wall_curvature_ratio: f64,
}

pub fn lambda_asymptotics(site: &ConstructionSite) -> Result<LambdaReport> {
    let w = site.width;
    let r = PI * PI / (w * w);
    let z = circle_model_z(r)?;
    let lb_app = -z.sin().ln();
    let resid = ((2.0 * r * z - z * z).sqrt() - lb_app).abs();
    let l = site.lambda_cap;
    let lb = site.lambda_bar;
    let lb0 = site.lambda_bar_unslid;
    Ok(LambdaReport {
        s: site.s,
        width: w,
        lambda_cap: l,
        lambda_bar: lb,
        lambda_bar_unslid: lb0,
        lambda_ratio: l * l.exp() / r,
        lambda_bar_ratio: lb * lb * lb.exp() / (2.0 * r),
        lambda_bar_unslid_ratio: lb0 * lb0 * lb0.exp() / (2.0 * r),
        lambda_over_bar: l / lb,
        lambda_over_bar_unslid: l / lb0,
        circle_model_r: r,
        circle_model_z: z,
        circle_model_lambda_bar: lb_app,
        circle_model_residual: resid,
        wall_curvature_ratio: site.wall_curvature_rescaled / ((-l).exp() / l),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quintic_matches_end_data() {
        let q = Quintic::hermite(0.3, -1.0, 2.0, 1.1, 0.5, -4.0);
        let (f0, d0, e0) = q.eval(0.0);
        let (f1, d1, e1) = q.eval(1.0);
        for (a, b) in [(f0, 0.3), (d0, -1.0), (e0, 2.0), (f1, 1.1), (d1, 0.5), (e1, -4.0)] {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn smoothstep_is_flat_at_the_ends() {
        let d = 1e-4;
        assert_eq!(smoothstep5(0.0), 0.0);
        assert_eq!(smoothstep5(1.0), 1.0);
        assert!(smoothstep5(d) < 1e-11);
        assert!(1.0 - smoothstep5(1.0 - d) < 1e-11);
    }

    #[test]
    fn circle_model_root_residual() {
        let z = circle_model_z(1e6).unwrap();
        let g = (2e6 * z - z * z).sqrt() + z.sin().ln();
        assert!(g.abs() <= 1e-8, "{g}");
        assert!(z > 0.0 && z < 1e-3);
    }
}
