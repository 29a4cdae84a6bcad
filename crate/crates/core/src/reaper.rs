//! Grim Reaper: the translating soliton `y = -(1/λ) log cos(λx)`, width `π/λ`,
//! moving with speed `λ` in the direction it opens.

use crate::curve::PlaneCurve;
use crate::error::{invalid, Result};
use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

pub const DEFAULT_CLIP: f64 = 0.995;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReaperPose {
    pub lambda: f64,
    pub tip: Vec2,
    /// Unit direction the reaper opens towards (and translates along).
    pub axis: Vec2,
    pub clip: f64,
}

impl ReaperPose {
    pub fn new(lambda: f64, tip: Vec2, axis: Vec2, clip: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid("lambda", format!("must be positive, got {lambda}")));
        }
        if !(clip > 0.0 && clip < 1.0) {
            return Err(invalid("clip", format!("must lie in (0, 1), got {clip}")));
        }
        let n = axis.norm();
        if !(n > 0.0) {
            return Err(invalid("axis", "must be nonzero"));
        }
        Ok(Self {
            lambda,
            tip,
            axis: axis / n,
            clip,
        })
    }

    /// The standard reaper `λ = 1`, tip at the origin, opening towards +y.
    pub fn standard() -> Self {
        Self {
            lambda: 1.0,
            tip: Vec2::ZERO,
            axis: Vec2::new(0.0, 1.0),
            clip: DEFAULT_CLIP,
        }
    }

    pub fn width(&self) -> f64 {
        std::f64::consts::PI / self.lambda
    }

    /// Lateral unit vector: local `+x` when the axis is local `+y`.
    pub fn lateral(&self) -> Vec2 {
        -self.axis.perp()
    }

    pub fn u_limit(&self) -> f64 {
        self.clip * FRAC_PI_2 / self.lambda
    }

    fn check_u(&self, u: f64) -> Result<()> {
        if !(u.abs() < self.u_limit()) {
            return Err(invalid(
                "u",
                format!("|u| must stay below {} for this clip, got {u}", self.u_limit()),
            ));
        }
        Ok(())
    }

    pub fn to_world(&self, local: Vec2) -> Vec2 {
        self.tip + self.lateral() * local.x + self.axis * local.y
    }

    pub fn to_local(&self, p: Vec2) -> Vec2 {
        let d = p - self.tip;
        Vec2::new(d.dot(self.lateral()), d.dot(self.axis))
    }

    pub fn point(&self, u: f64) -> Result<Vec2> {
        self.check_u(u)?;
        Ok(self.to_world(Vec2::new(u, graph(self.lambda, u))))
    }

    pub fn curvature(&self, u: f64) -> Result<f64> {
        self.check_u(u)?;
        Ok(self.lambda * (self.lambda * u).cos())
    }

    /// Unit tangent at `u`, oriented with increasing `u`.
    pub fn tangent(&self, u: f64) -> Result<Vec2> {
        self.check_u(u)?;
        let a = self.lambda * u;
        Ok(self.lateral() * a.cos() + self.axis * a.sin())
    }

    /// The exact flow: translation by `λ dt` along the axis.
    pub fn soliton_reference(&self, dt: f64) -> Result<Self> {
        if !(dt >= 0.0) {
            return Err(invalid("dt", format!("must be nonnegative, got {dt}")));
        }
        Ok(Self {
            tip: self.tip + self.axis * (self.lambda * dt),
            ..*self
        })
    }

    /// Abscissa at signed arclength `l` from the tip.
    pub fn u_of_arclength(&self, l: f64) -> f64 {
        (self.lambda * l).sinh().atan() / self.lambda
    }

    pub fn arclength_of_u(&self, u: f64) -> f64 {
        (self.lambda * u).tan().asinh() / self.lambda
    }

    /// Point at signed arclength `l` from the tip. In this parametrization the
    /// graph is `(atan(sinh λl), log cosh λl) / λ`, which stays finite for any
    /// `l`, so no clip applies.
    pub fn point_at_arclength(&self, l: f64) -> Vec2 {
        let z = self.lambda * l;
        self.to_world(Vec2::new(z.sinh().atan(), log_cosh(z)) / self.lambda)
    }

    pub fn tangent_at_arclength(&self, l: f64) -> Vec2 {
        let z = self.lambda * l;
        self.lateral() / z.cosh() + self.axis * z.tanh()
    }

    pub fn curvature_at_arclength(&self, l: f64) -> f64 {
        self.lambda / (self.lambda * l).cosh()
    }

    /// Clipped chunk sampled uniformly in arclength (spacing close to `h`).
    pub fn chunk(&self, h: f64) -> Result<PlaneCurve> {
        if !(h > 0.0) {
            return Err(invalid("h", "spacing must be positive"));
        }
        let l_end = self.arclength_of_u(self.u_limit());
        let m = (l_end / h).ceil().max(1.0) as i64;
        let pts = (-m..=m)
            .map(|k| {
                let u = self.u_of_arclength(l_end * k as f64 / m as f64);
                self.to_world(Vec2::new(u, graph(self.lambda, u)))
            })
            .collect();
        Ok(PlaneCurve::new(pts, false, l_end / m as f64))
    }

    /// Lateral offset of `p` in local coordinates and its height above the
    /// graph (positive when `p` lies inside the reaper's convex side).
    pub fn height_above(&self, p: Vec2) -> Option<f64> {
        let q = self.to_local(p);
        if q.x.abs() * self.lambda >= FRAC_PI_2 {
            return None;
        }
        Some(q.y - graph(self.lambda, q.x))
    }
}

/// `-(1/λ) log cos(λu)`.
#[inline]
pub fn graph(lambda: f64, u: f64) -> f64 {
    -(lambda * u).cos().ln() / lambda
}

#[inline]
fn log_cosh(z: f64) -> f64 {
    let a = z.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn arclength_parametrization_agrees_with_graph() {
        let r = ReaperPose::new(1.3, Vec2::new(0.5, -2.0), Vec2::new(1.0, 1.0), 0.99).unwrap();
        for l in [-1.1, -0.2, 0.0, 0.7] {
            let u = r.u_of_arclength(l);
            assert!((r.point_at_arclength(l) - r.point(u).unwrap()).norm() < 1e-13);
            assert!((r.tangent_at_arclength(l) - r.tangent(u).unwrap()).norm() < 1e-13);
            assert!((r.curvature_at_arclength(l) - r.curvature(u).unwrap()).abs() < 1e-13);
        }
        // Far out on an arm the point is still finite.
        assert!(r.point_at_arclength(400.0).norm().is_finite());
    }

    fn three_point_curvature(a: Vec2, b: Vec2, c: Vec2) -> f64 {
        2.0 * (b - a).cross(c - b) / (a.dist(b) * b.dist(c) * a.dist(c))
    }

    #[test]
    fn closed_form_points() {
        let r = ReaperPose::standard();
        assert_eq!(r.point(0.0).unwrap(), Vec2::ZERO);
        assert!((r.point(PI / 3.0).unwrap().y - LN_2).abs() < 1e-15);
        let r2 = ReaperPose { lambda: 2.0, ..r };
        assert!((r2.point(PI / 6.0).unwrap().y - LN_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_abscissa_beyond_clip() {
        let r = ReaperPose::standard();
        assert!(r.point(1.0 * FRAC_PI_2).is_err());
        assert!(r.curvature(-2.0).is_err());
    }

    #[test]
    fn curvature_matches_finite_differences_at_second_order() {
        for lambda in [1.0, 2.5] {
            let r = ReaperPose { lambda, ..ReaperPose::standard() };
            for u in [0.0, 0.4 / lambda, 1.2 / lambda, 1.5 / lambda] {
                let exact = r.curvature(u).unwrap();
                let err = |d: f64| {
                    let k = three_point_curvature(
                        r.point(u - d).unwrap(),
                        r.point(u).unwrap(),
                        r.point(u + d).unwrap(),
                    );
                    (k - exact).abs()
                };
                let (e1, e2) = (err(1e-3), err(5e-4));
                assert!(e1 < 1e-4 * lambda.max(1.0), "{e1}");
                if e1 > 1e-10 {
                    assert!(e1 / e2 > 3.5, "order at u={u}: {}", e1 / e2);
                }
            }
            assert_eq!(r.curvature(0.0).unwrap(), lambda);
        }
    }

    #[test]
    fn arclength_map_round_trips() {
        let r = ReaperPose { lambda: 3.0, ..ReaperPose::standard() };
        for u in [-0.5, 0.0, 0.2, 0.51] {
            assert!((r.u_of_arclength(r.arclength_of_u(u)) - u).abs() < 1e-14);
        }
    }

    #[test]
    fn translation_reference() {
        let r = ReaperPose::new(2.0, Vec2::new(1.0, 1.0), Vec2::new(3.0, 4.0), 0.9).unwrap();
        let m = r.soliton_reference(0.5).unwrap();
        assert!(((m.tip - r.tip).norm() - 1.0).abs() < 1e-15);
        assert_eq!(r.soliton_reference(0.0).unwrap(), r);
    }

    #[test]
    fn chunk_spacing_is_uniform() {
        let r = ReaperPose { lambda: 1.7, ..ReaperPose::standard() };
        let c = r.chunk(0.02).unwrap();
        let (lo, hi) = c.spacing_range();
        // Chords undershoot arclength only where the curve bends.
        assert!(hi <= 0.0201 && lo > 0.019, "{lo} {hi}");
    }
}
