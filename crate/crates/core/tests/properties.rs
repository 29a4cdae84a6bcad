use ancient_csf::barrier::{a_op, endpoint_factored, endpoint_quartic, q_op, regrouped, BarrierParams, PhiBundle};
use ancient_csf::flow::{DtPolicy, FlowConfig, FlowState, Scheme};
use ancient_csf::io::{read_snapshots, write_snapshot, write_snapshot_header};
use ancient_csf::reaper::ReaperPose;
use ancient_csf::yinyang::YinYangProfile;
use ancient_csf::{PlaneCurve, Vec2};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn profile() -> &'static YinYangProfile {
    static P: OnceLock<YinYangProfile> = OnceLock::new();
    P.get_or_init(|| YinYangProfile::integrate(200.0, 1e-12).unwrap())
}

/// Closed star-shaped curve r(θ) = 1 + Σ c_k cos(kθ + p_k).
fn star(coef: &[(f64, f64)], n: usize) -> PlaneCurve {
    let pts = (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            let r = 1.0 + coef.iter().enumerate().map(|(k, (c, p))| c * ((k + 2) as f64 * a + p).cos()).sum::<f64>();
            Vec2::from_angle(a) * r
        })
        .collect();
    PlaneCurve::new(pts, true, 2.0 * PI / n as f64)
}

fn bundle() -> impl Strategy<Value = PhiBundle> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(phi, phi_s, phi_ss, phi_t)| PhiBundle { phi, phi_s, phi_ss, phi_t })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profile_is_odd(s in 0.0..200.0f64) {
        let p = profile();
        let a = p.position(s).unwrap();
        let b = p.position(-s).unwrap();
        prop_assert!((a + b).norm() < 1e-12);
        prop_assert!((p.curvature(s).unwrap() + p.curvature(-s).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn walls_lie_on_the_corridor_boundary(s in 2.0..150.0f64, t in -3.0..3.0f64) {
        let p = profile();
        let q = p.position(-s).unwrap().rotate(t);
        let m = p.corridor_margin(q, t).unwrap();
        prop_assert!(m.normal.abs() < 1e-7, "{:?}", m);
    }

    #[test]
    fn corridor_width_is_positive_and_shrinks(s in 5.0..150.0f64) {
        let p = profile();
        let w1 = p.corridor_width(-s).unwrap().width;
        let w2 = p.corridor_width(-s - 5.0).unwrap().width;
        prop_assert!(w1 > 0.0 && w2 < w1);
    }

    #[test]
    fn reaper_is_a_translating_graph(lambda in 0.2..5.0f64, frac in -0.95..0.95f64) {
        let r = ReaperPose::new(lambda, Vec2::new(0.3, -1.0), Vec2::new(1.0, 2.0), 0.995).unwrap();
        let u = frac * PI / (2.0 * lambda);
        // Normal speed of a translating graph equals its curvature: H = λ <T⊥, axis>.
        let t = r.tangent(u).unwrap();
        let k = r.curvature(u).unwrap();
        prop_assert!((k.abs() - lambda * t.perp().dot(r.axis).abs()).abs() < 1e-9 * lambda.max(1.0));
    }

    #[test]
    fn regrouping_identity(b in bundle(), s in -200.0..200.0f64) {
        let f = profile().frame(s).unwrap();
        let lhs = a_op(&f, &b) + q_op(&f, &b);
        let rhs = regrouped(&f, &b);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs() + (f.h * b.phi).abs() * 10.0));
    }

    #[test]
    fn endpoint_forms_agree(la in 1.0..3.0f64, lphi in -8.0..0.0f64, neg in any::<bool>()) {
        let a = 10f64.powf(la);
        let phi = 10f64.powf(lphi) / a;
        let sign = if neg { -1.0 } else { 1.0 };
        let q = endpoint_quartic(a, phi, sign);
        let f = endpoint_factored(a, phi, sign);
        prop_assert!(q >= 0.0 && f >= 0.0);
        prop_assert!((q - f).abs() <= 1e-12 * (q.abs() + 10.0 * phi / (a * a)));
    }

    #[test]
    fn barrier_graph_is_positive(w in 0.05..1.0f64, lm in 200.0..2000.0f64, extra in 1.0..50.0f64, u in 0.0..1.0f64) {
        let p = BarrierParams::new(0.1, w, lm, lm + extra).unwrap();
        let s = -p.l + u * (p.r + p.l);
        let b = p.phi(s);
        // Mid-interval values underflow to zero; they never go negative.
        prop_assert!(b.phi >= 0.0 && b.phi_ss >= 0.0);
        prop_assert!(p.phi(-p.l).phi >= p.lam_minus * w && p.phi(p.r).phi >= p.lam_plus * w);
    }

    #[test]
    fn rotation_keeps_area_and_length(c1 in -0.1..0.1f64, c2 in -0.1..0.1f64, t in -PI..PI) {
        let c = star(&[(c1, 0.3), (c2, 1.1)], 300);
        let r = c.map_points(|p| p.rotate(t));
        prop_assert!((c.signed_area() - r.signed_area()).abs() < 1e-12);
        prop_assert!((c.length() - r.length()).abs() < 1e-12);
        prop_assert_eq!(c.inflection_count(1e-3), r.inflection_count(1e-3));
    }

    #[test]
    fn closed_curves_have_even_inflection_counts(c1 in -0.2..0.2f64, c2 in -0.1..0.1f64, c3 in -0.05..0.05f64) {
        let c = star(&[(c1, 0.0), (c2, 0.7), (c3, 2.0)], 600);
        prop_assert_eq!(c.inflection_count(1e-3) % 2, 0);
    }

    #[test]
    fn snapshot_rows_round_trip(xs in prop::collection::vec((-1e6..1e6f64, -1e6..1e6f64), 4..40), t in 0.0..10.0f64) {
        let c = PlaneCurve::new(xs.iter().map(|&(x, y)| Vec2::new(x, y)).collect(), true, 1.0);
        let mut w = csv::Writer::from_writer(Vec::new());
        write_snapshot_header(&mut w).unwrap();
        write_snapshot(&mut w, t, &c).unwrap();
        let snaps = read_snapshots(w.into_inner().unwrap().as_slice()).unwrap();
        prop_assert_eq!(snaps.len(), 1);
        prop_assert_eq!(&snaps[0].points[..], c.points());
        for (a, b) in snaps[0].curvature.iter().zip(c.curvature()) {
            prop_assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Along short runs: inflections never increase, length and area
    /// strictly decrease, spacing stays within [0.5, 2] h and the curve
    /// stays embedded.
    #[test]
    fn flow_invariants(c1 in -0.25..0.25f64, c2 in -0.1..0.1f64, semi in any::<bool>()) {
        let h = 0.03;
        let cfg = if semi {
            FlowConfig::uniform(Scheme::SemiImplicit, h, DtPolicy::Fixed { dt: 2e-4 })
        } else {
            FlowConfig::uniform(Scheme::Explicit, h, DtPolicy::Cfl { cfl: 0.2 })
        };
        let mut s = FlowState::new(star(&[(c1, 0.0), (c2, 0.5)], 210).resample_uniform(h), 0.0, &cfg);
        for _ in 0..150 {
            let n = s.advance(&cfg).unwrap();
            prop_assert!(n.inflections <= s.inflections);
            prop_assert!(n.length < s.length);
            prop_assert!(n.area < s.area);
            let (lo, hi) = n.curve.spacing_range();
            prop_assert!(lo >= 0.5 * h && hi <= 2.0 * h, "{} {}", lo, hi);
            s = n;
        }
        prop_assert!(s.curve.is_embedded());
    }
}
