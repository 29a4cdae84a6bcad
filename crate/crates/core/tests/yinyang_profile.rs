use ancient_csf::yinyang::{Stencil, YinYangProfile};
use ancient_csf::Vec2;
use std::time::Instant;

/// Classical RK4 on F' = (cos(|F|²/2), sin(|F|²/2)) with a fixed small step.
fn rk4_oracle(s_end: f64, h: f64) -> Vec2 {
    let f = |p: Vec2| Vec2::from_angle(0.5 * p.dot(p));
    let n = (s_end / h).round() as usize;
    let mut p = Vec2::ZERO;
    for _ in 0..n {
        let k1 = f(p);
        let k2 = f(p + k1 * (0.5 * h));
        let k3 = f(p + k2 * (0.5 * h));
        let k4 = f(p + k3 * h);
        p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    p
}

#[test]
fn matches_fixed_step_oracle() {
    let p = YinYangProfile::integrate(40.0, 1e-12).unwrap();
    for s in [0.5, 1.0, 2.5, 10.0, 40.0] {
        let q = rk4_oracle(s, 2e-4);
        let d = p.position(s).unwrap().dist(q);
        assert!(d < 1e-8, "s = {s}: {d:e}");
        assert!(p.position(-s).unwrap().dist(-q) < 1e-8);
    }
}

#[test]
fn identities_hold_on_the_full_range() {
    let start = Instant::now();
    let p = YinYangProfile::integrate(1e4, 1e-12).unwrap();
    let r = p.identity_report(Stencil::Fourth, 1e4);
    let took = start.elapsed().as_secs_f64();
    println!("{r:#?}\nruntime {took:.2}s");
    assert!(r.s_range.1 > 9999.9);
    assert!(r.ode.abs <= 1e-8, "{:?}", r.ode);
    for (name, res) in [("soliton", r.soliton), ("integral", r.integral), ("h_prime", r.h_prime)] {
        assert!(res.rel <= 1e-6, "{name}: {res:?}");
    }
    assert!(took < 60.0);
}

#[test]
fn second_order_stencil_is_visibly_worse() {
    let p = YinYangProfile::integrate(200.0, 1e-12).unwrap();
    let lo = p.identity_report(Stencil::Second, 200.0);
    let hi = p.identity_report(Stencil::Fourth, 200.0);
    assert!(lo.h_prime.rel > 10.0 * hi.h_prime.rel, "{lo:?} {hi:?}");
}

#[test]
fn asymptotic_ratios_tend_to_one() {
    let p = YinYangProfile::integrate(1.1e4, 1e-12).unwrap();
    let r: Vec<_> = [1e2, 1e3, 1e4].iter().map(|&s| p.asymptotic_ratios(s).unwrap()).collect();
    let fields = |l: &ancient_csf::yinyang::AsymptoticRatios| [l.curvature, l.radius, l.width, l.full_turn];
    for k in 0..4 {
        let v: Vec<f64> = r.iter().map(|l| fields(l)[k]).collect();
        println!("ratio {k}: {v:?}");
        assert!((0.98..=1.02).contains(&v[2]), "{v:?}");
        assert!((v[1] - 1.0).abs() < (v[0] - 1.0).abs() && (v[2] - 1.0).abs() < (v[1] - 1.0).abs(), "{v:?}");
    }
    // Frozen from a run at tol 1e-12.
    assert!((r[2].width - 0.998342).abs() < 1e-5, "{:?}", r[2]);
    assert!((r[0].curvature - 0.997478).abs() < 1e-5, "{:?}", r[0]);
}

#[test]
fn curvature_has_a_single_maximum() {
    let p = YinYangProfile::integrate(100.0, 1e-12).unwrap();
    let inf = p.find_h_inflection().unwrap();
    assert_eq!(inf.critical_points, 1);
    assert!(inf.s_inflection > inf.s_max_h);
}
