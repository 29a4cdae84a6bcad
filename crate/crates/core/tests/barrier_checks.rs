use ancient_csf::barrier::{
    a_op, endpoint_check, full_residual, identity_fuzz, q_op, truncation_fit, zero_residual_scan, BarrierCurve, BarrierParams, PhiBundle,
};
use ancient_csf::yinyang::{rhs, YinYangProfile};
use ancient_csf::Vec2;
use std::time::Instant;

fn rk4(p: Vec2, ds: f64, n: usize) -> Vec2 {
    let h = ds / n as f64;
    let mut p = p;
    for _ in 0..n {
        let k1 = rhs(p);
        let k2 = rhs(p + k1 * (0.5 * h));
        let k3 = rhs(p + k2 * (0.5 * h));
        let k4 = rhs(p + k3 * h);
        p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    p
}

/// Test graph φ(s, t) = c sin(k s + t) + d s² with exact derivatives.
fn phi(s: f64, c: f64, k: f64, d: f64) -> PhiBundle {
    PhiBundle {
        phi: c * (k * s).sin() + d * s * s,
        phi_s: c * k * (k * s).cos() + 2.0 * d * s,
        phi_ss: -c * k * k * (k * s).sin() + 2.0 * d,
        phi_t: c * (k * s).cos(),
    }
}

/// The supersolution residual of `Γ = e^{it}(F + φ iT)` from finite
/// differences of a locally re-integrated profile.
fn residual_by_differences(p: &YinYangProfile, s0: f64, c: f64, k: f64, d: f64) -> f64 {
    let delta = 1e-3;
    let f0 = p.position(s0).unwrap();
    let gamma = |ds: f64| {
        let f = if ds == 0.0 { f0 } else { rk4(f0, ds, 200) };
        let b = phi(s0 + ds, c, k, d);
        f + rhs(f).perp() * b.phi
    };
    let (gm, g0, gp) = (gamma(-delta), gamma(0.0), gamma(delta));
    let gs = (gp - gm) * (0.5 / delta);
    let gss = (gp - g0 * 2.0 + gm) * (1.0 / (delta * delta));
    let b = phi(s0, c, k, d);
    let gt = g0.perp() + rhs(f0).perp() * b.phi_t;
    gs.dot(gs) * gt.dot(gs.perp()) - gss.dot(gs.perp())
}

#[test]
fn exact_residual_matches_finite_differences() {
    let p = YinYangProfile::integrate(50.0, 1e-13).unwrap();
    for &(s, c, k, d) in &[(0.7, 0.05, 2.0, 0.01), (-3.0, 0.2, 1.0, -0.003), (12.0, 0.01, 3.0, 1e-4), (-40.0, 0.1, 0.5, 0.0)] {
        let f = p.frame(s).unwrap();
        let exact = full_residual(&f, &phi(s, c, k, d));
        let fd = residual_by_differences(&p, s, c, k, d);
        let scale = 1.0 + f.h.abs() + f.f_n.abs();
        assert!((exact - fd).abs() < 1e-5 * scale, "s = {s}: {exact} vs {fd}");
    }
}

#[test]
fn operator_suite() {
    let start = Instant::now();
    let p = YinYangProfile::integrate(1e4, 1e-12).unwrap();

    let fuzz = identity_fuzz(&p, 1000, 7).unwrap();
    println!("identity fuzz: {fuzz:?}");
    assert!(fuzz.max_rel <= 1e-10);

    let (zero, at) = zero_residual_scan(&p);
    println!("unperturbed residual {zero:e} at s = {at}");
    assert!(zero <= p.tol());

    let base = PhiBundle {
        phi: 0.7,
        phi_s: -0.4,
        phi_ss: 0.9,
        phi_t: 0.3,
    };
    for s in [-5000.0, -3.0, 0.5, 7.0, 900.0] {
        let fit = truncation_fit(&p, s, &base, &[1e-1, 3e-2, 1e-2, 3e-3, 1e-3]).unwrap();
        assert!(fit.exponent >= 2.9, "{fit:?}");
    }

    let grid = endpoint_check(100, 100, false);
    println!("endpoint grid: max rel {:e}, min value {:e}", grid.max_rel_diff, grid.min_value);
    assert!(grid.pass && grid.max_rel_diff <= 1e-12 && grid.min_value >= 0.0);

    let took = start.elapsed().as_secs_f64();
    println!("runtime {took:.2}s");
    assert!(took < 60.0);
}

#[test]
fn flipped_sign_breaks_the_grid() {
    let grid = endpoint_check(20, 20, true);
    assert!(!grid.pass && !grid.failures.is_empty());
}

#[test]
fn linear_part_dominates_for_small_graphs() {
    let p = YinYangProfile::integrate(100.0, 1e-12).unwrap();
    let f = p.frame(-20.0).unwrap();
    let b = phi(-20.0, 1e-6, 1.0, 0.0);
    let a = a_op(&f, &b);
    assert!((full_residual(&f, &b) - a).abs() < 1e-4 * a.abs());
    assert!(q_op(&f, &b).abs() < 1e-4 * a.abs());
}

#[test]
fn barrier_is_close_to_the_walls_away_from_the_ends() {
    let p = YinYangProfile::integrate(2000.0, 1e-12).unwrap();
    let w = p.corridor_width(-1000.0).unwrap();
    let params = BarrierParams::new(0.1, w.width, 1000.0, w.sigma).unwrap();
    let b = BarrierCurve::sample(&p, params, 0.0, 0.5).unwrap();
    // φ at the midpoint of [-L, R] is exponentially small.
    let mid = 0.5 * (-params.l + params.r);
    assert!(params.phi(mid).phi.abs() < 1e-12);
    assert!(b.points.len() > 100);
}
