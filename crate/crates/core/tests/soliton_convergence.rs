//! Exact solitons under the explicit scheme: errors must fall by ~4 per
//! halving of h (with dt tied to h²).

use ancient_csf::flow::{DtPolicy, FlowConfig, FlowState, Scheme};
use ancient_csf::reaper::ReaperPose;
use ancient_csf::{PlaneCurve, Vec2, YinYangProfile};
use std::f64::consts::PI;

const HS: [f64; 3] = [0.04, 0.02, 0.01];

fn cfg(h: f64) -> FlowConfig {
    FlowConfig::uniform(Scheme::Explicit, h, DtPolicy::Cfl { cfl: 0.2 })
}

/// Run to exactly `t_end`, with `ends(t)` pinning open endpoints.
fn run(curve: PlaneCurve, h: f64, t_end: f64, ends: impl Fn(f64) -> Option<(Vec2, Vec2)>) -> FlowState {
    let c = cfg(h);
    let mut s = FlowState::new(curve, 0.0, &c);
    while s.t < t_end {
        let dt = c.time_step(&s.curve).min(t_end - s.t);
        let t1 = if t_end - s.t - dt < 1e-15 { t_end } else { s.t + dt };
        s = s.step(t1 - s.t, &c, ends(t1)).unwrap();
        s.t = t1;
    }
    s
}

fn ratios(err: &[f64]) -> Vec<f64> {
    err.windows(2).map(|w| w[0] / w[1]).collect()
}

#[test]
fn shrinking_circle_converges_at_second_order() {
    let t_end = 0.2;
    let err: Vec<f64> = HS
        .iter()
        .map(|&h| {
            let n = (2.0 * PI / h).round() as usize;
            let pts = (0..n)
                .map(|i| {
                    let a = 2.0 * PI * i as f64 / n as f64;
                    Vec2::new(a.cos(), a.sin())
                })
                .collect();
            let s = run(PlaneCurve::new(pts, true, h), h, t_end, |_| None);
            let r = (1.0 - 2.0 * t_end).sqrt();
            s.curve.points().iter().fold(0.0f64, |m, p| m.max((p.norm() - r).abs()))
        })
        .collect();
    let q = ratios(&err);
    println!("circle errors {err:?} ratios {q:?}");
    assert!(q.iter().all(|&r| r >= 3.5), "{q:?}");
}

#[test]
fn grim_reaper_translates() {
    let reaper = ReaperPose::standard();
    let t_end = 0.1;
    let err: Vec<f64> = HS
        .iter()
        .map(|&h| {
            let chunk = reaper.chunk(h).unwrap();
            let (a, b) = (chunk.points()[0], *chunk.points().last().unwrap());
            let s = run(chunk, h, t_end, |t| {
                let d = reaper.axis * (reaper.lambda * t);
                Some((a + d, b + d))
            });
            let moved = reaper.soliton_reference(t_end).unwrap();
            s.curve
                .points()
                .iter()
                .filter_map(|&p| {
                    let q = moved.to_local(p);
                    // Measure on the central part; near the clip the graph is steep.
                    (q.x.abs() < 1.2).then(|| moved.height_above(p).unwrap().abs() * (q.x).cos())
                })
                .fold(0.0f64, f64::max)
        })
        .collect();
    let q = ratios(&err);
    println!("reaper errors {err:?} ratios {q:?}");
    assert!(q.iter().all(|&r| r >= 3.5), "{q:?}");
}

#[test]
fn yin_yang_rotates() {
    let profile = YinYangProfile::integrate(10.0, 1e-13).unwrap();
    let t_end = 0.1;
    let span = 3.0;
    let err: Vec<f64> = HS
        .iter()
        .map(|&h| {
            let n = (2.0 * span / h).round() as usize;
            let pts = (0..=n)
                .map(|k| profile.position(-span + 2.0 * span * k as f64 / n as f64).unwrap())
                .collect();
            let (a, b) = (profile.position(-span).unwrap(), profile.position(span).unwrap());
            let s = run(PlaneCurve::new(pts, false, h), h, t_end, |t| Some((a.rotate(t), b.rotate(t))));
            let m = s.curve.len();
            s.curve
                .points()
                .iter()
                .enumerate()
                .map(|(i, &q)| {
                    let guess = -span + 2.0 * span * i as f64 / (m - 1) as f64;
                    profile.distance_near(q.rotate(-t_end), guess).unwrap()
                })
                .fold(0.0f64, f64::max)
        })
        .collect();
    let q = ratios(&err);
    println!("yin-yang errors {err:?} ratios {q:?}");
    assert!(q.iter().all(|&r| r >= 3.5), "{q:?}");
}
