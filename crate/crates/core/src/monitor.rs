//! An admissible curve evolved under the flow, with the tip, corridor,
//! barrier, drift and stability monitors sampled along the way.

use crate::barrier::{barrier_inside, drift_margins, stability_check, BarrierCurve, BarrierParams, DriftMargins, InsideReport, StabilityReport, DEFAULT_EPS};
use crate::construct::{build_admissible, AdmissibleCurve, ConstructConfig};
use crate::error::{invalid, Error, Result};
use crate::flow::{DtPolicy, FlowConfig, FlowState, Scheme, Tip};
use crate::yinyang::YinYangProfile;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RunConfig {
    pub s_anchor: f64,
    pub construct: ConstructConfig,
    pub flow: FlowConfig,
    pub eps: f64,
    /// Stop once the tip width reaches this multiple of its initial value.
    pub growth: f64,
    pub t_max: f64,
    /// Time between monitor samples.
    pub sample_dt: f64,
    /// Containment and barrier slack, in units of the current tip width.
    pub tol: f64,
    pub radius_mult: f64,
    /// Half width (rescaled) of the window compared with the standard reaper.
    pub stability_x: f64,
    /// Bound for the rescaled curvature away from the tip window.
    pub m_eps: f64,
    /// Tolerance on the mean area rate, relative to 2π.
    pub area_rate_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            s_anchor: -1000.0,
            construct: ConstructConfig {
                max_sag: 1e-3,
                ..ConstructConfig::default()
            },
            flow: FlowConfig {
                scheme: Scheme::Extrapolated,
                dt: DtPolicy::Curvature { c: 2.0 },
                h: 0.5,
                max_turn: 0.05,
                h_min: 1e-3,
                max_sag: 1e-3,
                grading: 0.15,
                theta_h: 1e-3,
                embed_check_every: 50,
            },
            eps: DEFAULT_EPS,
            growth: 1.2,
            t_max: 100.0,
            sample_dt: 0.25,
            tol: 0.01,
            radius_mult: 1000.0,
            stability_x: 1.2,
            m_eps: 1.5,
            area_rate_tol: 0.02,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.construct.validate()?;
        self.flow.validate()?;
        let pos = |v: f64, name: &'static str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be positive, got {v}")))
            }
        };
        pos(self.t_max, "t_max")?;
        pos(self.sample_dt, "sample_dt")?;
        pos(self.tol, "tol")?;
        pos(self.radius_mult, "radius_mult")?;
        pos(self.stability_x, "stability_x")?;
        pos(self.m_eps, "m_eps")?;
        pos(self.area_rate_tol, "area_rate_tol")?;
        if !(self.growth > 1.0) {
            return Err(invalid("growth", format!("must exceed 1, got {}", self.growth)));
        }
        if !(self.eps >= 0.0 && self.eps < 1.0) {
            return Err(invalid("eps", format!("must lie in [0, 1), got {}", self.eps)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub steps: usize,
    pub vertices: usize,
    pub inflections: usize,
    pub area: f64,
    pub length: f64,
    pub tip: Tip,
    pub contained: bool,
    pub corridor_margin: f64,
    pub barrier: InsideReport,
    pub drift: Option<DriftMargins>,
    pub stability: StabilityReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub s_anchor: f64,
    pub w0: f64,
    pub t_end: f64,
    pub steps: usize,
    pub stop_reason: String,
    pub samples: Vec<Sample>,
    /// First time the inflection count dropped (a non-transverse zero).
    pub t0_event: Option<f64>,
    pub inflections_monotone: bool,
    pub length_monotone: bool,
    pub mean_area_rate: f64,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn sample(state: &mut FlowState, profile: &YinYangProfile, cfg: &RunConfig, history: &[Sample]) -> Result<Sample> {
    let tip = state.track_tip(profile, cfg.radius_mult)?;
    let w = tip.w_tip;
    let (contained, margin) = state.containment(profile, cfg.tol * w)?;
    let params = BarrierParams::new(cfg.eps, w, tip.l_minus, tip.l_plus)?;
    let barrier = BarrierCurve::sample(profile, params, state.t, 0.5)?;
    let inside = barrier_inside(&barrier, &state.curve, cfg.tol * w, w);
    let drift = match history {
        [.., a, b] => Some(drift_margins(
            profile,
            cfg.eps,
            params.lam,
            [a.t, b.t, state.t],
            [a.tip.l_minus, b.tip.l_minus, tip.l_minus],
            [a.tip.w_tip, b.tip.w_tip, w],
        )?),
        _ => None,
    };
    let stability = stability_check(&state.curve, tip.index, w, cfg.radius_mult, cfg.stability_x)?;
    Ok(Sample {
        t: state.t,
        steps: state.steps,
        vertices: state.curve.len(),
        inflections: state.inflections,
        area: state.area,
        length: state.length,
        tip,
        contained,
        corridor_margin: margin,
        barrier: inside,
        drift,
        stability,
    })
}

/// Build the admissible curve at `cfg.s_anchor` and evolve it. `observe` sees
/// every sample together with the state it came from.
pub fn run_admissible<F: FnMut(&FlowState, &Sample)>(profile: &YinYangProfile, cfg: &RunConfig, mut observe: F) -> Result<(AdmissibleCurve, RunReport)> {
    cfg.validate()?;
    let adm = build_admissible(profile, cfg.s_anchor, &cfg.construct)?;
    let mut state = FlowState::new(adm.curve.clone(), 0.0, &cfg.flow);
    let mut samples: Vec<Sample> = Vec::new();
    let first = sample(&mut state, profile, cfg, &samples)?;
    observe(&state, &first);
    let w0 = first.tip.w_tip;
    samples.push(first);

    let mut t0_event = None;
    let mut infl_ok = true;
    let mut len_ok = true;
    let mut next_sample = cfg.sample_dt;
    let stop_reason;
    loop {
        let dt = cfg.flow.time_step(&state.curve);
        let hit = state.t + dt >= next_sample;
        let dt = if hit { next_sample - state.t } else { dt };
        let next = match state.step(dt, &cfg.flow, None) {
            Ok(n) => n,
            Err(Error::Flow { t, reason }) => {
                stop_reason = format!("flow stopped at t = {t}: {reason}");
                break;
            }
            Err(e) => return Err(e),
        };
        if next.inflections > state.inflections {
            infl_ok = false;
        }
        if next.inflections < state.inflections && t0_event.is_none() {
            t0_event = Some(next.t);
        }
        if next.length >= state.length {
            len_ok = false;
        }
        state = next;
        if hit {
            state.t = next_sample;
            next_sample += cfg.sample_dt;
            let s = sample(&mut state, profile, cfg, &samples)?;
            observe(&state, &s);
            let done = s.tip.w_tip >= cfg.growth * w0;
            samples.push(s);
            if done {
                stop_reason = format!("tip width grew by factor {}", cfg.growth);
                break;
            }
            if state.t >= cfg.t_max {
                stop_reason = "t_max reached".into();
                break;
            }
        }
    }

    let last = samples.last().unwrap();
    let first = &samples[0];
    let mean_rate = (last.area - first.area) / (last.t - first.t);
    let checks = evaluate(cfg, &samples, infl_ok, len_ok, mean_rate, w0);
    Ok((
        adm,
        RunReport {
            s_anchor: cfg.s_anchor,
            w0,
            t_end: state.t,
            steps: state.steps,
            stop_reason,
            t0_event,
            inflections_monotone: infl_ok,
            length_monotone: len_ok,
            mean_area_rate: mean_rate,
            samples,
            checks,
        },
    ))
}

fn evaluate(cfg: &RunConfig, samples: &[Sample], infl_ok: bool, len_ok: bool, mean_rate: f64, w0: f64) -> Vec<Check> {
    let mut out = Vec::new();
    let mut push = |name: &str, pass: bool, detail: String| {
        out.push(Check {
            name: name.into(),
            pass,
            detail,
        })
    };
    let w_end = samples.last().map_or(w0, |s| s.tip.w_tip);
    push(
        "width_growth",
        w_end >= cfg.growth * w0,
        format!("w grew from {w0:.6} to {w_end:.6}"),
    );
    push("inflections_non_increasing", infl_ok, format!("{} -> {}", samples[0].inflections, samples.last().unwrap().inflections));
    push("length_decreasing", len_ok, String::new());
    let worst = samples.iter().map(|s| s.corridor_margin / s.tip.w_tip).fold(f64::INFINITY, f64::min);
    push(
        "corridor_containment",
        samples.iter().all(|s| s.contained),
        format!("worst wall distance {worst:.3e} w"),
    );
    let rel = (mean_rate + 2.0 * PI).abs() / (2.0 * PI);
    push("area_rate", rel <= cfg.area_rate_tol, format!("mean dA/dt = {mean_rate:.6} ({rel:.2e} from -2π)"));
    let worst_b = samples
        .iter()
        .map(|s| s.barrier.min_signed_distance / s.tip.w_tip)
        .fold(f64::INFINITY, f64::min);
    let worst_end = samples
        .iter()
        .map(|s| s.barrier.end_margin / s.tip.w_tip)
        .fold(f64::INFINITY, f64::min);
    push(
        "barrier_inside",
        samples.iter().all(|s| s.barrier.inside),
        format!("min signed distance {worst_b:.3e} w, near the ends {worst_end:.3e} w"),
    );
    let drift: Vec<&DriftMargins> = samples.iter().filter_map(|s| s.drift.as_ref()).collect();
    let dmin = |f: fn(&DriftMargins) -> f64| drift.iter().map(|d| f(d)).fold(f64::INFINITY, f64::min);
    push(
        "drift_margins",
        !drift.is_empty() && drift.iter().all(|d| d.min() > 0.0),
        format!(
            "min tip_advance {:.4e}, width_rate {:.4e}, width(a) {:.4e}, shift_rate {:.4e}, a_decay {:.4e}",
            dmin(|d| d.tip_advance),
            dmin(|d| d.width_rate),
            dmin(|d| d.width_rate_a),
            dmin(|d| d.shift_rate),
            dmin(|d| d.a_decay)
        ),
    );
    let (klo, khi) = samples.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), s| {
        (lo.min(s.stability.tip_curvature), hi.max(s.stability.tip_curvature))
    });
    push(
        "tip_curvature_band",
        klo >= 1.0 - cfg.eps && khi <= 1.0 + cfg.eps,
        format!("rescaled tip curvature in [{klo:.4}, {khi:.4}]"),
    );
    let away = samples.iter().map(|s| s.stability.away_window).fold(0.0f64, f64::max);
    push("away_curvature", away <= cfg.m_eps, format!("max rescaled curvature away from the tip {away:.4}"));
    out
}
