//! Browser bindings. Every call returns a JSON string; failures come back as
//! `{"error": "..."}` so the page can show them inline.

use ancient_csf::barrier::endpoint_check;
use ancient_csf::construct::{build_admissible, lambda_asymptotics, ConstructConfig};
use ancient_csf::flow::{FlowState, Tip};
use ancient_csf::io::{construction_svg, corridor_svg, profile_svg};
use ancient_csf::monitor::RunConfig;
use ancient_csf::yinyang::Stencil;
use ancient_csf::{Error, YinYangProfile};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(r: Result<Value, Error>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn profile_for(s: f64) -> Result<YinYangProfile, Error> {
    YinYangProfile::integrate(1.1 * s.abs() + 200.0, 1e-12)
}

/// Integrates the profile on `[-s_max, s_max]` and checks its identities.
#[wasm_bindgen]
pub fn yinyang(s_max: f64) -> String {
    respond((|| {
        let p = YinYangProfile::integrate(s_max, 1e-12)?;
        let id = p.identity_report(Stencil::Fourth, s_max);
        let hi = p.find_h_inflection()?;
        Ok(json!({
            "svg": profile_svg(&p),
            "identity_max_rel": id.max_rel(),
            "h_max": hi.h_max,
            "s_max_h": hi.s_max_h,
        }))
    })())
}

/// Builds the admissible curve anchored at `s_anchor < 0`.
#[wasm_bindgen]
pub fn construct(s_anchor: f64) -> String {
    respond((|| {
        let p = profile_for(s_anchor)?;
        let cfg = ConstructConfig::default();
        let adm = build_admissible(&p, s_anchor, &cfg)?;
        let lam = lambda_asymptotics(&adm.site)?;
        Ok(json!({
            "svg": construction_svg(&p, &adm),
            "width": adm.site.width,
            "vertices": adm.curve.len(),
            "inflections": adm.inflection_count,
            "embedded": adm.embedded,
            "contained": adm.contained(&cfg),
            "m_observed": adm.site.m_observed,
            "lambda_bar_ratio": lam.lambda_bar_unslid_ratio,
            "lambda_over_bar": lam.lambda_over_bar,
        }))
    })())
}

/// The endpoint inequality on an `n × n` grid.
#[wasm_bindgen]
pub fn endpoint_grid(n: usize, flip: bool) -> String {
    let r = endpoint_check(n.max(1), n.max(1), flip);
    json!({
        "pass": r.pass,
        "max_rel_diff": r.max_rel_diff,
        "min_value": r.min_value,
        "failures": r.failures.len(),
        "first_failure": r.failures.first(),
    })
    .to_string()
}

/// An admissible curve under the flow, advanced in chunks of steps.
#[wasm_bindgen]
pub struct Evolution {
    profile: YinYangProfile,
    cfg: RunConfig,
    state: FlowState,
    w0: f64,
}

#[wasm_bindgen]
impl Evolution {
    #[wasm_bindgen(constructor)]
    pub fn new(s_anchor: f64) -> Result<Evolution, JsError> {
        let cfg = RunConfig {
            s_anchor,
            ..RunConfig::default()
        };
        let profile = profile_for(s_anchor)?;
        let adm = build_admissible(&profile, s_anchor, &cfg.construct)?;
        let mut state = FlowState::new(adm.curve, 0.0, &cfg.flow);
        let w0 = state.track_tip(&profile, cfg.radius_mult)?.w_tip;
        Ok(Evolution { profile, cfg, state, w0 })
    }

    /// Advances `steps` time steps and reports the monitors.
    pub fn advance(&mut self, steps: usize) -> String {
        respond((|| {
            for _ in 0..steps {
                self.state = self.state.advance(&self.cfg.flow)?;
            }
            let tip: Tip = self.state.track_tip(&self.profile, self.cfg.radius_mult)?;
            let (contained, margin) = self.state.containment(&self.profile, self.cfg.tol * tip.w_tip)?;
            let s = &self.state;
            Ok(json!({
                "svg": corridor_svg(&self.profile, &s.curve, s.t, &format!("t = {:.4}", s.t)),
                "t": s.t,
                "steps": s.steps,
                "vertices": s.curve.len(),
                "inflections": s.inflections,
                "area": s.area,
                "length": s.length,
                "w_tip": tip.w_tip,
                "growth": tip.w_tip / self.w0,
                "contained": contained,
                "margin_over_w": margin / tip.w_tip,
            }))
        })())
    }
}
