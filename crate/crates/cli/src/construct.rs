use crate::out::{ext, OutDir};
use crate::{load_params, Common, Failure, Format, Outcome};
use ancient_csf::construct::{build_admissible, lambda_asymptotics, ConstructConfig, ConstructionSite, LambdaReport};
use ancient_csf::io::{construction_svg, write_snapshot, write_snapshot_header, Frame};
use ancient_csf::yinyang::YinYangProfile;
use clap::Args;
use serde::{Deserialize, Serialize};

#[derive(Args, Debug)]
pub struct Flags {
    #[command(flatten)]
    common: Common,
    /// Anchor arclength on the negative wall (negative).
    #[arg(long, allow_hyphen_values = true)]
    s_anchor: Option<f64>,
    #[arg(long)]
    max_turn: Option<f64>,
    #[arg(long)]
    h_max: Option<f64>,
    #[arg(long)]
    max_sag: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub s_anchor: f64,
    /// Profile integrator tolerance.
    pub tol: f64,
    pub construct: ConstructConfig,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            s_anchor: -1000.0,
            tol: 1e-12,
            construct: ConstructConfig::default(),
        }
    }
}

/// Profile long enough to hold the corridor chord at `s`.
pub fn profile_for(s: f64, tol: f64) -> Result<YinYangProfile, Failure> {
    Ok(YinYangProfile::integrate(1.1 * s.abs() + 200.0, tol)?)
}

#[derive(Debug, Serialize)]
struct Checks {
    inflections: usize,
    embedded: bool,
    contained: bool,
    radial_tangencies: usize,
    /// Smallest signed wall distance, in units of `w`.
    min_corridor_margin: f64,
    glue_curvature_ok: bool,
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    site: &'a ConstructionSite,
    lambda: LambdaReport,
    vertices: usize,
    checks: Checks,
    pass: bool,
}

pub fn run(f: Flags) -> Outcome {
    let mut p: Params = load_params(f.common.config.as_deref())?;
    if let Some(v) = f.s_anchor {
        p.s_anchor = v;
    }
    if let Some(v) = f.max_turn {
        p.construct.max_turn = v;
    }
    if let Some(v) = f.h_max {
        p.construct.h_max = v;
    }
    if let Some(v) = f.max_sag {
        p.construct.max_sag = v;
    }
    p.construct.validate()?;
    if !(p.s_anchor < 0.0 && p.s_anchor.abs() >= p.construct.min_abs_s && p.s_anchor.is_finite()) {
        return Err(Failure::Config(format!(
            "s_anchor must be finite and at most -{}, got {}",
            p.construct.min_abs_s, p.s_anchor
        )));
    }
    if !(p.tol > 0.0 && p.tol < 1.0) {
        return Err(Failure::Config(format!("tol must lie in (0, 1), got {}", p.tol)));
    }

    let out = OutDir::create(&f.common.out)?;
    out.archive_config("construct", &p)?;
    let profile = profile_for(p.s_anchor, p.tol)?;
    let adm = build_admissible(&profile, p.s_anchor, &p.construct)?;
    let site = &adm.site;
    let checks = Checks {
        inflections: adm.inflection_count,
        embedded: adm.embedded,
        contained: adm.contained(&p.construct),
        radial_tangencies: adm.radial_tangencies,
        min_corridor_margin: adm.min_corridor_margin / site.width,
        glue_curvature_ok: site.glue_max_positive <= 1.0 && site.glue_max_negative <= 1.0,
    };
    let pass = checks.inflections == 2 && checks.embedded && checks.contained && checks.radial_tangencies == 2 && checks.glue_curvature_ok;
    let report = Report {
        site,
        lambda: lambda_asymptotics(site)?,
        vertices: adm.curve.len(),
        checks,
        pass,
    };
    out.json("site.json", &report)?;

    let name = format!("curve.{}", ext(f.common.format));
    match f.common.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out.file(&name)?);
            write_snapshot_header(&mut w)?;
            write_snapshot(&mut w, 0.0, &adm.curve)?;
            w.flush()?;
        }
        Format::Json => out.json(&name, &Frame::new(0.0, 0, &adm.curve))?,
        Format::Svg => out.text("construction.svg", &construction_svg(&profile, &adm))?,
    }
    if !pass {
        return Err(Failure::Verification {
            message: "admissible curve checks failed; see site.json".into(),
            details: serde_json::to_value(&report.checks)?,
        });
    }
    Ok(())
}
