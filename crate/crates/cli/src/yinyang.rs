use crate::out::{ext, OutDir};
use crate::{load_params, Common, Failure, Format, Outcome};
use ancient_csf::io::{profile_svg, write_profile_csv, ProfileEnvelope};
use ancient_csf::yinyang::{HInflection, IdentityReport, AsymptoticRatios, Stencil, YinYangProfile, CORRIDOR_MIN_ABS_S};
use clap::Args;
use serde::{Deserialize, Serialize};

#[derive(Args, Debug)]
pub struct Flags {
    #[command(flatten)]
    common: Common,
    /// Profile extent: the identities are checked on [-s_max, s_max].
    #[arg(long, allow_hyphen_values = true)]
    s_max: Option<f64>,
    /// Integrator tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Sample spacing of the stored profile.
    #[arg(long)]
    step: Option<f64>,
    /// Extent of the exported profile file.
    #[arg(long)]
    export_s_max: Option<f64>,
    /// Also compute the asymptotic ratios at `ratio_s`.
    #[arg(long)]
    check_asymptotics: bool,
    /// Arclengths for the asymptotic ratios, comma separated.
    #[arg(long, value_delimiter = ',')]
    ratio_s: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub s_max: f64,
    pub tol: f64,
    pub step: f64,
    pub export_s_max: f64,
    pub check_asymptotics: bool,
    pub ratio_s: Vec<f64>,
    /// Bound on `|F' - (cos, sin)|` from differences of positions.
    pub ode_tol: f64,
    /// Bound on the relative residual of the soliton identities.
    pub identity_tol: f64,
    /// Ratios must lie in `1 ± ratio_band` at the largest `ratio_s`.
    pub ratio_band: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            s_max: 1e4,
            tol: 1e-12,
            step: 0.01,
            export_s_max: 50.0,
            check_asymptotics: false,
            ratio_s: vec![1e2, 1e3, 1e4],
            ode_tol: 1e-8,
            identity_tol: 1e-6,
            ratio_band: 0.02,
        }
    }
}

impl Params {
    fn validate(&self) -> Result<(), Failure> {
        let pos = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Failure::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        pos(self.s_max, "s_max")?;
        pos(self.tol, "tol")?;
        pos(self.step, "step")?;
        pos(self.export_s_max, "export_s_max")?;
        pos(self.ode_tol, "ode_tol")?;
        pos(self.identity_tol, "identity_tol")?;
        pos(self.ratio_band, "ratio_band")?;
        if self.check_asymptotics {
            if self.ratio_s.is_empty() {
                return Err(Failure::Config("ratio_s must not be empty".into()));
            }
            if let Some(s) = self.ratio_s.iter().find(|&&s| !(s >= CORRIDOR_MIN_ABS_S && s.is_finite())) {
                return Err(Failure::Config(format!("ratio_s entries must be >= {CORRIDOR_MIN_ABS_S}, got {s}")));
            }
            if self.ratio_s.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Failure::Config("ratio_s must be increasing".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
struct Asymptotics {
    /// Extent of the profile used for the ratios (the corridor at `s` needs
    /// the positive wall somewhat beyond `|s|`).
    profile_s_max: f64,
    ratios: Vec<AsymptoticRatios>,
    in_band: bool,
    monotone: bool,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct Report {
    s_max: f64,
    tol: f64,
    step: f64,
    identity: IdentityReport,
    identity_pass: bool,
    h_inflection: HInflection,
    asymptotics: Option<Asymptotics>,
    pass: bool,
}

fn ratio_values(r: &AsymptoticRatios) -> [f64; 4] {
    [r.curvature, r.radius, r.width, r.full_turn]
}

pub fn run(f: Flags) -> Outcome {
    let mut p: Params = load_params(f.common.config.as_deref())?;
    if let Some(v) = f.s_max {
        p.s_max = v;
    }
    if let Some(v) = f.tol {
        p.tol = v;
    }
    if let Some(v) = f.step {
        p.step = v;
    }
    if let Some(v) = f.export_s_max {
        p.export_s_max = v;
    }
    if f.check_asymptotics {
        p.check_asymptotics = true;
    }
    if let Some(v) = f.ratio_s {
        p.ratio_s = v;
    }
    p.validate()?;

    let need = if p.check_asymptotics {
        p.s_max.max(1.1 * p.ratio_s.last().copied().unwrap_or(0.0) + 50.0)
    } else {
        p.s_max
    };
    let full = YinYangProfile::integrate_with_step(need, p.tol, p.step)?;
    let profile = if need > p.s_max { full.truncated(p.s_max)? } else { full.clone() };
    let out = OutDir::create(&f.common.out)?;
    out.archive_config("yinyang", &p)?;

    let identity = profile.identity_report(Stencil::Fourth, p.s_max);
    let identity_pass = identity.ode.abs <= p.ode_tol
        && [identity.soliton, identity.integral, identity.h_prime].iter().all(|r| r.rel <= p.identity_tol);
    let h_inflection = profile.find_h_inflection()?;

    let asymptotics = if p.check_asymptotics {
        let ratios = p.ratio_s.iter().map(|&s| full.asymptotic_ratios(s)).collect::<Result<Vec<_>, _>>()?;
        let last = ratio_values(ratios.last().unwrap());
        let in_band = last.iter().all(|v| (v - 1.0).abs() <= p.ratio_band);
        let monotone = ratios.windows(2).all(|w| {
            let (a, b) = (ratio_values(&w[0]), ratio_values(&w[1]));
            a.iter().zip(&b).all(|(x, y)| (y - 1.0).abs() < (x - 1.0).abs())
        });
        Some(Asymptotics {
            profile_s_max: full.s_max(),
            ratios,
            in_band,
            monotone,
            pass: in_band && monotone,
        })
    } else {
        None
    };
    let pass = identity_pass && asymptotics.as_ref().map_or(true, |a| a.pass);

    let export = profile.truncated(p.export_s_max.min(p.s_max))?;
    let name = format!("profile.{}", ext(f.common.format));
    match f.common.format {
        Format::Csv => {
            let mut w = out.file(&name)?;
            write_profile_csv(&export, &mut w)?;
        }
        Format::Json => out.json(&name, &ProfileEnvelope::from_profile(&export))?,
        Format::Svg => out.text(&name, &profile_svg(&export))?,
    }

    let report = Report {
        s_max: profile.s_max(),
        tol: p.tol,
        step: p.step,
        identity,
        identity_pass,
        h_inflection,
        asymptotics,
        pass,
    };
    out.json("yinyang_report.json", &report)?;
    if !pass {
        return Err(Failure::Verification {
            message: "profile checks failed; see yinyang_report.json".into(),
            details: serde_json::json!({
                "identity_pass": report.identity_pass,
                "asymptotics_pass": report.asymptotics.as_ref().map(|a| a.pass),
            }),
        });
    }
    Ok(())
}
