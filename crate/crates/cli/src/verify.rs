use crate::out::OutDir;
use crate::{load_params, Common, Failure, Format, Outcome};
use ancient_csf::barrier::{endpoint_check, identity_fuzz, truncation_fit, zero_residual_scan, EndpointReport, IdentityFuzz, PhiBundle, TruncationFit};
use ancient_csf::io::{bounds, Svg};
use ancient_csf::{Vec2, YinYangProfile};
use clap::Args;
use serde::{Deserialize, Serialize};

#[derive(Args, Debug)]
pub struct Flags {
    #[command(flatten)]
    common: Common,
    /// Grid points in `a`.
    #[arg(long)]
    n_a: Option<usize>,
    /// Grid points in `aφ`.
    #[arg(long)]
    n_phi: Option<usize>,
    /// Negate the alternating terms of the quartic (the check must then fail).
    #[arg(long)]
    flip_sign: bool,
    #[arg(long)]
    fuzz_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub n_a: usize,
    pub n_phi: usize,
    pub flip_sign: bool,
    pub fuzz_samples: usize,
    pub seed: u64,
    pub fuzz_tol: f64,
    pub profile_s_max: f64,
    pub tol: f64,
    pub truncation_s: Vec<f64>,
    pub truncation_scales: Vec<f64>,
    pub truncation_base: PhiBundle,
    pub min_exponent: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            n_a: 100,
            n_phi: 100,
            flip_sign: false,
            fuzz_samples: 1000,
            seed: 7,
            fuzz_tol: 1e-10,
            profile_s_max: 1e4,
            tol: 1e-12,
            truncation_s: vec![-5000.0, -3.0, 0.5, 7.0, 900.0],
            truncation_scales: vec![1e-1, 3e-2, 1e-2, 3e-3, 1e-3],
            truncation_base: PhiBundle {
                phi: 0.7,
                phi_s: -0.4,
                phi_ss: 0.9,
                phi_t: 0.3,
            },
            min_exponent: 2.9,
        }
    }
}

impl Params {
    fn validate(&self) -> Result<(), Failure> {
        if self.n_a == 0 || self.n_phi == 0 {
            return Err(Failure::Config("grid sizes must be at least 1".into()));
        }
        for (v, name) in [(self.fuzz_tol, "fuzz_tol"), (self.profile_s_max, "profile_s_max"), (self.tol, "tol")] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Failure::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(s) = self.truncation_s.iter().find(|s| !(s.abs() <= self.profile_s_max)) {
            return Err(Failure::Config(format!("truncation point {s} outside the profile")));
        }
        if self.truncation_scales.len() < 2 || self.truncation_scales.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(Failure::Config("truncation_scales needs at least two positive entries".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
struct Zero {
    max_rel: f64,
    at_s: f64,
    bound: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct Truncation {
    fits: Vec<TruncationFit>,
    min_exponent: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    endpoint: &'a EndpointReport,
    fuzz: IdentityFuzz,
    fuzz_tol: f64,
    fuzz_pass: bool,
    zero: Zero,
    truncation: Truncation,
    pass: bool,
}

/// Failures listed in the report and on stderr; the rest go to the grid file.
const SHOWN: usize = 20;

pub fn run(f: Flags) -> Outcome {
    let mut p: Params = load_params(f.common.config.as_deref())?;
    if let Some(v) = f.n_a {
        p.n_a = v;
    }
    if let Some(v) = f.n_phi {
        p.n_phi = v;
    }
    if f.flip_sign {
        p.flip_sign = true;
    }
    if let Some(v) = f.fuzz_samples {
        p.fuzz_samples = v;
    }
    if let Some(v) = f.seed {
        p.seed = v;
    }
    p.validate()?;

    let out = OutDir::create(&f.common.out)?;
    out.archive_config("verify", &p)?;
    let endpoint = endpoint_check(p.n_a, p.n_phi, p.flip_sign);
    let profile = YinYangProfile::integrate(p.profile_s_max, p.tol)?;
    let fuzz = identity_fuzz(&profile, p.fuzz_samples, p.seed)?;
    let fuzz_pass = fuzz.max_rel <= p.fuzz_tol;
    let (max_rel, at_s) = zero_residual_scan(&profile);
    let zero = Zero {
        max_rel,
        at_s,
        bound: profile.tol(),
        pass: max_rel <= profile.tol(),
    };
    let fits = p
        .truncation_s
        .iter()
        .map(|&s| truncation_fit(&profile, s, &p.truncation_base, &p.truncation_scales))
        .collect::<Result<Vec<_>, _>>()?;
    let truncation = Truncation {
        pass: fits.iter().all(|t| t.exponent >= p.min_exponent),
        fits,
        min_exponent: p.min_exponent,
    };
    let pass = endpoint.pass && fuzz_pass && zero.pass && truncation.pass;

    let mut shown = endpoint.clone();
    shown.failures.truncate(SHOWN);
    let report = Report {
        endpoint: &shown,
        fuzz,
        fuzz_tol: p.fuzz_tol,
        fuzz_pass,
        zero,
        truncation,
        pass,
    };
    out.json("verify_report.json", &report)?;

    match f.common.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out.file("endpoint_failures.csv")?);
            w.write_record(["a", "phi", "sign", "quartic", "factored", "rel_diff"])?;
            for g in &endpoint.failures {
                w.serialize((g.a, g.phi, g.sign, g.quartic, g.factored, g.rel_diff))?;
            }
            w.flush()?;
        }
        Format::Json => out.json("endpoint_failures.json", &endpoint.failures)?,
        Format::Svg => out.text("truncation.svg", &render(&report.truncation))?,
    }

    if !pass {
        return Err(Failure::Verification {
            message: format!("{} endpoint grid failures; see verify_report.json", endpoint.failures.len()),
            details: serde_json::json!({
                "endpoint_pass": endpoint.pass,
                "endpoint_failures": endpoint.failures.len(),
                "first_failures": shown.failures,
                "fuzz_pass": report.fuzz_pass,
                "zero_pass": report.zero.pass,
                "truncation_pass": report.truncation.pass,
            }),
        });
    }
    Ok(())
}

/// Log-log plot of the truncation remainders.
fn render(t: &Truncation) -> String {
    let pts: Vec<Vec<Vec2>> = t
        .fits
        .iter()
        .map(|f| f.scales.iter().zip(&f.remainders).map(|(c, r)| Vec2::new(c.log10(), r.max(1e-300).log10())).collect())
        .collect();
    let (lo, hi) = bounds(pts.iter().flatten());
    // Flatten the aspect so decades in y stay readable.
    let sx = (hi.y - lo.y) / (hi.x - lo.x).max(1e-9);
    let map = |q: Vec2| Vec2::new(q.x * sx, q.y);
    let mut svg = Svg::new(map(lo), map(hi), 600.0);
    let palette = ["#1f5fa8", "#b8412c", "#3a9a50", "#d08020", "#7a4fa0"];
    for (i, (line, fit)) in pts.iter().zip(&t.fits).enumerate() {
        let line: Vec<Vec2> = line.iter().map(|&q| map(q)).collect();
        svg.polyline(&line, false, palette[i % palette.len()], 1.5);
        if let Some(&q) = line.last() {
            svg.point(q, &format!("s = {}, slope {:.2}", fit.s, fit.exponent), palette[i % palette.len()]);
        }
    }
    svg.caption("log10 remainder against log10 scale");
    svg.finish()
}
