use crate::construct::profile_for;
use crate::out::OutDir;
use crate::{load_params, Common, Failure, Format, Outcome};
use ancient_csf::flow::{DtPolicy, FlowConfig, FlowState, Scheme};
use ancient_csf::io::{bounds, write_jsonl, write_snapshot, write_snapshot_header, Frame, Svg};
use ancient_csf::monitor::{run_admissible, Check, RunConfig, Sample};
use ancient_csf::reaper::ReaperPose;
use ancient_csf::{PlaneCurve, Vec2, YinYangProfile};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    /// Unit circle against the exact shrinking radius.
    Circle,
    /// Standard Grim Reaper chunk against its translate.
    Reaper,
    /// Arc `|s| <= 3` of the Yin-Yang against its rotation.
    Rotating,
    /// Admissible curve with all monitors.
    Admissible,
}

#[derive(Args, Debug)]
pub struct Flags {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    case: Option<Case>,
    /// Anchor of the admissible curve.
    #[arg(long, allow_hyphen_values = true)]
    s_anchor: Option<f64>,
    /// Stop the admissible run once the tip width grew by this factor.
    #[arg(long)]
    growth: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Barrier ε.
    #[arg(long)]
    eps: Option<f64>,
    /// Benchmark spacing.
    #[arg(long)]
    h: Option<f64>,
    /// Benchmark end time.
    #[arg(long)]
    t_end: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub case: Case,
    /// Spacing, end time and error bound of the benchmarks.
    pub h: f64,
    pub t_end: f64,
    pub bench_tol: f64,
    /// Write every k-th monitor sample of the admissible run as a frame.
    pub frame_every: usize,
    pub profile_tol: f64,
    pub run: RunConfig,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            case: Case::Admissible,
            h: 0.02,
            t_end: 0.1,
            bench_tol: 1e-4,
            frame_every: 4,
            profile_tol: 1e-12,
            run: RunConfig::default(),
        }
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    version: &'static str,
    case: Case,
    flow: FlowConfig,
    thresholds: serde_json::Value,
    format: Format,
    params: &'a Params,
}

/// Frame sink for whichever format was requested.
enum Frames {
    Csv(csv::Writer<BufWriter<File>>),
    Jsonl(BufWriter<File>),
    Svg(Vec<(f64, Vec<Vec2>, bool)>),
}

impl Frames {
    fn open(out: &OutDir, format: Format) -> Result<Self, Failure> {
        Ok(match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out.file("snapshots.csv")?);
                write_snapshot_header(&mut w)?;
                Frames::Csv(w)
            }
            Format::Json => Frames::Jsonl(out.file("trajectory.jsonl")?),
            Format::Svg => Frames::Svg(Vec::new()),
        })
    }

    fn push(&mut self, t: f64, steps: usize, c: &PlaneCurve) -> Result<(), Failure> {
        match self {
            Frames::Csv(w) => write_snapshot(w, t, c)?,
            Frames::Jsonl(w) => write_jsonl(w, &Frame::new(t, steps, c))?,
            Frames::Svg(v) => v.push((t, c.points().to_vec(), c.closed())),
        }
        Ok(())
    }

    fn finish(self, out: &OutDir, title: &str) -> Result<(), Failure> {
        match self {
            Frames::Csv(mut w) => w.flush()?,
            Frames::Jsonl(mut w) => w.flush()?,
            Frames::Svg(v) => {
                let (lo, hi) = bounds(v.iter().flat_map(|f| f.1.iter()));
                let mut svg = Svg::new(lo, hi, 800.0);
                let n = v.len().max(2) - 1;
                for (i, (_, pts, closed)) in v.iter().enumerate() {
                    let shade = 200 - (170 * i / n) as u32;
                    svg.polyline(pts, *closed, &format!("rgb({shade},{shade},{shade})"), 1.0);
                }
                let t_last = v.last().map_or(0.0, |f| f.0);
                svg.caption(&format!("{title}, {} frames up to t = {t_last}", v.len()));
                out.text("evolve.svg", &svg.finish())?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
struct BenchReport {
    case: Case,
    h: f64,
    t_end: f64,
    steps: usize,
    max_error: f64,
    bench_tol: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct AdmissibleReport<'a> {
    case: Case,
    s_anchor: f64,
    w0: f64,
    t_end: f64,
    steps: usize,
    samples: usize,
    stop_reason: &'a str,
    t0_event: Option<f64>,
    mean_area_rate: f64,
    checks: &'a [Check],
    pass: bool,
}

pub fn run(f: Flags) -> Outcome {
    let mut p: Params = load_params(f.common.config.as_deref())?;
    if let Some(v) = f.case {
        p.case = v;
    }
    if let Some(v) = f.s_anchor {
        p.run.s_anchor = v;
    }
    if let Some(v) = f.growth {
        p.run.growth = v;
    }
    if let Some(v) = f.t_max {
        p.run.t_max = v;
    }
    if let Some(v) = f.eps {
        p.run.eps = v;
    }
    if let Some(v) = f.h {
        p.h = v;
    }
    if let Some(v) = f.t_end {
        p.t_end = v;
    }
    for (v, name) in [(p.h, "h"), (p.t_end, "t_end"), (p.bench_tol, "bench_tol"), (p.profile_tol, "profile_tol")] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Failure::Config(format!("{name} must be positive, got {v}")));
        }
    }
    if p.frame_every == 0 {
        return Err(Failure::Config("frame_every must be at least 1".into()));
    }
    if p.case == Case::Circle && p.t_end >= 0.5 {
        return Err(Failure::Config(format!("the unit circle vanishes at t = 0.5; t_end = {}", p.t_end)));
    }
    if p.case == Case::Admissible {
        p.run.validate()?;
        if !(p.run.s_anchor.abs() >= p.run.construct.min_abs_s && p.run.s_anchor < 0.0) {
            return Err(Failure::Config(format!("s_anchor must be at most -{}, got {}", p.run.construct.min_abs_s, p.run.s_anchor)));
        }
    }

    let out = OutDir::create(&f.common.out)?;
    out.archive_config("evolve", &p)?;
    let mut frames = Frames::open(&out, f.common.format)?;
    let flow = match p.case {
        Case::Admissible => p.run.flow,
        _ => FlowConfig::uniform(Scheme::Explicit, p.h, DtPolicy::Cfl { cfl: 0.2 }),
    };
    let thresholds = match p.case {
        Case::Admissible => serde_json::json!({
            "tol_w": p.run.tol,
            "eps": p.run.eps,
            "growth": p.run.growth,
            "area_rate_tol": p.run.area_rate_tol,
            "m_eps": p.run.m_eps,
            "radius_mult": p.run.radius_mult,
        }),
        _ => serde_json::json!({ "bench_tol": p.bench_tol }),
    };
    out.json(
        "manifest.json",
        &Manifest {
            version: env!("CARGO_PKG_VERSION"),
            case: p.case,
            flow,
            thresholds,
            format: f.common.format,
            params: &p,
        },
    )?;

    let pass = match p.case {
        Case::Circle | Case::Reaper | Case::Rotating => {
            let r = benchmark(&p, &flow, &mut frames)?;
            let pass = r.pass;
            out.json("report.json", &r)?;
            pass
        }
        Case::Admissible => admissible(&p, &out, &mut frames)?,
    };
    frames.finish(&out, &format!("{:?} run", p.case).to_lowercase())?;
    if !pass {
        return Err(Failure::Verification {
            message: "flow checks failed; see report.json".into(),
            details: serde_json::Value::Null,
        });
    }
    Ok(())
}

/// Half-length of the Yin-Yang arc in the rotating benchmark.
const ROTATING_SPAN: f64 = 3.0;

fn benchmark(p: &Params, cfg: &FlowConfig, frames: &mut Frames) -> Result<BenchReport, Failure> {
    let h = p.h;
    let reaper = ReaperPose::standard();
    let profile = match p.case {
        Case::Rotating => Some(YinYangProfile::integrate(2.0 * ROTATING_SPAN, p.profile_tol)?),
        _ => None,
    };
    let curve = match (&profile, p.case) {
        (Some(y), _) => {
            let n = (2.0 * ROTATING_SPAN / h).round() as usize;
            let pts = (0..=n)
                .map(|k| y.position(-ROTATING_SPAN + 2.0 * ROTATING_SPAN * k as f64 / n as f64))
                .collect::<Result<Vec<_>, _>>()?;
            PlaneCurve::new(pts, false, h)
        }
        (None, Case::Circle) => {
            let n = (2.0 * PI / h).round() as usize;
            let pts = (0..n).map(|i| Vec2::from_angle(2.0 * PI * i as f64 / n as f64)).collect();
            PlaneCurve::new(pts, true, h)
        }
        _ => reaper.chunk(h)?,
    };
    let ends = (!curve.closed()).then(|| (curve.points()[0], *curve.points().last().unwrap()));
    let mut s = FlowState::new(curve, 0.0, cfg);
    frames.push(0.0, 0, &s.curve)?;
    let segments = 10;
    for k in 1..=segments {
        let t_seg = p.t_end * k as f64 / segments as f64;
        while s.t < t_seg {
            let dt = cfg.time_step(&s.curve).min(t_seg - s.t);
            let t1 = if t_seg - s.t - dt < 1e-15 { t_seg } else { s.t + dt };
            let pin = ends.map(|(a, b): (Vec2, Vec2)| match p.case {
                Case::Rotating => (a.rotate(t1), b.rotate(t1)),
                _ => {
                    let d = reaper.axis * (reaper.lambda * t1);
                    (a + d, b + d)
                }
            });
            s = s.step(t1 - s.t, cfg, pin)?;
            s.t = t1;
        }
        frames.push(s.t, s.steps, &s.curve)?;
    }
    let max_error = match p.case {
        Case::Circle => {
            let r = (1.0 - 2.0 * p.t_end).sqrt();
            s.curve.points().iter().fold(0.0f64, |m, q| m.max((q.norm() - r).abs()))
        }
        Case::Rotating => {
            let y = profile.as_ref().unwrap();
            let m = s.curve.len();
            let mut worst = 0.0f64;
            for (i, &q) in s.curve.points().iter().enumerate() {
                let guess = -ROTATING_SPAN + 2.0 * ROTATING_SPAN * i as f64 / (m - 1) as f64;
                worst = worst.max(y.distance_near(q.rotate(-p.t_end), guess)?);
            }
            worst
        }
        _ => {
            let moved = reaper.soliton_reference(p.t_end)?;
            s.curve
                .points()
                .iter()
                .filter_map(|&q| {
                    let l = moved.to_local(q);
                    // Compare on the central part, normal to the graph.
                    (l.x.abs() < 1.2).then(|| moved.height_above(q).map(|d| d.abs() * l.x.cos()))
                })
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| Failure::Module(ancient_csf::Error::Format("vertex outside the reaper strip".into())))?
                .into_iter()
                .fold(0.0f64, f64::max)
        }
    };
    Ok(BenchReport {
        case: p.case,
        h,
        t_end: p.t_end,
        steps: s.steps,
        max_error,
        bench_tol: p.bench_tol,
        pass: max_error <= p.bench_tol,
    })
}

const MONITOR_HEADER: [&str; 16] = [
    "t",
    "steps",
    "vertices",
    "inflections",
    "area",
    "length",
    "w_tip",
    "l_minus",
    "l_plus",
    "corridor_margin",
    "contained",
    "barrier_min",
    "barrier_inside",
    "drift_min",
    "tip_curvature",
    "away_curvature",
];

fn monitor_row(s: &Sample) -> Vec<String> {
    vec![
        s.t.to_string(),
        s.steps.to_string(),
        s.vertices.to_string(),
        s.inflections.to_string(),
        s.area.to_string(),
        s.length.to_string(),
        s.tip.w_tip.to_string(),
        s.tip.l_minus.to_string(),
        s.tip.l_plus.to_string(),
        s.corridor_margin.to_string(),
        s.contained.to_string(),
        s.barrier.min_signed_distance.to_string(),
        s.barrier.inside.to_string(),
        s.drift.map_or(String::new(), |d| d.min().to_string()),
        s.stability.tip_curvature.to_string(),
        s.stability.away_window.to_string(),
    ]
}

fn admissible(p: &Params, out: &OutDir, frames: &mut Frames) -> Result<bool, Failure> {
    let profile = profile_for(p.run.s_anchor, p.profile_tol)?;
    let mut mon = csv::Writer::from_writer(out.file("monitors.csv")?);
    mon.write_record(MONITOR_HEADER)?;
    let mut err: Option<Failure> = None;
    let mut k = 0usize;
    let (_, report) = run_admissible(&profile, &p.run, |state, sample| {
        if err.is_some() {
            return;
        }
        let r = mon
            .write_record(monitor_row(sample))
            .map_err(Failure::from)
            .and_then(|_| if k % p.frame_every == 0 { frames.push(state.t, state.steps, &state.curve) } else { Ok(()) });
        if let Err(e) = r {
            err = Some(e);
        }
        k += 1;
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    mon.flush()?;
    let pass = report.pass();
    out.json(
        "report.json",
        &AdmissibleReport {
            case: Case::Admissible,
            s_anchor: report.s_anchor,
            w0: report.w0,
            t_end: report.t_end,
            steps: report.steps,
            samples: report.samples.len(),
            stop_reason: &report.stop_reason,
            t0_event: report.t0_event,
            mean_area_rate: report.mean_area_rate,
            checks: &report.checks,
            pass,
        },
    )?;
    Ok(pass)
}
