//! File formats: profile CSV/JSON, curve snapshots, JSONL trajectories and
//! self-contained SVG.
//!
//! Floats go through Rust's shortest round-trip formatting, so every value
//! written here reads back bit for bit.

use crate::construct::AdmissibleCurve;
use crate::curve::PlaneCurve;
use crate::error::{Error, Result};
use crate::vec2::Vec2;
use crate::yinyang::YinYangProfile;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::{Read, Write};

pub const PROFILE_HEADER: [&str; 6] = ["s", "x", "y", "tx", "ty", "H"];
pub const SNAPSHOT_HEADER: [&str; 5] = ["t", "idx", "x", "y", "H"];

/// Every stored sample, `s` from `-s_max` to `s_max`.
pub fn write_profile_csv<W: Write>(profile: &YinYangProfile, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PROFILE_HEADER)?;
    let n = profile.half_len() as i64 - 1;
    for k in -n..=n {
        let p = profile.point_at(k);
        let t = profile.tangent_at(k);
        w.write_record(&[
            profile.s_at(k).to_string(),
            p.x.to_string(),
            p.y.to_string(),
            t.x.to_string(),
            t.y.to_string(),
            profile.curvature_at(k).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_profile_csv`]. The step is read off the `s` column;
/// the CSV does not carry the integration tolerance, so it is passed in.
pub fn read_profile_csv<R: Read>(input: R, tol: f64) -> Result<YinYangProfile> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(PROFILE_HEADER) {
        return Err(Error::Format(format!("expected header {}, got {}", PROFILE_HEADER.join(","), header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut s = Vec::new();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("line {}: `{}`: {e}", rec.position().map_or(0, |p| p.line()), &rec[i])))
        };
        let sv = num(0)?;
        if sv >= 0.0 {
            s.push(sv);
            x.push(num(1)?);
            y.push(num(2)?);
        }
    }
    if s.len() < 2 {
        return Err(Error::Format("profile needs at least two samples with s >= 0".into()));
    }
    let step = s[1] - s[0];
    for (k, &sv) in s.iter().enumerate() {
        if sv != k as f64 * step {
            return Err(Error::Format(format!("s column is not a uniform grid at row {k}: {sv}")));
        }
    }
    YinYangProfile::from_samples(step, tol, x, y)
}

/// JSON form of a profile: the samples on `[0, s_max]` plus integration
/// settings. The negative branch is `F(-s) = -F(s)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileEnvelope {
    pub s_max: f64,
    pub tol: f64,
    pub step: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl ProfileEnvelope {
    pub fn from_profile(p: &YinYangProfile) -> Self {
        let n = p.half_len() as i64;
        let (x, y) = (0..n).map(|k| p.point_at(k)).map(|q| (q.x, q.y)).unzip();
        Self {
            s_max: p.s_max(),
            tol: p.tol(),
            step: p.step(),
            x,
            y,
        }
    }

    pub fn into_profile(self) -> Result<YinYangProfile> {
        let expect = (self.x.len().max(1) - 1) as f64 * self.step;
        if expect != self.s_max {
            return Err(Error::Format(format!("s_max {} disagrees with {} samples at step {}", self.s_max, self.x.len(), self.step)));
        }
        YinYangProfile::from_samples(self.step, self.tol, self.x, self.y)
    }
}

pub fn write_snapshot_header<W: Write>(w: &mut csv::Writer<W>) -> Result<()> {
    w.write_record(SNAPSHOT_HEADER)?;
    Ok(())
}

/// One row per vertex: `t,idx,x,y,H`.
pub fn write_snapshot<W: Write>(w: &mut csv::Writer<W>, t: f64, curve: &PlaneCurve) -> Result<()> {
    for (i, (p, k)) in curve.points().iter().zip(curve.curvature()).enumerate() {
        w.write_record(&[t.to_string(), i.to_string(), p.x.to_string(), p.y.to_string(), k.to_string()])?;
    }
    Ok(())
}

/// Curve at one time, as read back from a snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub points: Vec<Vec2>,
    pub curvature: Vec<f64>,
}

pub fn read_snapshots<R: Read>(input: R) -> Result<Vec<Snapshot>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(SNAPSHOT_HEADER) {
        return Err(Error::Format(format!("expected header {}", SNAPSHOT_HEADER.join(","))));
    }
    let mut out: Vec<Snapshot> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| rec[i].parse::<f64>().map_err(|e| Error::Format(format!("`{}`: {e}", &rec[i])));
        let (t, x, y, h) = (f(0)?, f(2)?, f(3)?, f(4)?);
        let idx: usize = rec[1].parse().map_err(|e| Error::Format(format!("`{}`: {e}", &rec[1])))?;
        if idx == 0 {
            out.push(Snapshot {
                t,
                points: Vec::new(),
                curvature: Vec::new(),
            });
        }
        let snap = match out.last_mut() {
            Some(s) if s.t == t && s.points.len() == idx => s,
            _ => return Err(Error::Format(format!("row t = {t}, idx = {idx} out of sequence"))),
        };
        snap.points.push(Vec2::new(x, y));
        snap.curvature.push(h);
    }
    Ok(out)
}

/// One line of a JSONL trajectory stream.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Frame {
    pub t: f64,
    pub steps: usize,
    pub closed: bool,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Frame {
    pub fn new(t: f64, steps: usize, curve: &PlaneCurve) -> Self {
        let (x, y) = curve.points().iter().map(|p| (p.x, p.y)).unzip();
        Self {
            t,
            steps,
            closed: curve.closed(),
            x,
            y,
        }
    }
}

pub fn write_jsonl<W: Write, T: Serialize>(w: &mut W, item: &T) -> Result<()> {
    serde_json::to_writer(&mut *w, item)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Minimal SVG writer with a fixed viewBox. The y axis points up.
pub struct Svg {
    lo: Vec2,
    hi: Vec2,
    size: f64,
    body: String,
}

impl Svg {
    /// Canvas covering `[lo, hi]` (padded by 5%), `size` pixels on the long side.
    pub fn new(lo: Vec2, hi: Vec2, size: f64) -> Self {
        let pad = (hi - lo) * 0.05;
        let (lo, hi) = (lo - pad, hi + pad);
        Self {
            lo,
            hi,
            size,
            body: String::new(),
        }
    }

    fn scale(&self) -> f64 {
        self.size / (self.hi.x - self.lo.x).max(self.hi.y - self.lo.y).max(1e-300)
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        let s = self.scale();
        ((p.x - self.lo.x) * s, (self.hi.y - p.y) * s)
    }

    pub fn polyline(&mut self, pts: &[Vec2], closed: bool, stroke: &str, width: f64) {
        let tag = if closed { "polygon" } else { "polyline" };
        let _ = write!(self.body, "<{tag} style=\"fill:none;stroke:{stroke};stroke-width:{width}\" points=\"");
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.map(*p);
            let _ = write!(self.body, "{}{x:.2},{y:.2}", if i == 0 { "" } else { " " });
        }
        self.body.push_str("\"/>\n");
    }

    pub fn point(&mut self, p: Vec2, label: &str, fill: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(self.body, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" style=\"fill:{fill}\"/>");
        if !label.is_empty() {
            let _ = writeln!(
                self.body,
                "<text x=\"{:.2}\" y=\"{:.2}\" style=\"font:12px sans-serif;fill:{fill}\">{}</text>",
                x + 5.0,
                y - 5.0,
                escape(label)
            );
        }
    }

    pub fn caption(&mut self, text: &str) {
        let _ = writeln!(self.body, "<text x=\"8\" y=\"18\" style=\"font:13px sans-serif;fill:#222\">{}</text>", escape(text));
    }

    pub fn finish(&self) -> String {
        let s = self.scale();
        let (w, h) = ((self.hi.x - self.lo.x) * s, (self.hi.y - self.lo.y) * s);
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w:.2} {h:.2}\" width=\"{w:.0}\" height=\"{h:.0}\">\n<rect width=\"100%\" height=\"100%\" style=\"fill:#fff\"/>\n{}</svg>\n",
            self.body
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Bounding box of a point set.
pub fn bounds<'a>(pts: impl IntoIterator<Item = &'a Vec2>) -> (Vec2, Vec2) {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for q in pts {
        lo = Vec2::new(lo.x.min(q.x), lo.y.min(q.y));
        hi = Vec2::new(hi.x.max(q.x), hi.y.max(q.y));
    }
    (lo, hi)
}

/// Both halves of the stored profile.
pub fn profile_svg(p: &YinYangProfile) -> String {
    let n = p.half_len() as i64 - 1;
    let r = (0..=n).fold(0.0f64, |m, k| m.max(p.point_at(k).norm()));
    let mut svg = Svg::new(Vec2::new(-r, -r), Vec2::new(r, r), 800.0);
    let pos: Vec<Vec2> = (0..=n).map(|k| p.point_at(k)).collect();
    let neg: Vec<Vec2> = (0..=n).map(|k| p.point_at(-k)).collect();
    svg.polyline(&pos, false, "#1f5fa8", 1.0);
    svg.polyline(&neg, false, "#b8412c", 1.0);
    svg.point(Vec2::ZERO, "O", "#222");
    svg.caption(&format!("Yin-Yang profile, |s| <= {}", p.s_max()));
    svg.finish()
}

/// Close-up of the tip region in the construction frame (A on the +y axis):
/// walls, reaper, the glued curve with its glue pieces, and the labelled
/// construction points.
pub fn construction_svg(profile: &YinYangProfile, adm: &AdmissibleCurve) -> String {
    let s = &adm.site;
    let w = s.width;
    let rot = |q: Vec2| q.rotate(s.beta);
    let marks: Vec<(Vec2, &str)> = [(s.a, "A"), (s.b, "B"), (s.p, "P"), (s.q, "Q"), (s.u, "U"), (s.v, "V")]
        .into_iter()
        .chain(s.w_point.map(|q| (q, "W")))
        .collect();
    let (lo, hi) = bounds(marks.iter().map(|m| &m.0));
    let pad = Vec2::new(w, w);
    let (lo, hi) = (lo - pad, hi + pad);
    let inside = |q: &Vec2| q.x >= lo.x && q.x <= hi.x && q.y >= lo.y && q.y <= hi.y;
    let mut svg = Svg::new(lo, hi, 800.0);

    let reach = 20.0 * w.max(1.0);
    for (a, b) in [(s.s - reach, s.s0 + reach), (s.sigma0 - reach, s.sigma + reach)] {
        let n = 2000;
        let pts: Vec<Vec2> = (0..=n)
            .filter_map(|k| profile.position(a + (b - a) * k as f64 / n as f64).ok())
            .map(rot)
            .filter(inside)
            .collect();
        svg.polyline(&pts, false, "#999", 1.0);
    }
    let r = &s.reaper;
    let span = r.arclength_of_u(r.u_limit());
    let reaper: Vec<Vec2> = (0..=800)
        .map(|k| r.point_at_arclength(-span + 2.0 * span * k as f64 / 800.0))
        .filter(inside)
        .collect();
    svg.polyline(&reaper, false, "#7aa6d6", 1.0);
    let curve: Vec<Vec2> = adm.curve.points().iter().map(|&q| rot(q)).filter(inside).collect();
    svg.polyline(&curve, false, "#222", 1.5);
    for (pts, color) in adm.glue_points.iter().zip(["#d08020", "#3a9a50"]) {
        let pts: Vec<Vec2> = pts.iter().copied().filter(inside).collect();
        svg.polyline(&pts, false, color, 3.0);
    }
    for (q, label) in marks {
        svg.point(q, label, "#b8412c");
    }
    svg.caption(&format!("admissible curve at s = {}, w = {:.5}", s.s, w));
    svg.finish()
}

/// A curve at time `t` inside the corridor rotated by `t`, framed on the
/// curve.
pub fn corridor_svg(profile: &YinYangProfile, curve: &PlaneCurve, t: f64, caption: &str) -> String {
    let (lo, hi) = bounds(curve.points());
    let pad = (hi - lo) * 0.05;
    let (lo, hi) = (lo - pad, hi + pad);
    let inside = |q: &Vec2| q.x >= lo.x && q.x <= hi.x && q.y >= lo.y && q.y <= hi.y;
    let mut svg = Svg::new(lo, hi, 800.0);
    let n = profile.half_len() as i64 - 1;
    for sign in [1, -1] {
        // Split at gaps so clipped wall pieces are not joined across the frame.
        let mut run: Vec<Vec2> = Vec::new();
        for k in 0..=n {
            let q = profile.point_at(sign * k).rotate(t);
            if inside(&q) {
                run.push(q);
            } else if !run.is_empty() {
                svg.polyline(&run, false, if sign > 0 { "#1f5fa8" } else { "#b8412c" }, 1.0);
                run.clear();
            }
        }
        if !run.is_empty() {
            svg.polyline(&run, false, if sign > 0 { "#1f5fa8" } else { "#b8412c" }, 1.0);
        }
    }
    svg.polyline(curve.points(), curve.closed(), "#222", 1.5);
    svg.caption(caption);
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_csv_round_trip_is_bit_exact() {
        let p = YinYangProfile::integrate(5.0, 1e-12).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&p, &mut buf).unwrap();
        let q = read_profile_csv(buf.as_slice(), p.tol()).unwrap();
        assert_eq!(q.half_len(), p.half_len());
        assert_eq!(q.step().to_bits(), p.step().to_bits());
        for k in -(p.half_len() as i64 - 1)..p.half_len() as i64 {
            assert_eq!(p.point_at(k), q.point_at(k));
        }
    }

    #[test]
    fn envelope_round_trip_is_bit_exact() {
        let p = YinYangProfile::integrate(3.0, 1e-12).unwrap();
        let text = serde_json::to_string(&ProfileEnvelope::from_profile(&p)).unwrap();
        let env: ProfileEnvelope = serde_json::from_str(&text).unwrap();
        let q = env.into_profile().unwrap();
        for k in 0..p.half_len() as i64 {
            assert_eq!(p.point_at(k), q.point_at(k));
        }
    }

    #[test]
    fn snapshots_round_trip() {
        let pts = (0..7).map(|i| Vec2::from_angle(i as f64 * 0.9) * 1.3).collect();
        let c = PlaneCurve::new(pts, true, 1.0);
        let mut w = csv::Writer::from_writer(Vec::new());
        write_snapshot_header(&mut w).unwrap();
        write_snapshot(&mut w, 0.0, &c).unwrap();
        write_snapshot(&mut w, 0.1, &c).unwrap();
        let buf = w.into_inner().unwrap();
        let snaps = read_snapshots(buf.as_slice()).unwrap();
        assert_eq!(snaps.len(), 2);
        assert_eq!(snaps[1].t, 0.1);
        assert_eq!(snaps[1].points, c.points());
        assert_eq!(snaps[1].curvature, c.curvature());
    }

    #[test]
    fn bad_header_is_rejected() {
        let r = read_profile_csv("a,b\n1,2\n".as_bytes(), 1e-12);
        assert!(matches!(r, Err(Error::Format(_))));
    }

    #[test]
    fn svg_is_self_contained() {
        let mut s = Svg::new(Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0), 400.0);
        s.polyline(&[Vec2::ZERO, Vec2::new(1.0, 0.0)], false, "#000", 1.0);
        s.point(Vec2::ZERO, "A<B", "#c00");
        let out = s.finish();
        assert!(out.starts_with("<svg") && out.contains("viewBox=\"0 0 400.00 400.00\""));
        assert!(out.contains("A&lt;B") && !out.contains("href"));
    }
}
