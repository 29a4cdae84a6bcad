use ancient_csf::construct::{build_admissible, lambda_asymptotics, AdmissibleCurve, ConstructConfig};
use ancient_csf::flow::track_tip;
use ancient_csf::yinyang::YinYangProfile;
use ancient_csf::Error;
use std::sync::OnceLock;

const SCALES: [f64; 3] = [200.0, 1e3, 1e4];

fn profile() -> &'static YinYangProfile {
    static P: OnceLock<YinYangProfile> = OnceLock::new();
    P.get_or_init(|| YinYangProfile::integrate(1.1e4, 1e-12).unwrap())
}

fn built() -> &'static Vec<AdmissibleCurve> {
    static B: OnceLock<Vec<AdmissibleCurve>> = OnceLock::new();
    B.get_or_init(|| {
        SCALES
            .iter()
            .map(|&s| build_admissible(profile(), -s, &ConstructConfig::default()).unwrap())
            .collect()
    })
}

/// Radial chord at F(s) found by scanning the stored samples for the first
/// positive-wall crossing of the ray beyond F(s).
fn brute_force_width(p: &YinYangProfile, s: f64) -> f64 {
    let a = p.position(s).unwrap();
    let dir = a * (1.0 / a.norm());
    let cross = |sig: f64| {
        let q = p.position(sig).unwrap();
        dir.x * q.y - dir.y * q.x
    };
    let mut best = f64::INFINITY;
    let step = p.step();
    let mut sig = step;
    while sig + step < p.s_max() {
        let (c0, c1) = (cross(sig), cross(sig + step));
        if c0.signum() != c1.signum() {
            let (mut lo, mut hi) = (sig, sig + step);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if cross(mid).signum() == c0.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let q = p.position(lo).unwrap();
            let r = q.dot(dir);
            if r > a.norm() {
                best = best.min(r - a.norm());
            }
        }
        sig += step;
    }
    best
}

#[test]
fn chord_width_matches_brute_force() {
    for a in built() {
        let w = brute_force_width(profile(), a.site.s);
        assert!((w - a.site.width).abs() < 1e-9 * w.max(1.0), "{w} vs {}", a.site.width);
    }
}

#[test]
fn admissible_at_three_scales() {
    let mut ms = Vec::new();
    for a in built() {
        let site = &a.site;
        println!(
            "s = {}: inflections {}, embedded {}, margin {:.3e} w, glue +{:.3} -{:.3}, M {:.5}",
            site.s,
            a.inflection_count,
            a.embedded,
            a.min_corridor_margin / site.width,
            site.glue_max_positive,
            site.glue_max_negative,
            site.m_observed
        );
        assert_eq!(a.inflection_count, 2);
        assert!(a.embedded);
        assert!(a.contained(&ConstructConfig::default()));
        assert_eq!(a.radial_tangencies, 2);
        assert!(site.glue_max_positive <= 1.0 && site.glue_max_negative <= 1.0);
        assert!(site.s < site.s0 && site.s0 < 0.0 && 0.0 < site.sigma0 && site.sigma0 < site.sigma, "{site:?}");
        assert!(site.tangency_sin <= 1e-8);
        assert!(site.transversality_sin >= 1e-6);
        ms.push(site.m_observed);
    }
    let (lo, hi) = ms.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &m| (l.min(m), h.max(m)));
    assert!(hi <= 2.0 * lo, "{ms:?}");
}

#[test]
fn tip_is_the_reaper_tip() {
    for a in built() {
        let tip = track_tip(&a.curve, profile(), 0.0).unwrap();
        assert!(tip.point.dist(a.tip) < 0.05 * a.site.width, "{:?} vs {:?}", tip.point, a.tip);
        // Width at the tip agrees with the corridor width at its wall projection.
        let q = profile().corridor_width(-tip.l_minus).unwrap();
        assert!((q.width - tip.w_tip).abs() <= 1e-6 * q.width);
    }
}

#[test]
fn lambda_ratios_approach_one() {
    let reps: Vec<_> = built().iter().map(|a| lambda_asymptotics(&a.site).unwrap()).collect();
    let gap = |f: fn(&ancient_csf::construct::LambdaReport) -> f64| reps.iter().map(|r| (f(r) - 1.0).abs()).collect::<Vec<_>>();
    let bar = gap(|r| r.lambda_bar_unslid_ratio);
    let quot = gap(|r| r.lambda_over_bar);
    println!("|Λ̄²e^Λ̄w²/2π² - 1| = {bar:?}\n|Λ/Λ̄ - 1| = {quot:?}");
    for g in [&bar, &quot] {
        assert!(g[1] < g[0] && g[2] < g[1], "{g:?}");
    }
}

#[test]
fn rejects_small_anchor() {
    let r = build_admissible(profile(), -50.0, &ConstructConfig::default());
    assert!(matches!(r, Err(Error::InvalidParameter { .. })), "{r:?}");
}

#[test]
fn outer_chord_end_is_on_the_positive_wall() {
    for adm in built() {
        let s = &adm.site;
        assert!(s.b.norm() > s.a.norm(), "s = {}: |A| = {}, |B| = {}", s.s, s.a.norm(), s.b.norm());
        assert!(s.sigma > s.s.abs());
        assert!(s.notes.iter().all(|n| !n.contains("farther than 10 w")), "{:?}", s.notes);
    }
}
