use ancient_csf_wasm::{construct, endpoint_grid, yinyang, Evolution};
use serde_json::Value;

fn parse(s: String) -> Value {
    let v: Value = serde_json::from_str(&s).unwrap();
    assert!(v.get("error").is_none(), "{v}");
    v
}

#[test]
fn profile_reply_carries_a_drawing() {
    let v = parse(yinyang(20.0));
    assert!(v["svg"].as_str().unwrap().starts_with("<svg"));
    assert!(v["identity_max_rel"].as_f64().unwrap() < 1e-6);
}

#[test]
fn bad_extent_is_reported_not_thrown() {
    let v: Value = serde_json::from_str(&yinyang(-1.0)).unwrap();
    assert!(v["error"].as_str().unwrap().contains("s_max"));
}

#[test]
fn construction_reply() {
    let v = parse(construct(-200.0));
    assert_eq!(v["inflections"], 2);
    assert_eq!(v["embedded"], true);
    assert_eq!(v["contained"], true);
}

#[test]
fn endpoint_grid_and_its_flip() {
    assert_eq!(parse(endpoint_grid(30, false))["pass"], true);
    let flipped = parse(endpoint_grid(30, true));
    assert_eq!(flipped["pass"], false);
    assert!(flipped["failures"].as_u64().unwrap() > 0);
}

#[test]
fn evolution_advances_inside_the_corridor() {
    let mut e = Evolution::new(-200.0).unwrap();
    let a = parse(e.advance(20));
    let b = parse(e.advance(20));
    assert_eq!(b["steps"], 40);
    assert!(b["t"].as_f64().unwrap() > a["t"].as_f64().unwrap());
    assert!(b["area"].as_f64().unwrap() < a["area"].as_f64().unwrap());
    assert_eq!(b["contained"], true);
}
