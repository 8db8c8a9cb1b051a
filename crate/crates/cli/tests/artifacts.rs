mod common;

use common::{hgamma, hgamma_bin};
use serde_json::json;

#[test]
fn svg_is_byte_identical_across_processes() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<String> = (0..2).map(|i| dir.path().join(format!("l{i}.svg")).display().to_string()).collect();
    for p in &paths {
        let r = hgamma_bin(&["lattice", "--m", "3", "--n", "2", "--a1-max", "8", "--a2-min", "-7", "--format", "svg", "--out", p], &[]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert!(r.stdout.is_empty());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let svg = String::from_utf8(a).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches(r#"class="floor""#).count(), 9);
    assert!(svg.contains(r#"data-slope="-2/3""#));
}

#[test]
fn hartogs_floor_points() {
    let v = hgamma(&["lattice", "--m", "1", "--n", "1", "--a1-max", "4", "--a2-min", "-6", "--format", "json"]).json();
    let floors: Vec<(i64, i64)> = v["points"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["floor"] == json!(true))
        .map(|p| (p["a1"].as_i64().unwrap(), p["a2"].as_i64().unwrap()))
        .collect();
    assert_eq!(floors, (0..=4).map(|k| (k, -k - 1)).collect::<Vec<_>>());
}

#[test]
fn svg_goes_to_stdout_without_out() {
    let r = hgamma(&["lattice", "--m", "1", "--n", "2", "--a1-max", "3", "--a2-min", "-3"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("<svg") && r.stdout.ends_with("</svg>\n"));
}

#[test]
fn scan_writes_csv_and_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let r = hgamma(&["zeros", "--gamma", "1/2", "--scan", "--slice", "s0", "--grid", "40", "--out", csv.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert!(v.get("values").is_none());
    assert!(v["min_numerator"].as_f64().unwrap() >= 0.5 * (1.0 - 1e-9));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t_re,t_im,modulus"));
    assert_eq!(lines.count(), 40 * 40);
}

#[test]
fn fixed_s_slice_needs_s() {
    let r = hgamma(&["zeros", "--gamma", "3", "--scan", "--slice", "fixed-s"]);
    assert_eq!(r.code, 2);
    let v = hgamma(&["zeros", "--gamma", "3", "--scan", "--slice", "fixed-s", "--s", "0.5", "--grid", "20", "--t-max", "0.9"]).json();
    assert_eq!(v["slice"]["kind"], json!("fixed_s"));
    assert!(v["skipped"].as_u64().unwrap() > 0);
}

#[test]
fn json_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("w.json");
    let r = hgamma(&["witness", "--m", "1", "--n", "1", "--out", p.to_str().unwrap()]);
    assert!(r.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(v["p_star"], json!("4"));
}
