use serde_json::Value;
use stabkit_web::{certificate, defect_heatmap, shell_profile};

#[test]
fn profile_of_extremal_cauchy() {
    let json = shell_profile("int:1", "extremal-cauchy:eps=1,x0=1", "cauchy", "-16..16", "2,4", "").unwrap();
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["max_defect"], "5");
    assert_eq!(v["shell_profile"][0]["sup"], "1");
}

#[test]
fn weighted_profile_of_counterexample() {
    let json = shell_profile("binseq", "hyper-counterexample:a={1}", "cauchy", "subsets:5", "1/2,1", "linear").unwrap();
    let v: Value = serde_json::from_str(&json).unwrap();
    assert!(v["shell_profile"].as_array().unwrap().iter().all(|e| e["sup"] == "0"));
}

#[test]
fn heatmap_matches_scan() {
    let json = defect_heatmap("int:1", "extremal-cauchy:eps=1,x0=1", "cauchy", "-3..3").unwrap();
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 7);
    assert_eq!(v["max"], "5");
    // Row and column 4 hold the point 1; (1, 1) is the extremal pair.
    assert_eq!(v["values"][4][4], 5.0);
    assert!(defect_heatmap("int:1", "zero", "cauchy", "-100..100").is_err());
}

#[test]
fn certificate_json() {
    let json = certificate("int:1", "extremal-cauchy:eps=1,x0=1", "cauchy", "5", "1", "1", "1").unwrap();
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["bound"], "5");
    assert!(certificate("binseq", "zero", "jensen", "1", "0", "{1}", "{2}").is_err());
}
