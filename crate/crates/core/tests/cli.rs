use std::f64::consts::TAU;

use excard::cli::{parse_angles, run, wind_angles, Unit};
use excard::fixtures::load;
use serde_json::Value;

fn ok(args: &[&str]) -> Value {
    let mut argv = vec!["excard"];
    argv.extend_from_slice(args);
    let o = run(argv);
    assert_eq!(o.code, 0, "{args:?}: {}", o.stderr);
    assert!(o.stderr.is_empty());
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["schema"], "1");
    v["result"].clone()
}

fn code(args: &[&str]) -> i32 {
    let mut argv = vec!["excard"];
    argv.extend_from_slice(args);
    run(argv).code
}

#[test]
fn angle_parsing_fixtures() {
    let f = load("cli").unwrap();
    for id in ["parse/356deg", "parse/0deg"] {
        let c = f.case(id);
        let unit = if c.inputs["unit"] == "deg" { Unit::Deg } else { Unit::Rad };
        let v = parse_angles(c.inputs["text"].as_str().unwrap(), unit).unwrap();
        assert!((v[0] - c.expected_f64()).abs() <= c.tolerance, "{id}");
    }
    assert_eq!(wind_angles().len() as f64, f.case("wind/n").expected_f64());
}

#[test]
fn quantile_of_uniform_law() {
    let c = load("cli").unwrap().case("quantile/uniform_median").clone();
    let r = ok(&["quantile", "--alpha", "0.5", "--beta", "1", "--rho", "0", "--mu", "6.283185"]);
    assert!((r["theta"].as_f64().unwrap() - c.expected_f64()).abs() <= c.tolerance);
    let a = ok(&["quantile", "--approx", "--alpha", "0.3", "--beta", "2", "--rho", "0.2", "--mu", "2"]);
    assert!(a["approximation"]["branch"].as_u64().is_some());
}

#[test]
fn sampling_is_reproducible() {
    let args = ["sample", "--n", "5", "--seed", "7", "--beta", "2", "--rho", "0.2", "--mu", "2"];
    assert_eq!(run(std::iter::once("excard").chain(args)), run(std::iter::once("excard").chain(args)));
    assert_eq!(ok(&args)["angles"].as_array().unwrap().len(), 5);
}

#[test]
fn density_grid_and_at_list() {
    let r = ok(&["density", "--beta", "2", "--rho", "0.2", "--mu", "2", "--grid", "8"]);
    let theta = r["theta"].as_array().unwrap();
    assert_eq!(theta.len(), 8);
    assert_eq!(theta[7].as_f64().unwrap(), TAU);
    let r = ok(&["cdf", "--unit", "deg", "--at", "90,180", "--beta", "1", "--rho", "0", "--mu", "1"]);
    let v: Vec<f64> = r["value"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((v[0] - 0.25).abs() < 1e-15 && (v[1] - 0.5).abs() < 1e-15);
}

#[test]
fn floats_round_trip_exactly() {
    let r = ok(&["cdf", "--at", "1.2345678901234567", "--beta", "2.5", "--rho", "0.3", "--mu", "2"]);
    let p = excard::ec::EcParams::new(2.5, 0.3, 2.0).unwrap();
    assert_eq!(r["value"][0].as_f64().unwrap(), p.cdf(1.2345678901234567));
    let m = ok(&["measures", "--beta", "2", "--rho", "0.2", "--mu", "2"]);
    let lib = excard::moments::circular_measures(&excard::ec::EcParams::new(2.0, 0.2, 2.0).unwrap()).unwrap();
    assert_eq!(m["skewness"].as_f64(), lib.skewness);
    assert_eq!(m["variance"].as_f64().unwrap(), lib.variance);
}

#[test]
fn fit_from_inline_data_and_file() {
    let dir = std::env::temp_dir().join(format!("excard-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("wind.txt");
    let lines: Vec<String> = excard::cli::WIND_DEGREES.iter().map(|d| d.to_string()).collect();
    std::fs::write(&path, lines.join("\n")).unwrap();
    let from_file = ok(&["fit", "--unit", "deg", "--data", path.to_str().unwrap(), "--model", "cardioid"]);
    let embedded = ok(&["fit", "--model", "cardioid"]);
    assert_eq!(from_file, embedded);
    let inline = ok(&["fit", "--unit", "deg", "--data", &lines.join(","), "--model", "vonmises"]);
    assert_eq!(inline["n"], 21);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn csv_outputs_have_fixed_headers() {
    let o = run(["excard", "--format", "csv", "gof"]);
    assert_eq!(o.stdout.lines().next().unwrap(), excard::gof::GOF_CSV_HEADER);
    let o = run([
        "excard",
        "modality-table",
        "--format",
        "csv",
        "--betas",
        "1",
        "--rhos",
        "0.2",
        "--mus",
        "2",
        "--grid-n",
        "2048",
    ]);
    assert_eq!(o.stdout.lines().next().unwrap(), excard::modality::MODALITY_CSV_HEADER);
    assert_eq!(o.stdout.lines().count(), 2);
}

#[test]
fn exit_code_contract() {
    assert_eq!(code(&["no-such-command"]), 1);
    assert_eq!(code(&["density", "--beta", "1", "--rho", "0.2", "--mu", "2", "--format", "xml"]), 1);
    assert_eq!(code(&["fit", "--data", "1.0\n2.0\nabc"]), 1);
    assert_eq!(code(&["quantile", "--alpha", "1.5", "--beta", "1", "--rho", "0", "--mu", "1"]), 1);
    assert_eq!(code(&["fit", "--model", "vonmises", "--method", "qlse"]), 1);
    assert_eq!(code(&["moments", "--series", "--beta", "2", "--rho", "0.5", "--mu", "1"]), 2);
    let o = run(["excard", "fit", "--data", "1.0\n2.0\nabc"]);
    let e: Value = serde_json::from_str(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "usage");
    assert!(e["error"]["message"].as_str().unwrap().contains("line 3"));
    assert!(o.stdout.is_empty());
}

#[test]
fn wind_demo_report() {
    let r = ok(&["wind-demo"]);
    assert_eq!(r["n"], 21);
    assert_eq!(r["rows"].as_array().unwrap().len(), 3);
    assert!(r["lrt"]["p_value"].as_f64().unwrap() < 0.01);
}
