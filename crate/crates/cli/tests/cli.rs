use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_virial-bounds")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn report(args: &[&str]) -> Value {
    let o = bin(args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn schema() -> jsonschema::Validator {
    let text = include_str!("../schema/report.schema.json");
    jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
}

#[test]
fn reports_validate_against_schema() {
    let v = schema();
    for args in [
        &["run", "--preset", "lj-reference"][..],
        &["run", "--preset", "hard-sphere", "--oracle"],
        &["run", "--preset", "square-well", "--format", "json"],
    ] {
        let r = report(args);
        let errors: Vec<String> = v.iter_errors(&r).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
}

#[test]
fn lj_preset_values() {
    let r = report(&["run", "--preset", "lj-reference"]);
    let res = &r["results"][0];
    let c = &res["constants"];
    assert!((c["C_tilde"]["value"].as_f64().unwrap() - 9.1864).abs() < 0.005);
    assert!(c["C_breve"]["total"]["value"].as_f64().unwrap() <= 7.2);
    assert_eq!(res["certificate"]["alpha"].as_f64(), Some(0.6397));
    let scale = 14.331f64.exp();
    let bas = res["virial"]["basuev"].as_f64().unwrap() * scale;
    assert!(bas >= 1.0 / 29.8, "{bas}");
    assert_eq!(res["virial"]["best"], res["virial"]["basuev"]);
    let refs = r["references"].as_array().unwrap();
    assert_eq!(refs.len(), 5);
    assert!(refs.iter().all(|x| x["ok"] == Value::Bool(true)), "{refs:?}");
}

#[test]
fn hard_sphere_virial_bounds_collapse() {
    let r = report(&["run", "--preset", "hard-sphere", "--beta", "1"]);
    let v = &r["results"][0]["virial"];
    let expected = 0.144767 / (4.0 * PI / 3.0);
    for key in ["lebowitz-penrose", "stable-variant", "stab"] {
        let x = v[key].as_f64().unwrap();
        assert!((x - expected).abs() < 1e-6 * expected, "{key}: {x}");
    }
}

#[test]
fn empty_beta_grid_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[potential]\nname = \"lj\"\n[run]\nbeta = []\n");
    let o = bin(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("empty beta grid"));
}

#[test]
fn single_beta_sweep_exits_one() {
    let o = bin(&["sweep", "--preset", "lj-reference", "--beta", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
}

#[test]
fn sweep_without_alpha_leaves_basuev_columns_empty() {
    let o = bin(&["sweep", "--preset", "square-well"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut rd = csv::Reader::from_reader(o.stdout.as_slice());
    let header = rd.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<_> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        for name in ["C_breve", "F_breve", "R_Ba", "R_Bas"] {
            assert_eq!(&row[col(name)], "", "{name}");
        }
        assert!(!row[col("R_stab")].is_empty());
    }
}

#[test]
fn lj_sweep_has_one_row_per_beta() {
    let o = bin(&["sweep", "--preset", "lj-reference", "--beta", "0.5,1,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut rd = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(rd.headers().unwrap().len(), 14);
    let rows: Vec<_> = rd.records().map(Result::unwrap).collect();
    let betas: Vec<&str> = rows.iter().map(|r| &r[0]).collect();
    assert_eq!(betas, ["0.5", "1", "2"]);
    assert!(rows.iter().all(|r| r.iter().all(|x| !x.is_empty())));
}

#[test]
fn output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("r{i}.json"));
        let o = bin(&["run", "--preset", "lj-reference", "--beta", "0.7,1.3", "--oracle", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        outputs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn failing_certificate_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[potential]\nname = \"lj\"\n[run]\nmu_bound = \"lj\"\nalpha = { policy = \"fixed\", value = 0.6398 }\n",
    );
    let o = bin(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("alpha = 0.6398"), "{}", stderr(&o));
}

#[test]
fn wrong_stability_data_exits_two() {
    // b_upper far too small: the coefficient bounds become false.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[potential]\nname = \"lj\"\n[stability]\nb_lower = 0.1\nb_upper = 0.1\nbbar_upper = 0.1\nb_star = 0.01\n[run]\nbeta = [3.0]\nsamples = 0\n",
    );
    let o = bin(&["run", "--config", &cfg, "--oracle"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn alpha_search_picks_largest_admissible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[potential]\nname = \"lj\"\n[run]\nmu_bound = \"lj\"\nalpha = { policy = \"search\", lo = 0.6, hi = 0.6397 }\n",
    );
    let r = report(&["run", "--config", &cfg]);
    let alpha = r["results"][0]["certificate"]["alpha"].as_f64().unwrap();
    assert!((alpha - 0.6397).abs() < 1e-9, "{alpha}");
}

#[test]
fn expression_potential_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[potential]
name = "lj-by-expression"
tail_exponent = 6

[[potential.pieces]]
expr = "r^-12 - 2*r^-6"

[stability]
b_lower = 8.61
b_upper = 14.316
bbar_upper = 14.331
"#,
    );
    let by_expr = report(&["run", "--config", &cfg]);
    let by_name = report(&["run", "--preset", "lj-reference"]);
    assert_eq!(
        by_expr["results"][0]["constants"]["C_tilde"]["value"],
        by_name["results"][0]["constants"]["C_tilde"]["value"]
    );
}
