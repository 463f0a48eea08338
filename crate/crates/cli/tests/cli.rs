//! End-to-end tests of the `sild` binary: exit codes, output formats, and
//! schema conformance of the JSON documents.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sild"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_spec(dir: &Path, name: &str, tau_ps: f64, coupling: f64) -> PathBuf {
    let path = dir.join(name);
    let body = format!(
        r#"
[grid]
start_hz = 1.0e8
stop_hz = 1.1e11
points = 400

[channel]
base_delay_s = 5.0e-11
coupling = {coupling}

[channel.loss]
dc_db = 0.2
skin_db_per_sqrt_hz = 2.0e-6
dielectric_db_per_hz = 1.0e-12

[[skew]]
line = "p"
side = "left"
profile = {{ kind = "flat", tau_s = {tau_s:e} }}
"#,
        tau_s = tau_ps * 1e-12,
    );
    std::fs::write(&path, body).unwrap();
    path
}

fn synth(dir: &Path, spec: &Path, out: &str) -> PathBuf {
    let out_path = dir.join(out);
    let r = run(
        &[
            "synth",
            spec.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ],
        dir,
    );
    assert!(r.status.success(), "synth failed: {r:?}");
    out_path
}

// -------------------------------------------------------------------------
// Minimal structural JSON-schema check: type / required / properties / items.
// -------------------------------------------------------------------------

fn validate(schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    if let Some(ty) = schema.get("type").and_then(|t| t.as_str()) {
        let ok = match ty {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "number" => value.is_number(),
            "integer" => value.is_u64() || value.is_i64(),
            "boolean" => value.is_boolean(),
            other => return Err(format!("{path}: unhandled schema type {other}")),
        };
        if !ok {
            return Err(format!("{path}: expected {ty}, found {value}"));
        }
    }
    if let Some(required) = schema.get("required").and_then(|r| r.as_array()) {
        for key in required {
            let key = key.as_str().unwrap();
            if value.get(key).is_none() {
                return Err(format!("{path}: missing required property {key:?}"));
            }
        }
    }
    if let Some(props) = schema.get("properties").and_then(|p| p.as_object()) {
        for (key, sub) in props {
            if let Some(v) = value.get(key) {
                validate(sub, v, &format!("{path}.{key}"))?;
            }
        }
    }
    if let Some(items) = schema.get("items") {
        if let Some(arr) = value.as_array() {
            for (i, v) in arr.iter().enumerate() {
                validate(items, v, &format!("{path}[{i}]"))?;
            }
        }
    }
    Ok(())
}

fn schema_file(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

// -------------------------------------------------------------------------

#[test]
fn analyze_json_validates_and_zero_skew_reports_zero_fom() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "flat.toml", 0.0, 0.0);
    let s4p = synth(dir.path(), &spec, "flat.s4p");

    let out = run(
        &["analyze", s4p.to_str().unwrap(), "--format", "json"],
        dir.path(),
    );
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    validate(&schema_file("analyze.schema.json"), &doc, "$").unwrap();
    assert_eq!(doc["schema"], "sild-analyze/1");
    assert!(doc["summary"]["fom_2_db"].as_f64().unwrap() < 1e-9);
    assert!(doc["summary"]["max_abs_sild_db"].as_f64().unwrap() < 1e-9);
}

#[test]
fn analyze_csv_header_and_scalar_block_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "skewed.toml", 3.0, 0.0);
    let s4p = synth(dir.path(), &spec, "skewed.s4p");

    let out1 = run(&["analyze", s4p.to_str().unwrap()], dir.path());
    let out2 = run(&["analyze", s4p.to_str().unwrap()], dir.path());
    assert!(out1.status.success());
    assert_eq!(stdout(&out1), stdout(&out2), "output must be deterministic");
    let text = stdout(&out1);
    assert!(text.starts_with(
        "f_hz,t_skew1_s,t_skew2_s,sdd21_db,sdd12_db,s0dd21_db,s0dd12_db,sild1_db,sild2_db,weight\n"
    ));
    assert!(text.contains("# fom_1_db = "));
    assert!(text.contains("# max_abs_sild_direction = "));

    // Reciprocity of the two directional figures, straight from the report.
    let json = run(
        &["analyze", s4p.to_str().unwrap(), "--format", "json"],
        dir.path(),
    );
    let doc: Value = serde_json::from_str(&stdout(&json)).unwrap();
    let fom1 = doc["summary"]["fom_1_db"].as_f64().unwrap();
    let fom2 = doc["summary"]["fom_2_db"].as_f64().unwrap();
    assert!((fom1 - fom2).abs() < 1e-9);
    assert!(fom2 > 0.3, "3 ps of skew should cost real margin: {fom2}");
}

#[test]
fn gates_drive_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "skewed.toml", 3.0, 0.0);
    let s4p = synth(dir.path(), &spec, "skewed.s4p");
    let path = s4p.to_str().unwrap();

    let pass = run(&["analyze", path, "--max-fom", "10"], dir.path());
    assert!(pass.status.success());
    let fail = run(&["analyze", path, "--max-fom", "0.01"], dir.path());
    assert_eq!(fail.status.code(), Some(1));
    let fail2 = run(&["analyze", path, "--max-sild", "0.001"], dir.path());
    assert_eq!(fail2.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = run(&["analyze", "x.s4p", "--definitely-not-a-flag"], dir.path());
    assert_eq!(unknown.status.code(), Some(2));
    let missing = run(&["analyze", "does-not-exist.s4p"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let batch = run(&["batch", empty.to_str().unwrap()], dir.path());
    assert_eq!(batch.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&batch.stderr).into_owned();
    assert!(msg.contains("no inputs matched"), "stderr: {msg}");
}

#[test]
fn every_subcommand_has_help() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["analyze", "batch", "synth", "pulse"] {
        let out = run(&[sub, "--help"], dir.path());
        assert!(out.status.success(), "{sub} --help failed");
        let text = stdout(&out);
        assert!(text.contains("--port-map"), "{sub} help lacks global flags");
    }
}

#[test]
fn sweep_writes_one_file_per_tau() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "base.toml", 0.0, 0.0);
    let out_dir = dir.path().join("sweep");
    std::fs::create_dir(&out_dir).unwrap();
    let r = run(
        &[
            "synth",
            spec.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--sweep",
            "tau=0:0.5:3ps",
        ],
        dir.path(),
    );
    assert!(r.status.success(), "{r:?}");
    let mut names: Vec<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names.len(), 7);
    assert!(names.contains(&"base_tau0ps.s4p".to_string()));
    assert!(names.contains(&"base_tau0p5ps.s4p".to_string()));
    assert!(names.contains(&"base_tau3ps.s4p".to_string()));
}

#[test]
fn batch_over_sweep_reports_monotone_fom_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "base.toml", 0.0, 0.0);
    let out_dir = dir.path().join("fleet");
    std::fs::create_dir(&out_dir).unwrap();
    let r = run(
        &[
            "synth",
            spec.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--sweep",
            "tau=0:0.5:3ps",
        ],
        dir.path(),
    );
    assert!(r.status.success());
    // One corrupt file, policy continue.
    std::fs::write(out_dir.join("corrupt.s4p"), "# GHz S RI R 50\n1 2 3\n").unwrap();

    let records = dir.path().join("records.csv");
    let summary = dir.path().join("summary.json");
    let out = run(
        &[
            "batch",
            out_dir.to_str().unwrap(),
            "--records",
            records.to_str().unwrap(),
            "--summary",
            summary.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");

    let csv = std::fs::read_to_string(&records).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 7, "csv: {csv}");

    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    validate(&schema_file("batch-summary.schema.json"), &doc, "$").unwrap();
    assert_eq!(doc["count"], 8);
    assert_eq!(doc["failures"].as_array().unwrap().len(), 1);
    let fractions = doc["fraction_delta_exceeding"].as_array().unwrap();
    assert!(fractions
        .iter()
        .any(|t| t["threshold_db"].as_f64() == Some(0.025) && t["fraction"].as_f64() == Some(0.0)));

    // FOM is strictly increasing with the injected tau.
    let mut by_tau: Vec<(f64, f64)> = rows
        .iter()
        .map(|row| {
            let mut cols = row.split(',');
            let source = cols.next().unwrap();
            let tag = source
                .rsplit("_tau")
                .next()
                .unwrap()
                .trim_end_matches("ps.s4p")
                .replace('p', ".");
            let fom: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
            (tag.parse::<f64>().unwrap(), fom)
        })
        .collect();
    by_tau.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for w in by_tau.windows(2) {
        assert!(w[1].1 > w[0].1, "fom not increasing: {by_tau:?}");
    }
}

#[test]
fn pulse_modes_expose_direction_asymmetry() {
    let dir = tempfile::tempdir().unwrap();
    // Coupled channel with criss-cross delays: dd responses match across
    // directions, sd responses do not.
    let spec_path = dir.path().join("cc.toml");
    std::fs::write(
        &spec_path,
        r#"
[grid]
start_hz = 1.0e8
stop_hz = 1.1e11
points = 400

[channel]
base_delay_s = 6.0e-11
coupling = 0.012

[channel.loss]
dc_db = 0.2
skin_db_per_sqrt_hz = 2.0e-6
dielectric_db_per_hz = 1.0e-12

[[skew]]
line = "p"
side = "left"
profile = { kind = "flat", tau_s = 1.0e-12 }

[[skew]]
line = "n"
side = "right"
profile = { kind = "flat", tau_s = 1.0e-12 }
"#,
    )
    .unwrap();
    let s4p = synth(dir.path(), &spec_path, "cc.s4p");
    let path = s4p.to_str().unwrap();

    let series = |mode: &str| -> Vec<f64> {
        let out = run(&["pulse", path, "--mode", mode], dir.path());
        assert!(out.status.success(), "pulse {mode}: {out:?}");
        let text = stdout(&out);
        assert!(text.starts_with("time_s,amplitude\n"));
        text.lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect()
    };
    let dd21 = series("dd21");
    let dd12 = series("dd12");
    let sd21 = series("sd21");
    let sd12 = series("sd12");
    let peak = dd21.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let dd_diff = dd21
        .iter()
        .zip(&dd12)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(dd_diff < 1e-9 * peak, "dd mismatch {dd_diff}");
    let sd_peak = sd21.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let sd_diff = sd21
        .iter()
        .zip(&sd12)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(sd_diff > 1e-8 * sd_peak, "sd responses too similar");

    // JSON flavor validates against the shipped schema.
    let out = run(
        &["pulse", path, "--mode", "dd21", "--format", "json"],
        dir.path(),
    );
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    validate(&schema_file("pulse.schema.json"), &doc, "$").unwrap();
    assert_eq!(doc["mode"], "dd21");
}

#[test]
fn flat_and_oscillatory_profiles_have_distinct_signatures() {
    let dir = tempfile::tempdir().unwrap();
    let flat = write_spec(dir.path(), "flat.toml", 1.5, 0.0);
    let osc_path = dir.path().join("osc.toml");
    std::fs::write(
        &osc_path,
        r#"
[grid]
start_hz = 1.0e8
stop_hz = 1.1e11
points = 400

[channel]
base_delay_s = 5.0e-11

[[skew]]
line = "p"
side = "left"
profile = { kind = "damped-oscillatory", tau_peak_s = 1.5e-12, osc_freq_hz = 4.0e10, damping_freq_hz = 8.0e10 }
"#,
    )
    .unwrap();
    let flat_s4p = synth(dir.path(), &flat, "flat.s4p");
    let osc_s4p = synth(dir.path(), &osc_path, "osc.s4p");

    let skew_curve = |p: &Path| -> Vec<f64> {
        let out = run(
            &["analyze", p.to_str().unwrap(), "--format", "json"],
            dir.path(),
        );
        assert!(out.status.success());
        let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
        doc["per_frequency"]["t_skew2_s"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect()
    };
    let flat_skew = skew_curve(&flat_s4p);
    let osc_skew = skew_curve(&osc_s4p);
    let flat_spread = flat_skew.iter().cloned().fold(f64::MIN, f64::max)
        - flat_skew.iter().cloned().fold(f64::MAX, f64::min);
    let osc_spread = osc_skew.iter().cloned().fold(f64::MIN, f64::max)
        - osc_skew.iter().cloned().fold(f64::MAX, f64::min);
    assert!(flat_spread < 1e-15, "flat profile should be flat: {flat_spread}");
    assert!(
        osc_spread > 0.5e-12,
        "oscillatory profile should vary with frequency: {osc_spread}"
    );
}

#[test]
fn analyze_reads_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "flat.toml", 1.0, 0.0);
    let s4p = synth(dir.path(), &spec, "flat.s4p");
    let body = std::fs::read(&s4p).unwrap();

    use std::io::Write;
    use std::process::Stdio;
    let mut child = bin()
        .args(["analyze", "-", "--format", "json"])
        .current_dir(dir.path())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.as_mut().unwrap().write_all(&body).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(doc["source"], "<stdin>");
}

#[test]
fn bad_spec_reports_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.toml");
    std::fs::write(
        &spec,
        "[grid]\nstart_hz = 1.0e8\nstop_hz = 1.1e11\npoints = 100\n\n[channel]\nbase_delay_s = 1.0e-11\ncoupling = 1.5\n",
    )
    .unwrap();
    let out = run(&["synth", spec.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(msg.contains("channel.coupling"), "stderr: {msg}");
}

#[test]
fn port_map_override_changes_skew_sign() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "skewed.toml", 2.0, 0.0);
    let s4p = synth(dir.path(), &spec, "skewed.s4p");
    let path = s4p.to_str().unwrap();

    let report = |map: &str| -> Value {
        let out = run(
            &["analyze", path, "--format", "json", "--port-map", map],
            dir.path(),
        );
        assert!(out.status.success());
        serde_json::from_str(&stdout(&out)).unwrap()
    };
    let normal = report("1,2,3,4");
    let swapped = report("3,4,1,2");
    let t_normal = normal["per_frequency"]["t_skew2_s"][10].as_f64().unwrap();
    let t_swapped = swapped["per_frequency"]["t_skew2_s"][10].as_f64().unwrap();
    assert!((t_normal - 2.0e-12).abs() < 1e-15);
    assert!((t_swapped + 2.0e-12).abs() < 1e-15);
    // The figure of merit is label-independent.
    let f_a = normal["summary"]["fom_2_db"].as_f64().unwrap();
    let f_b = swapped["summary"]["fom_2_db"].as_f64().unwrap();
    assert!((f_a - f_b).abs() < 1e-12);
}
