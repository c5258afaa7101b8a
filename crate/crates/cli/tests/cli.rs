use std::path::Path;
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn isotypy(args: &[&str]) -> Run {
    isotypy_env(args, &[])
}

fn isotypy_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_isotypy"));
    cmd.args(args).env_remove("ISOTYPY_LOG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(r: &Run) -> Value {
    serde_json::from_str(&r.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: [&str; 8] = ["--p", "3", "--n", "1", "--m", "1", "--l", "2"];

fn with(head: &[&str], tail: &[&str]) -> Vec<String> {
    head.iter().chain(tail).map(|s| s.to_string()).collect()
}

fn run_owned(args: &[String]) -> Run {
    isotypy(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn model_lists_the_block() {
    let r = run_owned(&with(&["model"], &SMALL));
    assert_eq!(r.code, 0);
    let v = json(&r);
    let degrees: Vec<u64> = v["characters"].as_array().unwrap().iter().map(|c| c["degree"].as_u64().unwrap()).collect();
    // p^n + p^m - 1 characters of degree l, (p^n - 1)(p^m - 1)/l^2 of degree l^2
    assert_eq!(degrees, [2, 2, 2, 2, 2, 4]);
    assert_eq!(v["order"], 72);
    let classes = v["classes"].as_array().unwrap();
    let sizes: u64 = classes.iter().map(|c| c["size"].as_u64().unwrap()).sum();
    assert_eq!(sizes, 72);
    for c in v["characters"].as_array().unwrap() {
        assert_eq!(c["values"][0].as_str().unwrap(), c["degree"].to_string());
        assert_eq!(c["values"].as_array().unwrap().len(), classes.len());
    }
}

#[test]
fn model_formats_agree_on_degrees() {
    let j = json(&run_owned(&with(&["model"], &SMALL)));
    let t = run_owned(&with(&["model", "--format", "table"], &SMALL));
    assert_eq!(t.code, 0);
    let from_json: Vec<(String, u64)> = j["characters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["label"].as_str().unwrap().to_string(), c["degree"].as_u64().unwrap()))
        .collect();
    let from_table: Vec<(String, u64)> = t
        .stdout
        .lines()
        .filter(|l| l.starts_with("chi["))
        .map(|l| {
            let mut w = l.split_whitespace();
            (w.next().unwrap().to_string(), w.next().unwrap().parse().unwrap())
        })
        .collect();
    assert_eq!(from_json, from_table);
}

#[test]
fn invalid_l_is_a_usage_error() {
    let r = isotypy(&["model", "--p", "3", "--n", "1", "--m", "1", "--l", "4"]);
    assert_eq!(r.code, 2);
    let v = json(&r);
    assert_eq!(v["status"], "error");
    assert!(v["error"]["message"].as_str().unwrap().contains("does not divide p - 1"));
}

#[test]
fn counts_match() {
    let r = run_owned(&with(&["counts"], &SMALL));
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.trim(), "(3,1,1,2) enumerated (5,1) formula (5,1) squares 36/36 MATCH");
    let r = isotypy(&["counts", "--p", "3", "--n", "1", "--m", "1", "--l", "1"]);
    assert_eq!(r.code, 2);
}

#[test]
fn counts_sweep() {
    let r = isotypy(&["counts", "--sweep", "--format", "json"]);
    assert_eq!(r.code, 0);
    let rows = json(&r);
    let rows = rows.as_array().unwrap();
    let mut expected = 0;
    for p in [3u64, 5, 7] {
        expected += 3 * (2..p).filter(|l| (p - 1) % l == 0).count();
    }
    assert_eq!(rows.len(), expected);
    for row in rows {
        assert_eq!(row["status"], "MATCH");
        let (p, n, m, l) = (
            row["model"]["p"].as_u64().unwrap(),
            row["model"]["n"].as_u64().unwrap() as u32,
            row["model"]["m"].as_u64().unwrap() as u32,
            row["model"]["l"].as_u64().unwrap(),
        );
        let (q1, q2) = (p.pow(n), p.pow(m));
        assert_eq!(row["enumerated"][0].as_u64().unwrap(), q1 + q2 - 1);
        assert_eq!(row["enumerated"][1].as_u64().unwrap() * l * l, (q1 - 1) * (q2 - 1));
    }
}

#[test]
fn decompose_diagonal_is_echoed() {
    let r = isotypy(&["decompose", "--p", "3", "--n", "1", "--m", "1", "--gen", "2,0,0,1", "--gen", "1,0,0,2"]);
    assert_eq!(r.code, 0);
    let v = json(&r);
    assert_eq!(v["p1"], serde_json::json!([[1, 0]]));
    assert_eq!(v["p2"], serde_json::json!([[0, 1]]));
    assert_eq!(v["f1"], serde_json::json!([[[2, 0], [0, 1]]]));
    assert_eq!(v["f2"], serde_json::json!([[[1, 0], [0, 2]]]));
    assert_eq!(v["validator"], "PASS");
}

fn mat_mul(a: [[u64; 2]; 2], b: [[u64; 2]; 2], q: u64) -> [[u64; 2]; 2] {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = (a[i][0] * b[0][j] + a[i][1] * b[1][j]) % q;
        }
    }
    c
}

#[test]
fn decompose_conjugated_action() {
    // g = [[1,1],[0,1]] on C_5 x C_5, g^-1 = [[1,4],[0,1]]
    let (g, gi) = ([[1, 1], [0, 1]], [[1, 4], [0, 1]]);
    let gens: Vec<String> = [[[2, 0], [0, 1]], [[1, 0], [0, 2]]]
        .iter()
        .map(|&d| {
            let c = mat_mul(mat_mul(g, d, 5), gi, 5);
            format!("{},{},{},{}", c[0][0], c[0][1], c[1][0], c[1][1])
        })
        .collect();
    let r = isotypy(&["decompose", "--p", "5", "--n", "1", "--m", "1", "--gen", &gens[0], "--gen", &gens[1]]);
    assert_eq!(r.code, 0);
    let v = json(&r);
    assert_eq!(v["validator"], "PASS");
    // the stable lines are g(1,0) = (1,0) and g(0,1) = (1,1)
    let gen = |k: &str| (v[k][0][0].as_u64().unwrap(), v[k][0][1].as_u64().unwrap());
    let on = |(a, b): (u64, u64), (x, y): (u64, u64)| (a * y) % 5 == (b * x) % 5 && (a, b) != (0, 0);
    let (g1, g2) = (gen("p1"), gen("p2"));
    assert!((on(g1, (1, 0)) && on(g2, (1, 1))) || (on(g1, (1, 1)) && on(g2, (1, 0))));
}

#[test]
fn decompose_rejects_p_actions() {
    let r = isotypy(&["decompose", "--p", "3", "--n", "1", "--m", "1", "--gen", "1,1,0,1"]);
    assert_eq!(r.code, 1);
    assert_eq!(json(&r)["error"]["kind"], "OrderDivisibleByP");
}

#[test]
fn selftest_completes() {
    let r = run_owned(&with(&["selftest"], &SMALL));
    assert_eq!(r.code, 0);
    assert!(r.stdout.lines().any(|l| l == "COMPLETE, all Γ = id"), "{}", r.stdout);
    let r = run_owned(&with(&["selftest", "--format", "json", "--seed", "3", "--scrambles", "5"], &["--p", "3", "--n", "1", "--m", "2", "--l", "2"]));
    assert_eq!(r.code, 0);
    let v = json(&r);
    assert_eq!(v["status"], "COMPLETE");
    assert_eq!(v["all_identity"], true);
    assert_eq!(v["subgroups"], 10);
    assert_eq!(v["scrambles"]["attempted"], v["scrambles"]["extended"]);
}

fn apply(matrix: &Value, v: &[i64]) -> Vec<i64> {
    matrix.as_array().unwrap().iter().map(|row| row.as_array().unwrap().iter().zip(v).map(|(a, b)| a.as_i64().unwrap() * b).sum()).collect()
}

fn column(rows: &Value) -> Vec<Vec<i64>> {
    rows.as_array().unwrap().iter().map(|r| r.as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect()).collect()
}

#[test]
fn scrambled_problems_extend_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    for (args, case) in [
        (with(&SMALL, &["--seed", "11"]), "Case2"),
        (with(&SMALL, &["--q", "1,1", "--seed", "12"]), "Case1"),
        (with(&SMALL, &["--q", "0,1", "--seed", "13"]), "Case31"),
        (with(&["--p", "3", "--n", "1", "--m", "2", "--l", "2"], &["--q", "0,3", "--seed", "14"]), "Case32"),
    ] {
        let pb = run_owned(&with(&["problem"], &args.iter().map(String::as_str).collect::<Vec<_>>()));
        assert_eq!(pb.code, 0);
        let path = write(dir.path(), &format!("{case}.json"), &pb.stdout);
        let r = isotypy(&["extend", &path]);
        assert_eq!(r.code, 0, "{}", r.stdout);
        let res = json(&r);
        assert_eq!(res["case"], case);
        assert_eq!(res["report"]["case"], case);
        let problem: Value = serde_json::from_str(&pb.stdout).unwrap();
        for (b, img) in column(&problem["basis"]).iter().zip(column(&problem["delta_zero_matrix"])) {
            assert_eq!(apply(&res["matrix"], b), img);
        }
        let out = write(dir.path(), &format!("{case}.result.json"), &r.stdout);
        assert_eq!(isotypy(&["verify", &out]).code, 0);
    }
}

#[test]
fn case2_report_records_signs() {
    let dir = tempfile::tempdir().unwrap();
    let pb = run_owned(&with(&["problem"], &with(&SMALL, &["--seed", "4"]).iter().map(String::as_str).collect::<Vec<_>>()));
    let path = write(dir.path(), "p.json", &pb.stdout);
    let res = json(&isotypy(&["extend", &path]));
    let report = &res["report"];
    assert_eq!(report["a_before_strictness"], serde_json::json!([0, 1]));
    assert_eq!(report["a_after_strictness"], serde_json::json!([0]));
    assert_eq!(report["delta1"], report["delta2"]);
    let d = report["delta1"].as_i64().unwrap();
    assert!(res["signs"].as_array().unwrap().iter().all(|s| s.as_i64() == Some(d)));
}

#[test]
fn malformed_and_rejected_problems() {
    let dir = tempfile::tempdir().unwrap();
    let r = isotypy(&["extend", &write(dir.path(), "bad.json", "{\"model\": ")]);
    assert_eq!(r.code, 2);
    assert_eq!(json(&r)["error"]["kind"], "malformed_json");
    let r = isotypy(&["extend", &write(dir.path(), "extra.json", "{\"model\": {\"p\": 3, \"n\": 1, \"m\": 1, \"l\": 2}, \"q\": [], \"gside\": {\"labels\": [], \"e_action\": []}, \"delta_zero_matrix\": [], \"x\": 1}")]);
    assert_eq!(r.code, 2);

    let pb = run_owned(&with(&["problem"], &SMALL));
    let mut v: Value = serde_json::from_str(&pb.stdout).unwrap();
    for x in v["delta_zero_matrix"][0].as_array_mut().unwrap() {
        *x = Value::from(x.as_i64().unwrap() * 2);
    }
    let r = isotypy(&["extend", &write(dir.path(), "scaled.json", &v.to_string())]);
    assert_eq!(r.code, 1);
    let res = json(&r);
    assert_eq!(res["status"], "failed");
    assert_eq!(res["error"]["kind"], "NotIsometric");
}

#[test]
fn verify_checks_isometry_and_stability() {
    let dir = tempfile::tempdir().unwrap();
    let swap = r#"{"elements": ["1", "s"], "perms": [[0, 1, 2], [1, 0, 2]]}"#;
    let good = format!(r#"{{"domain": ["a", "b", "c"], "codomain": ["x", "y", "z"], "matrix": [[0, -1, 0], [-1, 0, 0], [0, 0, 1]], "domain_action": {swap}, "codomain_action": {swap}}}"#);
    let r = isotypy(&["verify", &write(dir.path(), "good.json", &good)]);
    assert_eq!(r.code, 0);
    assert_eq!(json(&r)["checks"], serde_json::json!(["isometry", "stability"]));

    let unstable = good.replace("[[0, -1, 0], [-1, 0, 0], [0, 0, 1]]", "[[1, 0, 0], [0, -1, 0], [0, 0, 1]]");
    let r = isotypy(&["verify", &write(dir.path(), "unstable.json", &unstable)]);
    assert_eq!(r.code, 1);
    assert_eq!(json(&r)["error"]["kind"], "Stability");

    let r = isotypy(&["verify", &write(dir.path(), "gram.json", r#"{"domain": ["a", "b"], "codomain": ["x", "y"], "matrix": [[1, 1], [0, 1]]}"#)]);
    assert_eq!(r.code, 1);
    assert_eq!(json(&r)["error"]["kind"], "Gram");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(isotypy(&["model", "--p", "3"]).code, 2);
    assert_eq!(isotypy(&["frobnicate"]).code, 2);
    assert_eq!(isotypy(&["problem", "--p", "3", "--n", "1", "--m", "1", "--l", "2", "--q", "5,0"]).code, 2);
}

#[test]
fn output_is_byte_stable() {
    let sel = with(&["selftest", "--format", "json", "--seed", "9", "--scrambles", "3"], &SMALL);
    assert_eq!(run_owned(&sel).stdout, run_owned(&sel).stdout);
    let pb = with(&["problem", "--q", "0,3", "--seed", "21"], &["--p", "3", "--n", "1", "--m", "2", "--l", "2"]);
    assert_eq!(run_owned(&pb).stdout, run_owned(&pb).stdout);
    let m = with(&["model"], &SMALL);
    assert_eq!(run_owned(&m).stdout, run_owned(&m).stdout);
}

#[test]
fn logging_goes_to_stderr() {
    let args: Vec<&str> = ["selftest"].into_iter().chain(SMALL).collect();
    let quiet = isotypy(&args);
    let loud = isotypy_env(&args, &[("ISOTYPY_LOG", "debug")]);
    assert_eq!(quiet.stdout, loud.stdout);
    assert!(quiet.stderr.is_empty());
    assert!(loud.stderr.contains("installed"));
}
