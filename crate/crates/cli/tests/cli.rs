use std::path::Path;
use std::process::{Command, Output};

fn polylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polylab"))
        .args(args)
        .env_remove("POLYLAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const BELL: &str =
    r#"{"n_qubits":2,"amplitudes":[[0.7071067811865476,0],[0,0],[0,0],[0.7071067811865476,0]]}"#;
const HALF: &str = r#"{"labels":[0],"matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#;

#[test]
fn compute_examples() {
    let dir = tempfile::tempdir().unwrap();
    let bell = write(dir.path(), "bell.json", BELL);
    let half = write(dir.path(), "half.json", HALF);

    let out = polylab(&["compute", "concurrence", "--state", &bell]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "1.000000000000");

    let out = polylab(&[
        "compute",
        "unified_entropy",
        "--q",
        "2",
        "--s",
        "1",
        "--state",
        &half,
    ]);
    assert_eq!(stdout(&out).trim(), "0.500000000000");

    let out = polylab(&["compute", "f_qs", "--x", "1", "--q", "1", "--s", "1"]);
    assert_eq!(stdout(&out).trim(), "0.693147180560");
}

#[test]
fn compute_json_carries_mode_bound_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let half = write(dir.path(), "i4.json", &{
        let z = "[0,0]";
        let q = "[0.25,0]";
        let row = |i: usize| {
            (0..4)
                .map(|j| if i == j { q } else { z })
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            r#"{{"labels":[0,1],"matrix":[[{}],[{}],[{}],[{}]]}}"#,
            row(0),
            row(1),
            row(2),
            row(3)
        )
    });
    let json = dir.path().join("coa.json");
    let out = polylab(&[
        "compute",
        "coa",
        "--state",
        &half,
        "--restarts",
        "4",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["mode"], "variational");
    assert_eq!(v["bound"], "lower_estimate");
    assert_eq!(v["manifest"]["config"]["restarts"], 4);
    assert!(v["manifest"]["log_base"]
        .as_str()
        .unwrap()
        .contains("natural"));
}

#[test]
fn exit_codes() {
    assert_eq!(
        polylab(&["verify", "theorem1", "--q", "2", "--s", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(polylab(&["compute", "nonsense"]).status.code(), Some(2));
    assert_eq!(polylab(&["verify"]).status.code(), Some(2));
    assert_eq!(
        polylab(&["compute", "eof", "--state", "/nonexistent/state.json"])
            .status
            .code(),
        Some(3)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{not json");
    assert_eq!(
        polylab(&["compute", "eof", "--state", &bad]).status.code(),
        Some(2)
    );
    assert_eq!(
        polylab(&["scan", "m_surface", "--q-steps", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(polylab(&["--help"]).status.code(), Some(0));
}

#[test]
fn violation_exit_code() {
    // The tangle identity is reported as slack -|residual|; at zero tolerance any
    // rounding residual of the seeded sample counts as a violation.
    let out = polylab(&["verify", "tangle", "--samples", "20", "--tolerance", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let seed = summary["summary"]["witness"]["state_seed"]
        .as_u64()
        .unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).contains(&seed.to_string()));
    assert_eq!(
        polylab(&["verify", "tangle", "--samples", "3", "--tolerance", "-1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_campaign_examples() {
    let out = polylab(&[
        "verify",
        "theorem2",
        "--samples",
        "500",
        "--q",
        "1.5",
        "--s",
        "0.9",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = polylab(&["verify", "tangle", "--samples", "200"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_artifacts_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = polylab(&[
            "verify",
            "theorem1",
            "--samples",
            "20",
            "--seed",
            "3",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let csv = std::fs::read_to_string(&a).unwrap();
    assert_eq!(csv, std::fs::read_to_string(&b).unwrap());
    assert!(csv.starts_with("inequality_id,n_qubits,q,s,mode,state_seed,lhs,rhs,slack\n"));
    assert_eq!(csv.lines().count(), 1 + 20 * 5);
    assert!(dir.path().join("a.csv.manifest.json").exists());
    let mirror: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(mirror["records"].as_array().unwrap().len(), 100);
    assert_eq!(mirror["manifest"]["seed"], 3);
}

#[test]
fn seed_from_environment() {
    let run = |env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_polylab"));
        cmd.args(["verify", "ckw", "--samples", "2"])
            .env_remove("POLYLAB_SEED");
        if let Some(v) = env {
            cmd.env("POLYLAB_SEED", v);
        }
        let out = cmd.output().unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["manifest"]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None), 0);
    assert_eq!(run(Some("42")), 42);
}

#[test]
fn config_file_drives_campaign() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"samples": 4, "n_qubits": 4, "qs_points": [[1.0, 0.5]], "seed": 9}"#,
    );
    let out = polylab(&["verify", "theorem1", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["summary"]["records"], 4);
    assert_eq!(v["manifest"]["seed"], 9);
    let bad = write(dir.path(), "bad.json", r#"{"samples": 4, "unknown": 1}"#);
    assert_eq!(
        polylab(&["verify", "theorem1", "--config", &bad])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn scan_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("m.csv");
    let out = polylab(&[
        "scan",
        "m_surface",
        "--q-lo",
        "1",
        "--q-hi",
        "2",
        "--s-lo",
        "0",
        "--s-hi",
        "1",
        "--q-steps",
        "5",
        "--s-steps",
        "5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("q,s,x,y,value,in_domain"));
    assert_eq!(lines.count(), 25);
    assert!(dir.path().join("m.csv.manifest.json").exists());

    let out = polylab(&[
        "scan",
        "domain_region",
        "--q-lo",
        "1",
        "--q-hi",
        "2",
        "--q-steps",
        "3",
        "--s-lo",
        "0",
        "--s-hi",
        "1",
        "--s-steps",
        "5",
        "--samples",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout(&out);
    let row = body.lines().find(|l| l.starts_with("1.5,0.75,")).unwrap();
    assert!(row.ends_with(",true"));
}
