use std::io::Write;
use std::process::{Command, Stdio};

fn relunet() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_relunet"));
    c.env_remove("RELUNET_SEED");
    c
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("relunet-cli-{}-{name}", std::process::id()))
}

#[test]
fn build_inspect_eval() {
    let path = tmp("net.json");
    let st = relunet()
        .args(["build", "-t", "abs_pi", "-N", "2", "-L", "1", "-o"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(st.success());

    let out = relunet().arg("inspect").arg(&path).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["metadata"]["K"], 4);
    assert_eq!(v["input_dim"], 1);
    let net = relunet::network::deserialize(&std::fs::read_to_string(&path).unwrap())
        .unwrap()
        .network;
    assert_eq!(v["stats"], serde_json::to_value(net.stats()).unwrap());

    let mut child = relunet()
        .arg("eval")
        .arg(&path)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"0.0\n# comment\n0.5\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    let lines: Vec<f64> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], net.eval1(&[0.0]));
    assert_eq!(lines[1], net.eval1(&[0.5]));
    let _ = std::fs::remove_file(&path);
}

#[test]
fn seed_flag_beats_environment() {
    let meta = |args: &[&str], env: Option<&str>| {
        let mut c = relunet();
        c.args(["build", "-t", "bump", "-d", "2", "-N", "4", "-L", "1"])
            .args(args);
        if let Some(s) = env {
            c.env("RELUNET_SEED", s);
        }
        let out = c.output().unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["metadata"]["seed"].as_u64().unwrap()
    };
    assert_eq!(meta(&[], None), relunet::harness::DEFAULT_SEED);
    assert_eq!(meta(&[], Some("11")), 11);
    assert_eq!(meta(&["--seed", "12"], Some("11")), 12);
}

#[test]
fn verify_and_sweep() {
    let st = relunet()
        .args([
            "verify",
            "-t",
            "sin_osc",
            "-N",
            "2",
            "-L",
            "1",
            "--samples",
            "1000",
            "--lp-samples",
            "1000",
        ])
        .output()
        .unwrap();
    assert!(st.status.success());
    assert!(String::from_utf8_lossy(&st.stdout).contains("PASS"));

    let out = relunet()
        .args([
            "sweep",
            "--targets",
            "constant,affine",
            "-N",
            "1,2",
            "-L",
            "1",
            "--samples",
            "500",
            "--lp-samples",
            "500",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        relunet::harness::CSV_COLUMNS.join(",")
    );
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn errors_exit_nonzero() {
    let out = relunet()
        .args(["build", "-t", "nope", "-N", "1", "-L", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown target"));
    let path = tmp("bad.json");
    std::fs::write(&path, "{\"format_version\": 1").unwrap();
    let out = relunet().arg("inspect").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_file(&path);
}

#[test]
fn catalog_lists_targets() {
    let out = relunet().args(["catalog", "-d", "3"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for name in relunet::harness::CATALOG_NAMES {
        assert!(text.contains(name));
    }
}
