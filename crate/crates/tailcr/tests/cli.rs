use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use approx::assert_relative_eq;
use tailcr::report::ReportFile;

fn tailcr(args: &[&str]) -> Output {
    tailcr_env(args, &[])
}

fn tailcr_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tailcr"));
    cmd.args(args)
        .env_remove("TAILCR_SEED")
        .env("SOURCE_DATE_EPOCH", "1700000000");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const HAND: &str = "z,delta,cause\n1,1,1\n2,0,\n3,1,2\n4,1,1\n";

/// Eighteen values up to 10 and two above it whose log-excesses over 10
/// average 0.5, so the top-2 fit has threshold 10, tail mass 0.1, gamma 0.5.
fn crafted() -> String {
    let mut s = String::from("z,delta,cause\n");
    for i in 1..=17 {
        s.push_str(&format!("{},1,1\n", 0.5 * i as f64));
    }
    s.push_str("10,1,1\n");
    s.push_str(&format!("{},1,1\n", 10.0 * 0.3f64.exp()));
    s.push_str(&format!("{},1,1\n", 10.0 * 0.7f64.exp()));
    s
}

fn json(o: &Output) -> serde_json::Value {
    assert_eq!(code(o), 0, "{}", stderr(o));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn fit_prints_hand_example() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "hand.csv", HAND);
    let out = tailcr(&["fit", data.to_str().unwrap(), "--cause", "1", "--kn", "3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let field = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(key)).unwrap();
        line.split_whitespace().last().unwrap().parse().unwrap()
    };
    assert_relative_eq!(field("gamma_hat"), 4f64.ln(), epsilon = 1e-15);
    assert_relative_eq!(field("v_n_hat"), 1.5, epsilon = 1e-15);
    assert!(text.contains("unavailable (strong-censoring"));

    let v = json(&tailcr(&[
        "fit",
        data.to_str().unwrap(),
        "--kn",
        "3",
        "--gamma-c",
        "5",
        "--c",
        "1",
        "--json",
    ]));
    assert_relative_eq!(v["gamma_hat"].as_f64().unwrap(), 4f64.ln(), epsilon = 1e-15);
    assert_eq!(v["n_exceed_cause"], 1);
    assert_eq!(v["n_exceed_total"], 3);
    assert!(v["interval"]["upper"].as_f64().unwrap() > 4f64.ln());
}

#[test]
fn fit_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "hand.csv", HAND);
    let d = data.to_str().unwrap();

    let bad = write(dir.path(), "bad.csv", "z,delta,cause\n1,1,1\n2,1,\n");
    let out = tailcr(&["fit", bad.to_str().unwrap(), "--kn", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let out = tailcr(&["fit", d, "--kn", "4"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("domain"));

    assert_eq!(code(&tailcr(&["fit", d])), 2);
    assert_eq!(
        code(&tailcr(&["fit", d, "--kn", "2", "--threshold", "1.5"])),
        2
    );
    assert_eq!(
        code(&tailcr(&["fit", "/nonexistent/x.csv", "--kn", "2"])),
        2
    );

    let out = tailcr(&["fit", d, "--threshold", "4"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("no-exceedance"));
    assert_eq!(
        code(&tailcr(&["fit", d, "--threshold", "1.5", "--cause", "2"])),
        0
    );
    assert_eq!(code(&tailcr(&["fit", d, "--kn", "3", "--cause", "3"])), 3);
    assert_eq!(code(&tailcr(&["fit", d, "--kn", "3", "--level", "1"])), 2);
    assert_eq!(code(&tailcr(&["fit", d, "--kn", "3", "--rho", "-0.5"])), 0);
}

#[test]
fn quantile_worked_case() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "crafted.csv", &crafted());
    let d = data.to_str().unwrap();
    let v = json(&tailcr(&[
        "quantile", d, "--kn", "2", "--p", "0.001", "--json",
    ]));
    assert_eq!(v["threshold"].as_f64().unwrap(), 10.0);
    assert_relative_eq!(v["tail_mass"].as_f64().unwrap(), 0.1, epsilon = 1e-15);
    assert_relative_eq!(v["gamma_hat"].as_f64().unwrap(), 0.5, epsilon = 1e-15);
    assert_relative_eq!(v["quantile"].as_f64().unwrap(), 100.0, max_relative = 1e-13);

    let v = json(&tailcr(&[
        "quantile", d, "--kn", "2", "--p", "0.05", "--json",
    ]));
    let q = v["quantile"].as_f64().unwrap();
    assert!(q.is_finite() && q > 10.0);

    assert_eq!(code(&tailcr(&["quantile", d, "--kn", "2", "--p", "0"])), 2);
    assert_eq!(code(&tailcr(&["quantile", d, "--kn", "2", "--p", "1"])), 2);
    let out = tailcr(&["quantile", d, "--kn", "2", "--p", "0.1"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("extrapolation-order"));
}

fn smoke_config(dir: &Path) -> PathBuf {
    let out = tailcr(&["presets", "frechet-cfg1-c07"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out)
        .replace("\"n_rep\": 2000", "\"n_rep\": 1")
        .replace("\"name\": \"frechet-cfg1-c07\"", "\"name\": \"smoke\"");
    write(dir, "smoke.json", &text)
}

#[test]
fn simulate_smoke_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = smoke_config(dir.path());
    let out_path = dir.path().join("report.csv");
    let out = tailcr(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&out_path).unwrap();
    let parsed = ReportFile::parse(&text).unwrap();
    assert_eq!(parsed.report.rows.len(), 48 * 3);
    assert_eq!(parsed.report.n_rep, 1);
    assert_eq!(parsed.manifest.scenario, "smoke");
    assert_eq!(parsed.manifest.master_seed, 20_150_611);
    assert_eq!(parsed.manifest.timestamp, "2023-11-14T22:13:20Z");
    assert_eq!(parsed.render(), text);
    assert!(text.starts_with("kn,estimator,median_bias,mse,mean,sd,failures\n10,aj,"));
    assert!(text.lines().filter(|l| l.starts_with('#')).count() >= 4);
}

#[test]
fn simulate_rejects_bad_config_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = smoke_config(dir.path());
    let text = fs::read_to_string(&cfg)
        .unwrap()
        .replace("\"n\": 500", "\"n\": 0");
    let bad = write(dir.path(), "bad.json", &text);
    let out_path = dir.path().join("report.csv");
    let out = tailcr(&[
        "simulate",
        "--config",
        bad.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!out_path.exists());
    let out = tailcr(&[
        "simulate",
        "--preset",
        "nope",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let junk = write(dir.path(), "junk.json", "{\"name\": 3}");
    let out = tailcr(&[
        "simulate",
        "--config",
        junk.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 3);
}

#[test]
fn seed_override_and_locale() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, env: &[(&str, &str)]| {
        let p = dir.path().join(name);
        let out = tailcr_env(
            &[
                "simulate",
                "--preset",
                "burr-cfg2-c05",
                "--reps",
                "3",
                "--out",
                p.to_str().unwrap(),
            ],
            env,
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        fs::read_to_string(p).unwrap()
    };
    let base = run("a.csv", &[]);
    let german = run(
        "b.csv",
        &[("LC_ALL", "de_DE.UTF-8"), ("LANG", "de_DE.UTF-8")],
    );
    assert_eq!(base, german);
    assert!(!base.lines().any(|l| !l.starts_with('#') && l.contains(';')));
    let seeded = run("c.csv", &[("TAILCR_SEED", "7")]);
    assert_ne!(base, seeded);
    assert!(seeded.contains("# master_seed: 7\n"));
    let out = tailcr_env(
        &[
            "simulate",
            "--preset",
            "burr-cfg2-c05",
            "--reps",
            "1",
            "--out",
            "x.csv",
        ],
        &[("TAILCR_SEED", "abc")],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn preset_json_matches_preset_run() {
    let dir = tempfile::tempdir().unwrap();
    let listing = stdout(&tailcr(&["presets"]));
    assert_eq!(listing.lines().count(), 24);
    let json = stdout(&tailcr(&["presets", "burr-cfg3-c09"]));
    let cfg = write(dir.path(), "c.json", &json);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = ["--reps", "2", "--workers", "2"];
    let run = |src: &[&str], out: &Path| {
        let mut v = vec!["simulate"];
        v.extend_from_slice(src);
        v.extend_from_slice(&args);
        v.extend_from_slice(&["--out", out.to_str().unwrap()]);
        assert_eq!(code(&tailcr(&v)), 0);
    };
    run(&["--preset", "burr-cfg3-c09"], &a);
    run(&["--config", cfg.to_str().unwrap()], &b);
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}
