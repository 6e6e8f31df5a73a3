//! End-to-end smoke tests of the `stickyq` binary.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stickyq"))
}

fn write_fixture(dir: &std::path::Path) -> PathBuf {
    let path = dir.join("toy.csv");
    let mut csv = String::from("uid,grp,detail,hiv\n");
    for g in 1..=3 {
        for i in 0..16 {
            let id = (g - 1) * 16 + i + 1;
            csv.push_str(&format!("u{id},{g},{id},{}\n", i % 2));
        }
    }
    fs::write(&path, csv).unwrap();
    path
}

fn tempdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stickyq-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn answer_prints_noisy_json_and_is_sticky() {
    let dir = tempdir("answer");
    let csv = write_fixture(&dir);
    let run = || {
        let out = bin()
            .args([
                "answer",
                "--dataset",
                csv.to_str().unwrap(),
                "--secret-column",
                "hiv",
                "--salt",
                "00000000DEADBEEF",
                "--query",
                "SELECT count(*) FROM t WHERE grp = 1",
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    let first = run();
    let parsed: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert!(parsed["value"].is_number());
    assert_eq!(first, run(), "same query and salt must answer identically");
}

#[test]
fn answer_reads_salt_from_the_environment() {
    let dir = tempdir("salt-env");
    let csv = write_fixture(&dir);
    let out = bin()
        .env("STICKYQ_SALT", "0123456789ABCDEF")
        .args([
            "answer",
            "--dataset",
            csv.to_str().unwrap(),
            "--secret-column",
            "hiv",
            "--query",
            "SELECT count(*) FROM t WHERE grp >= 1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn answer_rejects_bad_salt_and_bad_query() {
    let dir = tempdir("bad");
    let csv = write_fixture(&dir);
    let out = bin()
        .args([
            "answer",
            "--dataset",
            csv.to_str().unwrap(),
            "--secret-column",
            "hiv",
            "--salt",
            "xyz",
            "--query",
            "SELECT count(*) FROM t WHERE grp = 1",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());

    let out = bin()
        .args([
            "answer",
            "--dataset",
            csv.to_str().unwrap(),
            "--secret-column",
            "hiv",
            "--salt",
            "00000000DEADBEEF",
            "--query",
            "SELECT count(*) FROM t WHERE a = 1 OR b = 2",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("parse error"), "{err}");
}

#[test]
fn attack_subcommand_reports_verdict_and_truth() {
    let dir = tempdir("attack");
    let csv = write_fixture(&dir);
    let out = bin()
        .args([
            "attack",
            "cloning",
            "--dataset",
            csv.to_str().unwrap(),
            "--salt",
            "00000000DEADBEEF",
            "--victim",
            "u1",
            "--known",
            "grp,detail",
            "--secret",
            "hiv",
            "--delta",
            "10",
            "--sigma-star",
            "0.7",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(parsed["verdict"].is_string());
    assert!(parsed["queries_issued"].as_u64().unwrap() > 0);
    assert!(parsed["truth"].as_u64().unwrap() <= 1);
}

#[test]
fn stats_subcommands_emit_csv() {
    let out = bin()
        .args(["stats", "accuracy", "--k", "2", "--trials", "2000"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("k,mode,accuracy,std_error,trials"), "{text}");

    let out = bin()
        .args([
            "stats", "calibrate", "--delta", "10", "--k", "2", "--qsize", "10", "--trials", "200",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("sigma_star,true_positive_rate,true_negative_rate"));
    assert!(text.lines().count() > 10);
}

#[test]
fn experiment_run_writes_reports_and_enforces_assertions() {
    let dir = tempdir("experiment");
    let config = dir.join("exp.conf");
    fs::write(
        &config,
        "dataset.complete_k = 5,3\n\
         dataset.seed = 3\n\
         attack = cloning\n\
         known_attributes = 3\n\
         users = 10\n\
         salt = 00000000DEADBEEF\n\
         seed = 11\n",
    )
    .unwrap();
    let out_dir = dir.join("reports");
    let out = bin()
        .args([
            "experiment",
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--assert",
            "users>=10",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("summary.json").exists());
    assert!(out_dir.join("users.csv").exists());

    // a violated assertion flips the exit code
    let out = bin()
        .args([
            "experiment",
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--assert",
            "acc_all>=1.5",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn uniqueness_subcommand_reports_rates() {
    let dir = tempdir("uniq");
    let csv = write_fixture(&dir);
    let out = bin()
        .args([
            "uniqueness",
            "--dataset",
            csv.to_str().unwrap(),
            "--secret-column",
            "hiv",
            "--k",
            "1,2",
            "--samples",
            "20",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("k,sampled_users,unique_fraction"), "{text}");
    assert_eq!(text.lines().count(), 3);
}
