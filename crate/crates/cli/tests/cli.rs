use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nonat::report::strip_timestamp;
use serde_json::Value;

fn nonat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn with_cache<'a>(args: &[&'a str], dir: &'a Path) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend(["--cache-dir", dir.to_str().unwrap()]);
    v
}

#[test]
fn legendre_cache_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = nonat(&with_cache(&["certify", "--primes", "5,7"], dir.path()));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        fs::read_to_string(dir.path().join("legendre/5.txt")).unwrap(),
        "+1\n+1\n-1\n-1\n+1\n"
    );
    assert_eq!(
        fs::read_to_string(dir.path().join("legendre/7.txt")).unwrap(),
        "+1\n+1\n+1\n-1\n+1\n-1\n-1\n"
    );
}

#[test]
fn cold_and_warm_cache_reports_match() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["coeffs", "--primes", "5,7", "--elements", "level:2"][..],
        &["certify", "--theorem", "2"][..],
        &["names", "--primes", "5,7", "--level", "2"][..],
    ] {
        let cold = nonat(&with_cache(args, dir.path()));
        let warm = nonat(&with_cache(args, dir.path()));
        let plain = nonat(args);
        assert!(cold.status.success(), "{}", String::from_utf8_lossy(&cold.stderr));
        let strip = |o: &Output| strip_timestamp(&String::from_utf8(o.stdout.clone()).unwrap());
        assert_eq!(strip(&cold), strip(&warm));
        assert_eq!(strip(&cold), strip(&plain));
    }
    let coeffs: Vec<_> = fs::read_dir(dir.path().join("coeffs")).unwrap().collect();
    assert_eq!(coeffs.len(), 1);
    let text = fs::read_to_string(coeffs[0].as_ref().unwrap().path()).unwrap();
    assert_eq!(text.lines().count(), 35);
    assert_eq!(text.lines().next(), Some("- -> 1/1"));
    assert!(text.contains("\n0:1 -> 1/5\n"));
}

#[test]
fn malformed_primes_fail_without_cache_writes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    for primes in ["5,x", "5,9", "7,5", "", "theorem:"] {
        let out = nonat(&with_cache(&["certify", "--primes", primes], &cache));
        assert_eq!(out.status.code(), Some(64), "primes {primes:?}");
        assert!(out.stdout.is_empty());
        assert!(String::from_utf8_lossy(&out.stderr).contains("invalid"));
        assert!(!cache.exists());
    }
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(nonat(&["bogus"]).status.code(), Some(64));
    assert_eq!(nonat(&["certify", "--tolerance-numeric", "0"]).status.code(), Some(64));
    assert_eq!(
        nonat(&["names", "--primes", "5,7", "--level", "3"]).status.code(),
        Some(64)
    );
    assert_eq!(
        nonat(&["coeffs", "--primes", "5,7", "--elements", "5,0"]).status.code(),
        Some(64)
    );
    assert_eq!(nonat(&["certify", "--help"]).status.code(), Some(0));
    let refused = nonat(&["names", "--primes", "5,7,11", "--level", "3", "--budget", "100"]);
    assert_eq!(refused.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&refused.stderr).contains("--budget 770"));
}

#[test]
fn exit_codes_follow_verdicts() {
    let certified = nonat(&["certify", "--theorem", "3"]);
    assert_eq!(certified.status.code(), Some(0));
    assert_eq!(json(&certified)["verdict"], "non-AT certified");
    let inconclusive = nonat(&["certify", "--primes", "5,7,11"]);
    assert_eq!(inconclusive.status.code(), Some(1));
    assert_eq!(json(&inconclusive)["results"]["certificate"]["status"], "inconclusive");
    let explicit = nonat(&["certify", "--primes", "5,7,11", "--tail-bound", "1.01"]);
    assert_eq!(json(&explicit)["results"]["certificate"]["tail_rule"], "explicit");
}

#[test]
fn histogram_csv_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hist.csv");
    let out = nonat(&[
        "names",
        "--primes",
        "5,7",
        "--level",
        "2",
        "--histogram-out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("numerator,denominator,count"));
    let total: u64 = lines
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 2415);
    let report = json(&out);
    assert_eq!(report["results"]["delta_min"], "1/5");
    assert_eq!(report["results"]["epsilon"], "1/20");
    assert_eq!(report["results"]["at_ball_bound"], "1/2");
}

#[test]
fn level_zero_names() {
    let out = nonat(&["names", "--primes", "5,7", "--level", "0"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["results"]["delta_min"], "1/1");
}

#[test]
fn coeffs_single_elements() {
    let out = nonat(&["coeffs", "--primes", "5,7", "--elements", "0;1"]);
    assert!(out.status.success());
    let rows = &json(&out)["results"]["rows"];
    assert_eq!(rows[0]["exact"], "1/1");
    assert_eq!(rows[0]["product"], 1.0);
    assert_eq!(rows[1]["exact"], "1/5");
}

#[test]
fn sbh_search_k1_is_one() {
    let out = nonat(&["sbh-search", "--primes", "5,7", "--k-max", "1"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["results"]["probes"][0]["q"], "1/1");
}

#[test]
fn q_at_least_two_without_certificate_is_inconclusive() {
    let out = nonat(&[
        "sbh-search",
        "--primes",
        "5,7",
        "--level",
        "2",
        "--k-max",
        "4",
        "--budget",
        "10",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["results"]["certified"], false);
    assert_eq!(report["results"]["q_at_least_2"][0], 4);
}

#[test]
fn csv_format_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "primes = \"29\"\nk_max = 2\nformat = \"csv\"\n").unwrap();
    let out = nonat(&["sbh-search", "--config", cfg.to_str().unwrap(), "--k-max", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("field,value,source\n"));
    assert!(text.contains("results.probes.2.k,3,sbh_adversarial_search\n"));
    assert!(!text.contains("results.probes.3.k"));

    fs::write(&cfg, "primes = \"29\"\nnot_a_key = 1\n").unwrap();
    let bad = nonat(&["sbh-search", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(64));
}

#[test]
fn gauss_check_small_range() {
    let out = nonat(&["gauss-check", "--max-prime", "50"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["results"]["primes_checked"], 14);
}
