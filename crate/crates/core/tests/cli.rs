use std::fs;
use std::process::{Command, Output};

fn ccdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccdp"))
        .args(args)
        .env_remove("CCDP_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// CSV body without the `#` metadata lines.
fn table(o: &Output) -> Vec<String> {
    stdout(o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn bounds_example_summary() {
    let o = ccdp(&["bounds", "--M", "2", "--P", "10", "--c2", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stderr(&o).trim(),
        "inner 0.953445 outer(appendix) 1.953445 gap 1.000000"
    );
    let rows = table(&o);
    assert_eq!(rows[0], ccdp::gap::CSV_HEADER);
    assert!(rows[1].starts_with("2,10,2,0,"), "{}", rows[1]);
    let out = stdout(&o);
    assert!(out.starts_with("# ccdp "));
    assert!(out.contains("# config-sha256 "));
    assert!(out.contains("# seed 0\n"));
}

#[test]
fn invalid_input_exits_with_two() {
    let o = ccdp(&["bounds", "--M", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("InvalidM"), "{}", stderr(&o));

    let o = ccdp(&["bounds", "--rho", "-0.9", "--M", "3"]);
    assert_eq!(o.status.code(), Some(2));

    let o = ccdp(&["bounds", "--P", "abc"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--P"));

    let o = ccdp(&["bounds", "--no-such-flag", "1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = ccdp(&[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn wrong_model_is_rejected() {
    let o = ccdp(&["bounds", "--model", "two-user", "--M", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("WrongModel"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(&path, "command = bounds\nbogus = 1\n").unwrap();
    let o = ccdp(&["--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown key `bogus`"));
}

#[test]
fn dump_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = ccdp(&["sweep", "--M", "3", "--c", "1,2", "--dump-config"]);
    assert_eq!(first.status.code(), Some(0));
    let path = dir.path().join("dump.cfg");
    fs::write(&path, first.stdout.clone()).unwrap();
    let second = ccdp(&["--config", path.to_str().unwrap(), "--dump-config"]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);

    let a = ccdp(&["sweep", "--M", "3", "--c", "1,2"]);
    let b = ccdp(&["--config", path.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn precedence_flags_over_file_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(&path, "command = bounds\nP = 20\nc2 = 9\n").unwrap();
    let cfg = path.to_str().unwrap();

    let dump = stdout(&ccdp(&["--config", cfg, "--P", "30", "--dump-config"]));
    assert!(dump.contains("P = 30\n"));
    assert!(dump.contains("c2 = 9\n"));
    assert!(dump.contains("M = 2\n"));

    // a gain flag replaces the file's squared gain
    let dump = stdout(&ccdp(&["--config", cfg, "--c", "5", "--dump-config"]));
    assert!(dump.contains("c = 5\n"));
    assert!(!dump.contains("c2 ="));
}

#[test]
fn output_is_independent_of_thread_count() {
    let args = [
        "sweep",
        "--M",
        "2:4",
        "--P",
        "3.01:1000:12:log",
        "--c2",
        "0.5:1e5:15:log",
        "--rho",
        "feasible:4",
    ];
    let run = |threads: &str| {
        let mut a = args.to_vec();
        a.extend(["--threads", threads]);
        ccdp(&a)
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert!(stderr(&one).starts_with("grid: "));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let direct = ccdp(&["bounds", "--c2", "1,4,100"]);
    let to_file = ccdp(&[
        "bounds",
        "--c2",
        "1,4,100",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(to_file.stdout.is_empty());
    assert_eq!(fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn json_has_fixed_top_level_keys() {
    let o = ccdp(&[
        "certify",
        "--theorem",
        "th3",
        "--format",
        "json",
        "--P",
        "10,100",
        "--c2",
        "4,50",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(
        keys,
        ["certified", "config", "maxGap", "results", "warnings"]
    );
    assert_eq!(v["certified"], serde_json::json!(true));
    assert_eq!(v["config"]["theorem"], serde_json::json!("th3"));
    assert!(v["config"]["config-sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn certify_failure_exit_code_depends_on_variant() {
    // the theorem-statement outer is reported, never asserted
    let o = ccdp(&[
        "certify",
        "--theorem",
        "Th4",
        "--variant",
        "theorem-statement",
        "--M",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("certified=false"));
}

#[test]
fn fig3_and_audit_tables() {
    let o = ccdp(&["fig3", "--c", "1,3.3166,5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(table(&o)[0], "c,raw_outer,optimized_outer,argmin_c");
    assert_eq!(table(&o).len(), 4);

    let o = ccdp(&[
        "audit",
        "--M",
        "2:3",
        "--P",
        "10",
        "--c2",
        "1.5:100:30:log",
        "--rho",
        "0,0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        table(&o),
        vec!["bound,M,P,rho,c_low,c_high,value_low,value_high".to_string()]
    );
    assert!(stderr(&o).contains("0 monotonicity violations"));

    // the two-receiver outer bound steps up where its low branch ends (c² = 1)
    let o = ccdp(&[
        "audit",
        "--M",
        "2",
        "--P",
        "10",
        "--c2",
        "0.5:100:30:log",
        "--rho",
        "0",
    ]);
    let rows = table(&o);
    assert_eq!(rows.len(), 2, "{rows:?}");
    assert!(rows[1].starts_with("two-user-outer/appendix,2,10,0,"));
}

#[test]
fn simulate_is_seed_reproducible() {
    let args = [
        "simulate",
        "--samples",
        "20000",
        "--alpha-bar",
        "0.3",
        "--seed",
        "5",
    ];
    let a = ccdp(&args);
    let b = ccdp(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let rows = table(&a);
    assert_eq!(
        rows[0],
        "M,P,c,rho,alpha_bar,target,receiver,value,stderr,closed_form,z_score,samples"
    );
    assert!(rows.last().unwrap().contains(",scheme,min,"));

    let o = ccdp(&["simulate", "--samples", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("InvalidSampleCount"));
}
