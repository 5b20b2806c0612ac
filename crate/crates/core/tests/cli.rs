use std::process::{Command, Output};

fn aoi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aoi-lab"))
        .args(args)
        .env("AOI_LAB_THREADS", "2")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Value of `column` in the first data row of a CSV.
fn field(csv: &str, column: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == column).unwrap();
    row[i].to_string()
}

#[test]
fn analytic_csv() {
    let o = aoi(&[
        "analytic",
        "--discipline",
        "fcfs",
        "--arrival",
        "exp",
        "--service",
        "exp",
        "--lambda",
        "0.5",
        "--mu",
        "1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(field(&out, "average"), "3.5");
    assert_eq!(field(&out, "peak"), "4");
    assert_eq!(field(&out, "method"), "closed_form");
}

#[test]
fn analytic_json() {
    let o = aoi(&[
        "analytic",
        "--discipline",
        "lcfsp",
        "--arrival",
        "exp",
        "--service",
        "det",
        "--lambda",
        "0.5",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let avg = v["average"].as_f64().unwrap();
    assert!((avg - 0.5f64.exp() / 0.5).abs() < 1e-12);
    assert_eq!(v["discipline"], "lcfsp");
}

#[test]
fn infinite_moment_is_a_domain_error() {
    let o = aoi(&[
        "analytic",
        "--discipline",
        "fcfs",
        "--arrival",
        "exp",
        "--service",
        "pareto:1.5",
        "--lambda",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("infinite second moment"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn instability_is_a_domain_error() {
    let o = aoi(&[
        "analytic",
        "--discipline",
        "fcfs",
        "--arrival",
        "exp",
        "--service",
        "exp",
        "--lambda",
        "1.5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn malformed_input_exits_with_usage() {
    for args in [
        vec![
            "analytic",
            "--discipline",
            "fcfs",
            "--arrival",
            "exp",
            "--service",
            "gamma:2",
            "--lambda",
            "0.5",
        ],
        vec![
            "analytic",
            "--discipline",
            "sjf",
            "--arrival",
            "exp",
            "--service",
            "exp",
            "--lambda",
            "0.5",
        ],
        vec![
            "analytic",
            "--discipline",
            "fcfs",
            "--arrival",
            "exp",
            "--service",
            "exp",
        ],
        vec!["analytic", "--lambda", "abc"],
        vec![
            "simulate",
            "--discipline",
            "fcfs",
            "--arrival",
            "exp",
            "--service",
            "exp",
            "--lambda",
            "0.5",
            "--horizon",
            "10",
            "--packets",
            "10",
        ],
        vec!["frobnicate"],
    ] {
        let o = aoi(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains("Usage"), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "simulate",
        "--discipline",
        "lcfsp",
        "--arrival",
        "exp",
        "--service",
        "exp",
        "--lambda",
        "1",
        "--packets",
        "2e4",
        "--seed",
        "7",
        "--replications",
        "2",
    ];
    let a = aoi(&args);
    let b = aoi(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let avg: f64 = field(&stdout(&a), "average_age").parse().unwrap();
    assert!((avg - 2.0).abs() < 0.1);
    assert_eq!(field(&stdout(&a), "seed"), "7");
}

#[test]
fn simulate_trace_writes_json_lines() {
    let o = aoi(&[
        "simulate",
        "--discipline",
        "fcfs",
        "--arrival",
        "det",
        "--service",
        "det",
        "--lambda",
        "0.5",
        "--horizon",
        "20",
        "--trace",
        "5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0]["event"], "generate");
    assert_eq!(lines[0]["time"], 2.0);
    assert_eq!(lines[1]["event"], "age_drop");
    assert_eq!(lines[1]["age_before"], 3.0);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "# M/M/1\ndiscipline = fcfs\narrival = exp\nservice = exp\nlambda = 0.5\nmu = 1\n",
    )
    .unwrap();
    let path = cfg.to_str().unwrap();
    let o = aoi(&["analytic", "--config", path]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), "average"), "3.5");
    let o = aoi(&["analytic", "--config", path, "--lambda", "0.25"]);
    assert_eq!(field(&stdout(&o), "lambda"), "0.25");

    std::fs::write(&cfg, "lambda: 0.5\n").unwrap();
    assert_eq!(aoi(&["analytic", "--config", path]).status.code(), Some(2));
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(aoi(&["analytic", "--config", path]).status.code(), Some(2));
}

#[test]
fn sweep_writes_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig3.csv");
    let o = aoi(&[
        "sweep",
        "figure3",
        "--lambda-min",
        "0.5",
        "--lambda-max",
        "0.6",
        "--lambda-step",
        "0.1",
        "--spot",
        "0.5",
        "--packets",
        "1e4",
        "--heavy-packets",
        "1e4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("scenario,discipline,arrival_spec,service_spec,lambda,mu,param,"));
    // Six services and the bound, two λ values each.
    assert_eq!(lines.len(), 1 + 7 * 2);
    assert!(lines[1].starts_with("figure3,lcfsp,exp,det,0.5,1,,4.29744,3.29744,"));
    assert!(
        !lines[1].ends_with(",,,,,,,,,"),
        "spot point has simulated values"
    );
    assert!(lines[2].contains(",0.6,"));
}

#[test]
fn sweep_is_reproducible_and_respects_seed() {
    let base = [
        "sweep",
        "figure6",
        "--lambda-min",
        "0.5",
        "--lambda-max",
        "0.5",
        "--spot",
        "none",
        "--samples",
        "2e4",
    ];
    let a = aoi(&base);
    let b = aoi(&base);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let mut seeded = base.to_vec();
    seeded.extend(["--seed", "99"]);
    assert_ne!(aoi(&seeded).stdout, a.stdout);
}

#[test]
fn age_vs_delay_table() {
    let o = aoi(&["sweep", "age-vs-delay", "--samples", "2e4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 13);
    assert!(out
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("lcfsp,exp,det,0.5,1,1.5,"));
}

#[test]
fn validate_passes_on_small_budget() {
    let o = aoi(&[
        "validate",
        "--lambda-min",
        "0.3",
        "--lambda-max",
        "0.9",
        "--lambda-step",
        "0.3",
        "--samples",
        "1e5",
        "--packets",
        "2e5",
    ]);
    let out = stdout(&o);
    let failing: Vec<&str> = out.lines().filter(|l| l.ends_with(",fail")).collect();
    assert!(o.status.success(), "{failing:#?}\n{}", stderr(&o));
    assert!(out.starts_with("check,point,lhs,rhs,margin,pass"));
    assert!(stderr(&o).contains("0 failed"));
}

#[test]
fn help_succeeds() {
    let o = aoi(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("simulate"));
}
