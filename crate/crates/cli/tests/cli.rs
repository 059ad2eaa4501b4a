use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn trihull(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trihull"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn simplex_solve_exits_zero_with_unit_weights() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&trihull(
            &["gen", "simplex", "--m", "2", "--out", "s.json"],
            dir.path()
        )),
        0
    );
    let out = trihull(
        &[
            "solve",
            "s.json",
            "--epsilon",
            "0.01",
            "--variant",
            "det",
            "--out",
            "c.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("status: approximate"));
    let cert = json(&dir.path().join("c.json"));
    assert_eq!(cert["status"], "approximate");
    let sum: f64 = cert["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_f64().unwrap())
        .sum();
    assert!((sum - 1.0).abs() < 1e-9);
}

#[test]
fn nonmember_exits_one_and_reports_bounds() {
    let dir = TempDir::new().unwrap();
    let gen = [
        "gen",
        "nonmember",
        "--n",
        "2",
        "--m",
        "2",
        "--margin",
        "1",
        "--out",
        "nm.json",
    ];
    assert_eq!(code(&trihull(&gen, dir.path())), 0);
    let inst = json(&dir.path().join("nm.json"));
    let pt = |i: usize| -> Vec<f64> {
        inst["S"][i]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect()
    };
    let (a, b) = (pt(0), pt(1));
    // p is the origin; distance to segment ab.
    let ab: Vec<f64> = b.iter().zip(&a).map(|(x, y)| x - y).collect();
    let t = (-a.iter().zip(&ab).map(|(x, y)| x * y).sum::<f64>()
        / ab.iter().map(|x| x * x).sum::<f64>())
    .clamp(0.0, 1.0);
    let truth = a
        .iter()
        .zip(&ab)
        .map(|(x, d)| (x + t * d).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!(truth >= 1.0 - 1e-12);
    for variant in [
        "det",
        "greedy",
        "sierpinski",
        "sierpinski-relaxed",
        "sierpinski-free",
    ] {
        let out = trihull(&["solve", "nm.json", "--variant", variant], dir.path());
        assert_eq!(code(&out), 1, "{variant}: {}", stderr(&out));
        let report = stdout(&out);
        assert!(report.contains("status: witness"));
        let cert = json(&dir.path().join("nm.cert.json"));
        let bounds = cert["gap_bounds"].as_array().unwrap();
        let (lo, hi) = (bounds[0].as_f64().unwrap(), bounds[1].as_f64().unwrap());
        assert_eq!(lo, hi / 2.0);
        assert!(
            lo <= truth && truth <= hi,
            "{variant}: ({lo}, {hi}) vs {truth}"
        );
    }
}

#[test]
fn iteration_cap_exits_two() {
    let dir = TempDir::new().unwrap();
    let gen = [
        "gen",
        "near-boundary",
        "--n",
        "3",
        "--delta",
        "0.001",
        "--seed",
        "1",
        "--out",
        "nb.json",
    ];
    assert_eq!(code(&trihull(&gen, dir.path())), 0);
    let out = trihull(
        &["solve", "nb.json", "--epsilon", "0.001", "--max-iters", "3"],
        dir.path(),
    );
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stdout(&out).contains("status: iter-limit"));
}

#[test]
fn usage_errors_exit_above_two() {
    let dir = TempDir::new().unwrap();
    trihull(
        &["gen", "simplex", "--m", "2", "--out", "s.json"],
        dir.path(),
    );
    let cases: &[&[&str]] = &[
        &["solve", "s.json", "--epsilon", "1.5"],
        &["solve", "s.json", "--variant", "fast"],
        &["gen", "nonmember", "--margin", "0"],
        &["gen", "pyramid"],
        &["chaos", "--steps", "12", "--burn-in", "12"],
        &["bench", "simplex", "--variant", "greedy", "--seed", ""],
        &["bench", "simplex", "--epsilon", "0.05,0.1"],
        &["bench", "no-such-kind"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = trihull(args, dir.path());
        assert_eq!(code(&out), 3, "{args:?}: {}", stderr(&out));
        assert!(!stderr(&out).is_empty());
    }
    assert_eq!(code(&trihull(&["--help"], dir.path())), 0);
}

#[test]
fn input_errors_name_the_key() {
    let dir = TempDir::new().unwrap();
    let bad = [
        (r#"{"m":2,"p":[0,0],"S":[[1,2],[3]]}"#, "S[1]"),
        (r#"{"m":2,"p":[0],"S":[[1,2]]}"#, "`p`"),
        (r#"{"p":[0],"S":[[1]]}"#, "`m`"),
    ];
    for (text, key) in bad {
        std::fs::write(dir.path().join("bad.json"), text).unwrap();
        let out = trihull(&["solve", "bad.json"], dir.path());
        assert_eq!(code(&out), 4);
        assert!(stderr(&out).contains(key), "{}", stderr(&out));
    }
    let out = trihull(&["solve", "missing.json"], dir.path());
    assert_eq!(code(&out), 5);
    std::fs::write(dir.path().join("v.json"), "[[0,0],[1]]").unwrap();
    let out = trihull(
        &["chaos", "--vertices", "v.json", "--steps", "20"],
        dir.path(),
    );
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("[1]"));
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let args = |out: &'static str| {
        [
            "gen", "interior", "--n", "20", "--m", "5", "--seed", "1", "--out", out,
        ]
    };
    trihull(&args("a.json"), dir.path());
    trihull(&args("b.json"), dir.path());
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.json")).unwrap());
    let inst = trihull::io::parse_instance(std::str::from_utf8(&a).unwrap()).unwrap();
    assert_eq!(trihull::io::instance_to_json(&inst).as_bytes(), &a[..]);

    let simplex = trihull(&["gen", "simplex", "--m", "3"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&simplex.stdout).unwrap();
    assert_eq!(v["S"].as_array().unwrap().len(), 4);
    assert!(v["rho"].as_f64().unwrap() > 0.0);
}

#[test]
fn chaos_row_counts_and_containment() {
    let dir = TempDir::new().unwrap();
    let out = trihull(&["chaos", "--steps", "13", "--burn-in", "12"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 1);

    let out = trihull(
        &[
            "chaos", "--steps", "100000", "--seed", "3", "--out", "tri.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(dir.path().join("tri.csv")).unwrap();
    assert_eq!(text.lines().count(), 100_000 - 12);
    let h = 3f64.sqrt() / 2.0;
    for line in text.lines() {
        let xy: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let (x, y) = (xy[0], xy[1]);
        // Inside the triangle (0,0), (1,0), (1/2, h) up to rounding.
        assert!(y >= -1e-12 && y <= h * 2.0 * x + 1e-12 && y <= h * 2.0 * (1.0 - x) + 1e-12);
    }

    std::fs::write(dir.path().join("sq.json"), "[[0,0],[1,0],[1,1],[0,1]]").unwrap();
    let out = trihull(
        &["chaos", "--vertices", "sq.json", "--steps", "5000"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    for line in stdout(&out).lines() {
        for x in line.split(',') {
            let x: f64 = x.parse().unwrap();
            assert!((0.0..=1.0).contains(&x));
        }
    }
}

#[test]
fn bench_csv_is_reproducible_with_fixed_header() {
    let dir = TempDir::new().unwrap();
    let args = |out: &'static str| {
        [
            "bench",
            "interior",
            "--n",
            "15",
            "--m",
            "3",
            "--variant",
            "det,greedy,sierpinski",
            "--pivot",
            "first,best",
            "--seed",
            "1,2",
            "--jobs",
            "2",
            "--out",
            out,
        ]
    };
    let a = trihull(&args("a.csv"), dir.path());
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert!(stdout(&a).contains("growth exponent"));
    trihull(&args("b.csv"), dir.path());
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(
        a,
        std::fs::read_to_string(dir.path().join("b.csv")).unwrap()
    );
    let mut lines = a.lines();
    assert_eq!(
        lines.next(),
        Some("variant,pivot_strategy,epsilon,seed,n,m,status,iterations,pivot_scans,final_distance,elapsed_micros,R,rho_or_empty")
    );
    // det: 2 pivots x 4 eps; greedy and sierpinski: 2 pivots x 4 eps x 2 seeds.
    assert_eq!(lines.count(), 8 + 2 * 16);
}

#[test]
fn bench_simplex_strict_exponent_is_small() {
    let dir = TempDir::new().unwrap();
    let out = trihull(
        &[
            "bench", "simplex", "--m", "2", "--pivot", "strict", "--out", "s.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let summary = stdout(&out);
    let exponent: f64 = summary
        .lines()
        .find_map(|l| l.split("(log-log): ").nth(1))
        .unwrap()
        .parse()
        .unwrap();
    assert!(exponent < 0.5, "{summary}");
}

#[test]
fn bench_reads_instance_files() {
    let dir = TempDir::new().unwrap();
    trihull(
        &["gen", "simplex", "--m", "4", "--out", "s.json"],
        dir.path(),
    );
    let out = trihull(&["bench", "s.json", "--epsilon", "0.1,0.01"], dir.path());
    assert_eq!(code(&out), 0);
    let csv = stdout(&out);
    assert_eq!(csv.lines().count(), 3);
    assert!(csv
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("det,first,0.1,0,5,4,approximate,"));
}
