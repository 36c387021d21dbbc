use std::path::Path;
use std::process::{Command, Output};

use qubit_track::{bloch_of, find_schemes, project, BlochVector, Family, SystemParams};
use qubit_track_cli::manifest::{manifest_path_for, RunManifest};
use qubit_track_cli::output::{read_entropy_csv, read_trajectory_csv, EnsembleJson, SolveJson};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qubit-track"))
        .args(args)
        .output()
        .unwrap()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qubit-track"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn solve_strong_drive_has_one_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = run(&[
        "solve",
        "--gamma",
        "1",
        "--omega",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let listing: SolveJson = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(listing.schemes.len(), 1);
    let s = &listing.schemes[0];
    assert_eq!(s.family, "real");
    assert!((s.entropy_bits - 1.0).abs() < 1e-12);
    assert!((s.mu_re - 0.5).abs() < 1e-15 && s.mu_im == 0.0);
    assert!(stdout(&o).contains("real"));
    assert!(manifest_path_for(&out).exists());
}

#[test]
fn solve_weak_drive_has_three_schemes() {
    let o = run(&["solve", "--omega", "0.2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let listing: SolveJson = serde_json::from_str(&stdout(&o)).unwrap();
    let families: Vec<&str> = listing.schemes.iter().map(|s| s.family.as_str()).collect();
    assert_eq!(families, ["real", "imag-large", "imag-small"]);
    for s in &listing.schemes {
        assert!(s.pr_residual < 1e-8);
        assert!((s.p1 + s.p2 - 1.0).abs() < 1e-12);
    }

    let csv = run(&["solve", "--omega", "0.2", "--format", "csv"]);
    let rows = read_entropy_csv(&csv.stdout).unwrap();
    assert_eq!(rows.len(), 3);
}

#[test]
fn solve_rejects_undriven_atom() {
    let o = run(&["solve", "--gamma", "1", "--omega", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("undriven atom: tracking trivial"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["solve", "--gamma", "-1", "--omega", "1"],
        vec!["solve"],
        vec!["entropy-curve", "--omega-min", "0.3", "--omega-max", "0.1"],
        vec!["entropy-curve", "--omega-min", "0", "--omega-max", "0.1"],
        vec![
            "entropy-curve",
            "--omega-min",
            "0.1",
            "--omega-max",
            "0.2",
            "--family",
            "bogus",
        ],
        vec![
            "simulate",
            "--omega",
            "1",
            "--policy",
            "fixed:0.5",
            "--out",
            "x.csv",
        ],
        vec![
            "simulate",
            "--omega",
            "1",
            "--policy",
            "adaptive:nope",
            "--out",
            "x.csv",
        ],
        vec![
            "simulate",
            "--omega",
            "1",
            "--policy",
            "fixed:0.5,0",
            "--t-max",
            "-1",
            "--out",
            "x.csv",
        ],
        vec![
            "simulate",
            "--omega",
            "1",
            "--policy",
            "adaptive:imag-small",
            "--out",
            "x.csv",
        ],
        vec!["frobnicate"],
    ] {
        let dir = tempfile::tempdir().unwrap();
        let o = run_in(dir.path(), &args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!dir.path().join("x.csv").exists(), "{args:?} wrote output");
    }
}

#[test]
fn entropy_curve_weak_drive_range() {
    let o = run(&[
        "entropy-curve",
        "--omega-min",
        "0.01",
        "--omega-max",
        "0.25",
        "--steps",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(
        text.starts_with("omega_over_gamma,family,mu_re,mu_im,p1,p2,entropy_bits,pr_residual\n")
    );
    assert!(!text.contains('\r'));
    let rows = read_entropy_csv(text.as_bytes()).unwrap();

    let real: Vec<_> = rows.iter().filter(|r| r.family == "real").collect();
    assert_eq!(real.len(), 100);
    assert!(real.iter().all(|r| (r.entropy_bits - 1.0).abs() < 1e-9));

    let mut compared = 0;
    for small in rows.iter().filter(|r| r.family == "imag-small") {
        let large = rows
            .iter()
            .find(|r| r.family == "imag-large" && r.omega_over_gamma == small.omega_over_gamma)
            .unwrap();
        assert!(
            small.entropy_bits < large.entropy_bits,
            "{small:?} vs {large:?}"
        );
        compared += 1;
    }
    assert!(compared >= 99);

    let order = |f: &str| Family::from_name(f).unwrap();
    for w in rows.windows(2) {
        let a = (w[0].omega_over_gamma, order(&w[0].family));
        let b = (w[1].omega_over_gamma, order(&w[1].family));
        assert!(a < b, "rows out of order: {a:?} then {b:?}");
    }
}

#[test]
fn entropy_curve_strong_drive_only_real() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let o = run(&[
        "entropy-curve",
        "--omega-min",
        "0.3",
        "--omega-max",
        "0.5",
        "--steps",
        "21",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = read_entropy_csv(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().all(|r| r.family == "real"));
}

#[test]
fn entropy_curve_family_filter() {
    let o = run(&[
        "entropy-curve",
        "--omega-min",
        "0.05",
        "--omega-max",
        "0.2",
        "--steps",
        "4",
        "--family",
        "imag-small",
    ]);
    let rows = read_entropy_csv(&o.stdout).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows
        .iter()
        .all(|r| r.family == "imag-small" && r.entropy_bits < 0.5));
}

#[test]
fn simulate_adaptive_rows_sit_on_scheme_states() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("adaptive.csv");
    let o = run(&[
        "simulate",
        "--gamma",
        "1",
        "--omega",
        "1",
        "--policy",
        "adaptive:real",
        "--t-max",
        "100",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_trajectory_csv(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 1001);

    let scheme = find_schemes(&SystemParams::new(1.0, 1.0).unwrap()).unwrap()[0];
    let targets = [
        bloch_of(&project(&scheme.pair.psi1)),
        bloch_of(&project(&scheme.pair.psi2)),
    ];
    for r in &rows {
        let b = BlochVector {
            x: r.bloch_x,
            y: r.bloch_y,
            z: r.bloch_z,
        };
        assert!(targets.iter().any(|t| t.distance(&b) < 1e-3), "{r:?}");
        assert!((r.active_mu_re.abs() - 0.5).abs() < 1e-15 && r.active_mu_im == 0.0);
    }
    assert!(rows.last().unwrap().jumps_so_far > 0);

    let stats_path = dir.path().join("adaptive.csv.stats.json");
    let stats: EnsembleJson = serde_json::from_slice(&std::fs::read(stats_path).unwrap()).unwrap();
    assert_eq!(stats.times.len(), 1001);
    assert_eq!(stats.mean_rho.len(), 1001);
    let occ = stats.occupancy.unwrap();
    assert!((occ[0] + occ[1] - 1.0).abs() < 1e-12);
}

#[test]
fn simulate_undriven_decays_once() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("decay.csv");
    let o = run(&[
        "simulate",
        "--policy",
        "fixed:0,0",
        "--omega",
        "0",
        "--gamma",
        "1",
        "--t-max",
        "30",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_trajectory_csv(&std::fs::read(&out).unwrap()).unwrap();
    let last = rows.last().unwrap();
    assert_eq!(last.jumps_so_far, 1);
    assert_eq!(rows[0].jumps_so_far, 0);
    let after: Vec<_> = rows.iter().filter(|r| r.jumps_so_far == 1).collect();
    assert!(!after.is_empty());
    for r in after {
        assert_eq!((r.bloch_x, r.bloch_y, r.bloch_z), (0.0, 0.0, -1.0));
    }
}

#[test]
fn simulate_same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let o = run(&[
            "simulate",
            "--policy",
            "fixed:0.5,0",
            "--gamma",
            "1",
            "--omega",
            "1",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        files.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(files[0], files[1]);

    let other = dir.path().join("c.csv");
    run(&[
        "simulate",
        "--policy",
        "fixed:0.5,0",
        "--gamma",
        "1",
        "--omega",
        "1",
        "--seed",
        "8",
        "--out",
        other.to_str().unwrap(),
    ]);
    assert_ne!(std::fs::read(&other).unwrap(), files[0]);
}

#[test]
fn verify_exit_codes() {
    for omega in ["0.2", "1"] {
        let o = run(&["verify", "--gamma", "1", "--omega", omega]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        let text = stdout(&o);
        assert!(text.lines().count() >= 10);
        assert!(text.lines().all(|l| l.starts_with("PASS ")));
    }
    let o = run(&["verify", "--gamma", "-1", "--omega", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn manifest_replay_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (
            vec![
                "simulate",
                "--policy",
                "adaptive:imag-large",
                "--omega",
                "0.2",
                "--t-max",
                "40",
                "--n-traj",
                "3",
                "--seed",
                "5",
                "--out",
                "sim.csv",
            ],
            "sim.csv",
        ),
        (
            vec!["solve", "--omega", "0.2", "--out", "solve.json"],
            "solve.json",
        ),
        (
            vec![
                "entropy-curve",
                "--omega-min",
                "0.05",
                "--omega-max",
                "0.3",
                "--steps",
                "6",
                "--out",
                "curve.csv",
            ],
            "curve.csv",
        ),
    ];
    for (args, out) in cases {
        let o = run_in(dir.path(), &args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let first = std::fs::read(dir.path().join(out)).unwrap();
        let manifest_file = dir.path().join(format!("{out}.manifest.json"));
        let text = std::fs::read_to_string(&manifest_file).unwrap();
        let manifest = RunManifest::from_json(&text).unwrap();
        assert_eq!(manifest.command, args[0]);
        assert_eq!(manifest.tool_version, env!("CARGO_PKG_VERSION"));
        assert!(manifest.outputs.iter().any(|p| p == out));
        if args[0] == "simulate" {
            assert_eq!(manifest.seed, Some(5));
            assert_eq!(manifest.parameters["policy"], "adaptive:imag-large");
        }

        std::fs::remove_file(dir.path().join(out)).unwrap();
        let replay: Vec<&str> = manifest.argv.iter().map(String::as_str).collect();
        let o = run_in(dir.path(), &replay);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(std::fs::read(dir.path().join(out)).unwrap(), first, "{out}");
    }
}

#[test]
fn explicit_manifest_path_for_stdout_commands() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.manifest.json");
    let o = run(&[
        "verify",
        "--omega",
        "1",
        "--manifest",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let m = RunManifest::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(m.command, "verify");
    assert!(m.outputs.is_empty());
    assert!(m.wall_clock_seconds >= 0.0);
}

#[test]
fn trajectory_csv_numbers_have_seventeen_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    run(&[
        "simulate",
        "--policy",
        "fixed:0.5,0",
        "--omega",
        "1",
        "--t-max",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    let second_line = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = second_line.split(',').collect();
    assert_eq!(fields.len(), 12);
    for f in &fields[1..11] {
        let mantissa = f.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.replace('.', "").len(), 17, "{f}");
    }
}
