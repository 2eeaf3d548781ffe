use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use whitney_lab_cli::config::{ConfigError, Value};
use whitney_lab_cli::output::{sha256_hex, CONFIG_FILE, MANIFEST_FILE};
use whitney_lab_cli::{parse_args, run, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};

fn args(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

fn run_in(dir: &Path, line: &str) -> whitney_lab_cli::Manifest {
    let cfg = parse_args(&args(line), dir, None).unwrap();
    run(&cfg).unwrap_or_else(|e| panic!("{line}: {e}"))
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != MANIFEST_FILE)
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.conf"), "# twist run\nsteps = 3\nprofile = power\nexponent = -2\n").unwrap();
    let cfg = parse_args(&args("twist --config run.conf --steps 5 --seed 9"), dir.path(), None).unwrap();
    assert_eq!(cfg.int("steps"), 5);
    assert_eq!(cfg.string("profile"), "power");
    assert_eq!(cfg.float("exponent"), -2.0);
    assert_eq!(cfg.seed, 9);

    fs::write(dir.path().join("bad.conf"), "stepz = 3\n").unwrap();
    let err = parse_args(&args("twist --config bad.conf"), dir.path(), None).unwrap_err();
    assert!(matches!(err, ConfigError::UnknownKey { ref key, .. } if key == "stepz"));
    assert!(err.to_string().contains("stepz"));
}

#[test]
fn config_file_paths_resolve_against_the_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("sub")).unwrap();
    fs::write(dir.path().join("sub/jets.conf"), "field = field.json\nout = results\n").unwrap();
    let cfg = parse_args(&args("jets --config sub/jets.conf"), dir.path(), None).unwrap();
    assert_eq!(cfg.get("field"), Some(&Value::Path(dir.path().join("sub/field.json"))));
    assert_eq!(cfg.output, dir.path().join("sub/results"));
}

#[test]
fn errors_name_the_offending_key() {
    let cwd = Path::new("/tmp");
    let mismatch = parse_args(&args("twist --steps abc"), cwd, None).unwrap_err();
    assert!(matches!(mismatch, ConfigError::TypeMismatch { ref key, .. } if key == "steps"));
    assert!(mismatch.to_string().contains("\"steps\""));
    let missing = parse_args(&args("procrustes --source a.csv"), cwd, None).unwrap_err();
    assert_eq!(missing, ConfigError::MissingRequired("target".into()));
    assert!(missing.to_string().contains("\"target\""));
}

#[test]
fn recurrence_matches_hermite_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_in(dir.path(), &format!("recurrence --beta 2 --N 20 --tol 1e-10 --out {}", dir.path().display()));
    assert!(m.files.iter().any(|f| f.name == "recurrence.json"));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("recurrence.json")).unwrap()).unwrap();
    let alphas: Vec<f64> = serde_json::from_value(json["alphas"].clone()).unwrap();
    assert!(alphas.len() >= 20);
    for (n, a) in alphas.iter().enumerate() {
        assert!((a - ((n + 1) as f64).sqrt() / 2.0).abs() <= 1e-8, "alpha_{n} = {a}");
    }
}

#[test]
fn mrs_rows_are_square_roots() {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), "mrs --beta 2 --u 1,4 --out o");
    let text = fs::read_to_string(dir.path().join("o/mrs.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("u,a_u"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (u, a) = l.split_once(',').unwrap();
            (u.parse().unwrap(), a.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 2);
    for ((u, a), (eu, ea)) in rows.iter().zip([(1.0, 1.0), (4.0, 2.0)]) {
        assert_eq!(*u, eu);
        assert!((a - ea).abs() <= 1e-10);
    }
}

#[test]
fn identity_certifies_exactly() {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), "certify --dim 3 --out o");
    let cert: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("o/certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["lo"], 1.0);
    assert_eq!(cert["hi"], 1.0);
}

#[test]
fn twist_map_roundtrips_through_certify() {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), "twist --profile exp --scale 0.01 --box 10 --points 200 --out t");
    run_in(dir.path(), "certify --map t/map.json --out c");
    let read = |p: &str| -> serde_json::Value { serde_json::from_slice(&fs::read(dir.path().join(p)).unwrap()).unwrap() };
    assert_eq!(read("t/certificate.json"), read("c/certificate.json"));
    let cert = read("t/certificate.json");
    assert!(cert["lo"].as_f64().unwrap() >= 0.95 && cert["hi"].as_f64().unwrap() <= 1.05);
}

const RUNS: [&str; 8] = [
    "twist --profile exp --scale 1 --box 10 --steps 3 --seed 7",
    "twist --profile transition --seed 3 --out transition",
    "slide --seed 5",
    "certify --seed 11",
    "mrs --degrees 10 --trials 5 --n 10 --seed 2",
    "expand --function gaussian --n 2,4,8",
    "conditions --p 6 --b 0 --B 1 --beta 2 --eta 1 --C 3",
    "laguerre --function exp --dim 2 --cap 4 --n 2,4",
];

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for line in RUNS {
        let cfg = parse_args(&args(line), dir.path(), None).unwrap();
        let first = run(&cfg).unwrap();
        let before = snapshot(&cfg.output);
        let second = run(&cfg).unwrap();
        assert_eq!(before, snapshot(&cfg.output), "{line}");
        assert_eq!(first.files, second.files, "{line}");
        assert_eq!(first.config_hash, second.config_hash);
    }
}

#[test]
fn manifest_lists_every_emitted_file() {
    let dir = tempfile::tempdir().unwrap();
    for line in RUNS {
        let cfg = parse_args(&args(line), dir.path(), None).unwrap();
        let manifest = run(&cfg).unwrap();
        let on_disk = snapshot(&cfg.output);
        let listed: BTreeMap<String, String> = manifest.files.iter().map(|f| (f.name.clone(), f.sha256.clone())).collect();
        assert_eq!(listed.keys().collect::<Vec<_>>(), on_disk.keys().collect::<Vec<_>>(), "{line}");
        for (name, bytes) in &on_disk {
            assert_eq!(listed[name], sha256_hex(bytes), "{line}: {name}");
        }
        assert_eq!(manifest.config_hash, sha256_hex(&on_disk[CONFIG_FILE]));
        assert_eq!(manifest.seed, cfg.seed);
        let text = fs::read_to_string(cfg.output.join(MANIFEST_FILE)).unwrap();
        let json: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(json["wall_time_seconds"].as_f64().unwrap() >= 0.0);
        assert_eq!(json["seed"], cfg.seed);
    }
}

#[test]
fn seeds_change_sampled_payloads() {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), "twist --scale 0.05 --points 50 --seed 1 --out a");
    run_in(dir.path(), "twist --scale 0.05 --points 50 --seed 2 --out b");
    let read = |p: &str| fs::read(dir.path().join(p)).unwrap();
    assert_ne!(read("a/trajectory_step0.csv"), read("b/trajectory_step0.csv"));
    assert_eq!(read("a/map.json"), read("b/map.json"));
}

fn wlab(dir: &Path, line: &str) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_wlab"))
        .args(args(line))
        .current_dir(dir)
        .env_remove(whitney_lab_cli::OUTPUT_ROOT_ENV)
        .output()
        .unwrap()
}

#[test]
fn exit_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let ok = wlab(dir.path(), "recurrence --N 8");
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(dir.path().join("wlab-out/recurrence/manifest.json").exists());

    let usage = wlab(dir.path(), "recurrence --N 8 --colour red");
    assert_eq!(usage.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("colour"));

    let rejected = wlab(dir.path(), "twist --profile transition --c2 7");
    assert_eq!(rejected.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&rejected.stderr).starts_with("geometry:"));

    // 1/(1+|x|^2) decays too slowly for a finite truncation box
    let numerical = wlab(dir.path(), "laguerre --function rational");
    assert_eq!(numerical.status.code(), Some(EXIT_NUMERICAL));
    assert!(String::from_utf8_lossy(&numerical.stderr).starts_with("laguerre:"));
}

#[test]
fn output_root_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_wlab"))
        .args(args("mrs --u 9"))
        .current_dir(dir.path())
        .env(whitney_lab_cli::OUTPUT_ROOT_ENV, dir.path().join("runs"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("runs/mrs/mrs.csv").exists());
}
