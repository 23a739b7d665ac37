use std::path::Path;
use std::process::{Command, Output};

fn coklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coklab")).args(args).env_remove("COKLAB_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn snf_examples() {
    let dir = tempfile::tempdir().unwrap();
    let id = write(dir.path(), "id.txt", "2 2\n1 0\n0 1\n");
    let o = coklab(&["snf", &id]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "rank 2: 1 1\n"));
    let d = write(dir.path(), "d.txt", "2 2\n2 0\n0 3\n");
    assert_eq!(stdout(&coklab(&["snf", &d])), "rank 2: 1 6\n");
    let z = write(dir.path(), "z.txt", "2 3\n0 0 0\n0 0 0\n");
    assert_eq!(stdout(&coklab(&["snf", &z])), "rank 0:\n");
    let t = stdout(&coklab(&["snf", &d, "--transforms"]));
    assert!(t.starts_with("rank 2: 1 6\nU\n2 2\n") && t.contains("\nV\n2 2\n"), "{t}");
}

#[test]
fn malformed_matrix_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "2 2\n1 0\n0 x\n");
    let o = coklab(&["snf", &bad]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3, column 3"), "{err}");
    let huge = write(dir.path(), "huge.txt", "99999999999 99999999999\n1\n");
    assert_eq!(coklab(&["cok", &huge]).status.code(), Some(2));
    assert_eq!(coklab(&["cok", "/no/such/file"]).status.code(), Some(2));
}

#[test]
fn cok_examples() {
    let dir = tempfile::tempdir().unwrap();
    for (text, want) in [("3 3\n1 0 0\n0 1 0\n0 0 1\n", "0"), ("1 1\n2\n", "Z/2"), ("2 2\n0 0\n0 0\n", "Z^2")] {
        let f = write(dir.path(), "m.txt", text);
        assert_eq!(stdout(&coklab(&["cok", &f])).trim(), want);
    }
}

#[test]
fn sandpile_examples() {
    let dir = tempfile::tempdir().unwrap();
    let two = write(dir.path(), "two.txt", "2 2\n0 1\n1 0\n");
    assert_eq!(stdout(&coklab(&["sandpile", &two])).trim(), "0");
    let empty = write(dir.path(), "empty.txt", "3 3\n0 0 0\n0 0 0\n0 0 0\n");
    assert_eq!(stdout(&coklab(&["sandpile", &empty])).trim(), "Z^2");
    let looped = write(dir.path(), "loop.txt", "2 2\n1 1\n1 0\n");
    assert_eq!(coklab(&["sandpile", &looped]).status.code(), Some(2));
    let a = coklab(&["sandpile", "--n", "12", "--q", "3/10", "--seed", "4"]);
    let b = coklab(&["sandpile", "--n", "12", "--q", "0.3", "--seed", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(coklab(&["sandpile", "--n", "3", "--q", "2"]).status.code(), Some(2));
    assert_eq!(coklab(&["sandpile", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn constants_examples() {
    let v = stdout(&coklab(&["constants", "zeta-tail-product", "1"]));
    assert!(v.starts_with("0.4357"), "{v}");
    assert_eq!(stdout(&coklab(&["constants", "cohen-lenstra", "trivial", "1"])), v);
    let half = stdout(&coklab(&["constants", "cohen-lenstra", "Z/2", "1"]));
    let x: f64 = half.split_whitespace().next().unwrap().parse().unwrap();
    assert!((x - 0.4357570767758 / 2.0).abs() < 1e-9, "{half}");
    let deg = stdout(&coklab(&["constants", "cohen-lenstra", "0", "0"]));
    assert!(deg.contains("degenerate"));
    assert_eq!(stdout(&coklab(&["constants", "uniform-fullrank", "1", "0", "2"])).trim(), "0.5");
    let s = stdout(&coklab(&["constants", "sylow", "Z/2", "1", "2,3", "--tol", "1e-12"]));
    assert!(s.contains('±'));
    assert!(stdout(&coklab(&["constants", "list"])).contains("prodcyc GROUP k0"));
    for bad in [
        vec!["constants", "no-such"],
        vec!["constants", "zeta"],
        vec!["constants", "zeta", "x"],
        vec!["constants", "zeta", "1"],
        vec!["constants", "zeta", "2", "--tol", "0"],
        vec!["constants", "cohen-lenstra", "Z/q", "1"],
    ] {
        assert_eq!(coklab(&bad).status.code(), Some(2), "{bad:?}");
    }
}

const SURJ: &str = r#"{"kind": "surjectivity", "n": 2, "u": 50, "trials": 100, "seed": 11,
  "distribution": {"kind": "bernoulli", "params": {"q": "1/2"}}}"#;

#[test]
fn run_writes_reproducible_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", SURJ);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = coklab(&["run", &spec, "--out", a.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = coklab(&["run", &spec, "--out", b.to_str().unwrap(), "--no-timestamp", "--threads", "4"]);
    assert_eq!(o.status.code(), Some(0));
    for ext in ["json", "csv"] {
        let name = format!("surjectivity-n2-u50-seed11.{ext}");
        let x = std::fs::read(a.join(&name)).unwrap();
        assert_eq!(x, std::fs::read(b.join(&name)).unwrap(), "{name}");
    }
    let csv = std::fs::read_to_string(a.join("surjectivity-n2-u50-seed11.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..6], &["surjectivity", "2", "50", "surjective", row[4], "100"]);
    assert!(row[6].parse::<f64>().unwrap() >= 0.9);
    assert!(!row[9].is_empty());

    let rep = coklab(&["report", a.join("surjectivity-n2-u50-seed11.json").to_str().unwrap()]);
    assert_eq!(rep.status.code(), Some(0));
    assert!(stdout(&rep).contains("== surjectivity =="));
}

#[test]
fn run_timestamps_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", SURJ);
    let out = dir.path().join("o");
    let o = Command::new(env!("CARGO_BIN_EXE_coklab"))
        .args(["run", &spec, "--out", out.to_str().unwrap()])
        .env("COKLAB_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(names.len(), 2);
    assert!(names.iter().all(|n| n.starts_with("surjectivity-n2-u50-seed99-t")), "{names:?}");
    let json = names.iter().find(|n| n.ends_with(".json")).unwrap();
    assert!(std::fs::read_to_string(out.join(json)).unwrap().contains("wall_time_secs"));
    let bad = Command::new(env!("CARGO_BIN_EXE_coklab"))
        .args(["run", &spec, "--out", out.to_str().unwrap()])
        .env("COKLAB_SEED", "minus one")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn run_flags_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    // zero tolerance cannot be met by a sampled frequency
    let flag = write(
        dir.path(),
        "flag.json",
        r#"{"kind": "cyclic", "n": 4, "trials": 50, "seed": 1, "tolerance": 0.0,
            "distribution": {"kind": "bernoulli", "params": {"q": "1/2"}}}"#,
    );
    let out = dir.path().join("o");
    assert_eq!(coklab(&["run", &flag, "--out", out.to_str().unwrap(), "--no-timestamp"]).status.code(), Some(3));
    assert_eq!(coklab(&["run", "/no/spec.json"]).status.code(), Some(2));
    let invalid = write(dir.path(), "bad.json", r#"{"kind": "moment", "n": 3, "trials": 5, "seed": 0}"#);
    assert_eq!(coklab(&["run", &invalid]).status.code(), Some(2));
    let garbage = write(dir.path(), "garbage.json", "{not json");
    assert_eq!(coklab(&["run", &garbage]).status.code(), Some(2));
    assert_eq!(coklab(&["run", &flag, "--threads", "0"]).status.code(), Some(2));
}

#[test]
fn report_merges_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let specs = [
        SURJ.to_string(),
        r#"{"kind": "sandpile", "n": 6, "trials": 40, "seed": 2, "q": "1/2", "targets": {"groups": ["0", "Z/2"]}}"#
            .to_string(),
    ];
    for (i, s) in specs.iter().enumerate() {
        let f = write(dir.path(), &format!("s{i}.json"), s);
        let code = coklab(&["run", &f, "--out", out.to_str().unwrap(), "--no-timestamp"]).status.code();
        assert!(matches!(code, Some(0) | Some(3)));
    }
    let files: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .map(|p| p.to_str().unwrap().to_string())
        .collect();
    let mut args = vec!["report"];
    args.extend(files.iter().map(String::as_str));
    let text = stdout(&coklab(&args));
    assert!(text.contains("== surjectivity ==") && text.contains("== sandpile =="), "{text}");
    assert_eq!(coklab(&["report"]).status.code(), Some(2));
    let junk = write(dir.path(), "junk.json", "[]");
    assert_eq!(coklab(&["report", &junk]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(coklab(&[]).status.code(), Some(2));
    assert_eq!(coklab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(coklab(&["snf", "--bogus", "x"]).status.code(), Some(2));
    assert_eq!(coklab(&["--help"]).status.code(), Some(0));
}
