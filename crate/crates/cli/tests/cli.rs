use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mvsl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvsl"))
        .args(args)
        .output()
        .expect("spawn mvsl")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn corpus(name: &str) -> String {
    corpus_dir().join(name).to_string_lossy().into_owned()
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn write_temp(src: &str) -> tempfile::NamedTempFile {
    let f = tempfile::Builder::new().suffix(".mvs").tempfile().unwrap();
    std::fs::write(f.path(), src).unwrap();
    f
}

#[test]
fn corpus_goldens() {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "mvs"))
        .collect();
    files.sort();
    assert!(!files.is_empty());
    for f in files {
        let exp = std::fs::read_to_string(f.with_extension("expected")).unwrap();
        let mut lines = exp.lines();
        let code: i32 = lines.next().unwrap()["exit: ".len()..].parse().unwrap();
        let want = lines.next().unwrap_or("");
        let o = mvsl(&["run", f.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(code), "{}: {}", f.display(), stderr(&o));
        if code == 0 {
            assert_eq!(stdout(&o), format!("{want}\n"), "{}", f.display());
            assert!(stderr(&o).is_empty(), "{}", f.display());
        } else {
            assert!(stdout(&o).is_empty(), "{}", f.display());
            assert!(stderr(&o).starts_with(want), "{}: {}", f.display(), stderr(&o));
        }
        let oracle = mvsl(&["run", "--oracle", f.to_str().unwrap()]);
        assert_eq!(oracle.status.code(), Some(code), "{}", f.display());
        assert_eq!(stdout(&oracle), stdout(&o), "{}", f.display());
    }
}

#[test]
fn stats_go_to_stderr_as_json() {
    let o = mvsl(&["run", "--stats", &corpus("cow_not_taken.mvs")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "[1, 2, 3]\n");
    let v: serde_json::Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(v["cow_copies"], 0);
    assert_eq!(v["retains"], 1);
    assert_eq!(v["allocs"], v["frees"]);
    for key in ["deep_copies", "retains", "releases", "moves", "cow_copies", "allocs", "frees"] {
        assert!(v[key].is_u64(), "{key}");
    }
}

#[test]
fn flags_change_counters_not_output() {
    let f = corpus("copy_elide.mvs");
    let stats = |extra: &[&str]| {
        let mut args = vec!["run", "--stats"];
        args.extend_from_slice(extra);
        args.push(&f);
        let o = mvsl(&args);
        assert_eq!(stdout(&o), "1\n");
        serde_json::from_str::<serde_json::Value>(stderr(&o).trim()).unwrap()
    };
    assert_eq!(stats(&[])["deep_copies"], 0);
    assert!(stats(&["--no-move-opt"])["deep_copies"].as_u64().unwrap() >= 2);
    let taken = mvsl(&["run", "--stats", "--no-cow", &corpus("cow_taken.mvs")]);
    let v: serde_json::Value = serde_json::from_str(stderr(&taken).trim()).unwrap();
    assert_eq!(v["cow_copies"], 0);
    assert_eq!(stdout(&taken), "[1, 2, 3]\n");
}

#[test]
fn dumps() {
    let f = corpus("closure.mvs");
    let ir = mvsl(&["check", "--dump", "ir", &f]);
    assert_eq!(ir.status.code(), Some(0));
    assert!(stdout(&ir).contains("routine r0"), "{}", stdout(&ir));
    assert!(stdout(&ir).contains("routine r1"));

    let ast = mvsl(&["check", "--dump", "ast", &f]);
    let reparsed = write_temp(&stdout(&ast));
    let again = mvsl(&["check", "--dump", "ast", reparsed.path().to_str().unwrap()]);
    assert_eq!(stdout(&ast), stdout(&again));

    let types = mvsl(&["check", "--dump", "types", &f]);
    assert!(!stdout(&types).is_empty());

    // Under `run` the value stays alone on stdout.
    let run = mvsl(&["run", "--dump", "ir", &f]);
    assert_eq!(stdout(&run), "43\n");
    assert!(stderr(&run).contains("routine r0"));

    let plain = mvsl(&["check", &f]);
    assert_eq!(stdout(&plain), "ok\n");
}

#[test]
fn check_reports_errors() {
    let o = mvsl(&["check", &corpus("let_mutation.mvs")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("5:1: error[ImmutableTarget]"));
    // Traps are a runtime matter; the checker accepts the program.
    let t = mvsl(&["check", &corpus("overlap_same_index.mvs")]);
    assert_eq!(t.status.code(), Some(0));
}

#[test]
fn diff_file_and_seeds() {
    let o = mvsl(&["diff", &corpus("swap.mvs")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["status"], "PASS");
    assert_eq!(v["results"].as_array().unwrap().len(), 5);

    let trap = mvsl(&["diff", &corpus("overlap_same_index.mvs")]);
    assert_eq!(trap.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&trap).trim()).unwrap();
    assert_eq!(v["results"][0]["trap"]["kind"], "OverlapViolation");

    let seeds = mvsl(&["diff", "--seed", "10", "--trials", "25"]);
    assert_eq!(seeds.status.code(), Some(0), "{}", stderr(&seeds));
    assert_eq!(stdout(&seeds).lines().count(), 25);
    let again = mvsl(&["diff", "--seed", "10", "--trials", "25"]);
    assert_eq!(stdout(&seeds), stdout(&again));

    let rejected = mvsl(&["diff", &corpus("unbound.mvs")]);
    assert_eq!(rejected.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_4() {
    assert_eq!(mvsl(&[]).status.code(), Some(4));
    assert_eq!(mvsl(&["run"]).status.code(), Some(4));
    assert_eq!(mvsl(&["run", "--bogus", "x.mvs"]).status.code(), Some(4));
    assert_eq!(mvsl(&["run", "/nonexistent/file.mvs"]).status.code(), Some(4));
    assert_eq!(mvsl(&["check", "--dump", "bytecode", "x.mvs"]).status.code(), Some(4));
    let both = mvsl(&["diff", &corpus("swap.mvs"), "--seed", "1"]);
    assert_eq!(both.status.code(), Some(4));
    assert_eq!(mvsl(&["--help"]).status.code(), Some(0));
}

#[test]
fn traps_render_position_and_kind() {
    let f = write_temp("let a = [1, 2] in\na[5]\n");
    let o = mvsl(&["run", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).starts_with("2:1: error[IndexOutOfBounds]"), "{}", stderr(&o));
}
