use std::path::PathBuf;
use std::process::{Command, Output};

fn qfivol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfivol"))
        .args(args)
        .env_remove("QFIVOL_SEED")
        .env_remove("QFIVOL_PARALLELISM")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qfivol-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn repro_commands_pass() {
    for args in [
        &["repro", "entanglement"][..],
        &["repro", "hessian"],
        &["repro", "pure-volume", "--dim", "4", "--n", "3"],
    ] {
        let o = qfivol(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
        assert!(stdout(&o).ends_with("PASS\n"));
    }
    assert!(stdout(&qfivol(&["repro", "hessian"])).contains("verdict: indefinite"));
}

#[test]
fn list_functions_table() {
    let o = qfivol(&["list-functions"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    let row = |id: &str| text.lines().find(|l| l.starts_with(&format!("{id} "))).unwrap().to_string();
    assert!(row("sld").contains("0.5"));
    assert!(row("rld").contains("false"));
    assert!(row("wyd:0.25").contains("0.1875"));
}

#[test]
fn argument_errors_exit_one() {
    assert_eq!(qfivol(&["repro", "pure-volume", "--dim", "9"]).status.code(), Some(1));
    assert_eq!(qfivol(&["no-such-command"]).status.code(), Some(1));
    let out = scratch("bad.jsonl");
    let out = out.to_str().unwrap();
    let base = ["sweep", "--n", "2", "--dim", "3", "--samples", "2", "--out", out];
    let with = |extra: &[&str]| {
        let mut v: Vec<&str> = base.to_vec();
        v.extend_from_slice(extra);
        qfivol(&v).status.code()
    };
    assert_eq!(with(&["--functions", "rld"]), Some(1));
    assert_eq!(with(&["--ensemble", "gue"]), Some(1));
    assert_eq!(with(&["--ensemble", "structured"]), Some(1));
    assert_eq!(qfivol(&["sweep", "--n", "2", "--dim", "3", "--samples", "2", "--out", "/nonexistent/dir/x"]).status.code(), Some(1));
}

#[test]
fn sweep_then_replay() {
    let out = scratch("sweep.jsonl");
    let out_s = out.to_str().unwrap();
    let o = qfivol(&[
        "sweep", "--n", "3", "--dim", "2-4", "--samples", "40", "--ensemble", "real", "--seed", "11", "--parallelism", "2",
        "--out", out_s, "--strict",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("violations: 0"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 121);
    for line in [1, 2, 77, 120] {
        let r = qfivol(&["replay", "--record", &format!("{out_s}:{line}")]);
        assert_eq!(r.status.code(), Some(0), "{}", stdout(&r));
        assert!(stdout(&r).contains("MATCH"));
    }
    // the summary line is not a sample
    assert_eq!(qfivol(&["replay", "--record", &format!("{out_s}:121")]).status.code(), Some(1));

    let tampered = scratch("tampered.jsonl");
    let first = text.lines().next().unwrap();
    let f_start = first.find("\"F\":").unwrap() + 4;
    let f_end = f_start + first[f_start..].find(',').unwrap();
    let value: f64 = first[f_start..f_end].parse().unwrap();
    let edited = format!("{}{:.16e}{}", &first[..f_start], value * (1.0 + 1e-12), &first[f_end..]);
    std::fs::write(&tampered, edited + "\n").unwrap();
    let r = qfivol(&["replay", "--record", &format!("{}:1", tampered.to_str().unwrap())]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn sweep_output_independent_of_parallelism_and_env_seed() {
    let a = scratch("p1.jsonl");
    let b = scratch("p3.jsonl");
    let run = |path: &PathBuf, p: &str| {
        Command::new(env!("CARGO_BIN_EXE_qfivol"))
            .args(["sweep", "--n", "2", "--dim", "2-5", "--samples", "200", "--out", path.to_str().unwrap()])
            .env("QFIVOL_SEED", "99")
            .env("QFIVOL_PARALLELISM", p)
            .output()
            .unwrap()
    };
    assert!(run(&a, "1").status.success());
    assert!(run(&b, "3").status.success());
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert!(String::from_utf8(ta).unwrap().contains(r#""seed":99"#));
}
