use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn skalab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skalab"))
        .args(args)
        .current_dir(dir)
        .env_remove("SKALAB_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(o: &Output) -> Option<usize> {
    stdout(o).lines().find_map(|l| l.strip_prefix("value ")?.parse().ok())
}

#[test]
fn oracle_queries() {
    let dir = tempfile::tempdir().unwrap();
    let o = skalab(&["oracle", "--x", ""], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&o), Some(0));
    assert!(stdout(&o).contains("witness \"\" (0 bits"));

    let o = skalab(&["oracle", "--x", "1010", "--cond", "1010"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(value(&o).unwrap() <= 3);
    assert!(stdout(&o).contains("witness \"100\" (3 bits, hex 80)"));

    fs::write(dir.path().join("x.txt"), "0110\n").unwrap();
    let o = skalab(&["oracle", "--x", "@x.txt", "--level", "-2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&o), Some(5));
}

#[test]
fn oracle_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(skalab(&["oracle", "--x", "10a1"], dir.path()).status.code(), Some(2));
    assert_eq!(skalab(&["oracle"], dir.path()).status.code(), Some(2));
    assert_eq!(
        skalab(&["oracle", "--x", "1", "--level", "99"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        skalab(&["oracle", "--x", "101101", "--l-max", "3"], dir.path())
            .status
            .code(),
        Some(5)
    );
    assert_eq!(
        skalab(&["oracle", "--x", "1011011011", "--quota", "10"], dir.path())
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        skalab(&["oracle", "--x", "@missing.txt"], dir.path()).status.code(),
        Some(2)
    );
}

#[test]
fn reference_run_golden() {
    let dir = tempfile::tempdir().unwrap();
    let o = skalab(&["run", "--out", "ref"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("ref");
    let digest = "e1f9e9281d50cb1e8d3bead143bdd2aef40b9eabd624064afbdd9f0b3d522520";
    assert_eq!(
        fs::read_to_string(out.join("report.sha256")).unwrap(),
        format!("{digest}  report.json\n")
    );
    assert!(stdout(&o).starts_with("variant B n=4 runs=200 agreed=200 rate=1.0000"));
    assert_eq!(fs::read_dir(out.join("transcripts")).unwrap().count(), 201);
    assert_eq!(fs::read_to_string(out.join("runs.csv")).unwrap().lines().count(), 201);

    let o = skalab(&["report", "ref/report.json", "--verify"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(&format!("sha256 {digest}")));
    assert!(stdout(&o).contains("regenerated byte-identically"));
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = skalab(
            &[
                "run",
                "--variant",
                "A",
                "--n",
                "5",
                "--trials",
                "8",
                "--seed",
                "9",
                "--out",
                out,
            ],
            dir.path(),
        );
        assert_eq!(o.status.code(), Some(0));
    }
    let one = |o: &str, f: &str| fs::read(dir.path().join(o).join(f)).unwrap();
    assert_eq!(one("a", "report.json"), one("b", "report.json"));
    assert_eq!(one("a", "transcripts/SHA256SUMS"), one("b", "transcripts/SHA256SUMS"));

    // The echoed config reproduces the run; one worker gives the same bytes.
    let o = skalab(
        &["--threads", "1", "run", "--config", "a/config.toml", "--out", "c"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(one("a", "report.json"), one("c", "report.json"));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("exp.toml"),
        "[experiment]\nvariant = \"A\"\nn = 4\nepsilon = \"1/4\"\ntrials = 3\n\n[output]\ndir = \"from-file\"\n",
    )
    .unwrap();
    let o = skalab(&["run", "--config", "exp.toml", "--trials", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let cfg = fs::read_to_string(dir.path().join("from-file/config.toml")).unwrap();
    assert!(cfg.contains("variant = \"A\""));
    assert!(cfg.contains("trials = 2"));
    assert!(cfg.contains("epsilon = \"1/4\""));

    fs::write(dir.path().join("bad.toml"), "[experiment]\nsurprise = 1\n").unwrap();
    assert_eq!(
        skalab(&["run", "--config", "bad.toml"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        skalab(&["run", "--config", "absent.toml"], dir.path()).status.code(),
        Some(4)
    );
    assert_eq!(
        skalab(&["run", "--epsilon", "2", "--out", "x"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn empty_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = skalab(&["run", "--trials", "0", "--variant", "A", "--out", "e"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("runs=0"));
    assert_eq!(
        fs::read_to_string(dir.path().join("e/runs.csv"))
            .unwrap()
            .lines()
            .count(),
        1
    );
}

#[test]
fn extractor_commands() {
    let dir = tempfile::tempdir().unwrap();
    let o = skalab(
        &[
            "extractor",
            "verify",
            "--identity",
            "4:3",
            "--k",
            "2",
            "--epsilon",
            "0.1",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS deviation 0 "));
    let o = skalab(
        &[
            "extractor",
            "verify",
            "--constant",
            "4:3:3",
            "--k",
            "2",
            "--epsilon",
            "0.1",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL deviation 7/8"));

    let args = [
        "extractor",
        "build",
        "--n",
        "4",
        "--d",
        "3",
        "--m",
        "4",
        "--epsilon",
        "0.45",
        "--seed",
        "11",
        "--certify",
        "1",
        "--out",
        "t.txt",
    ];
    let o = skalab(&args, dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sha256 f12e3bcce15fa3fd30e9b9813bfefe0b6defce622be19aa603b2686eef23e068"));
    let o = skalab(
        &[
            "extractor",
            "verify",
            "--table",
            "t.txt",
            "--prefix",
            "1",
            "--k",
            "1",
            "--epsilon",
            "0.45",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let o = skalab(
        &[
            "extractor",
            "verify",
            "--table",
            "t.txt",
            "--k",
            "3",
            "--epsilon",
            "0.45",
            "--sampled",
            "5",
        ],
        dir.path(),
    );
    assert!(matches!(o.status.code(), Some(0) | Some(1)));
    assert_eq!(
        skalab(&["extractor", "verify", "--k", "1", "--epsilon", "0.1"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn b_run_with_table_file_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let build = [
        "extractor",
        "build",
        "--n",
        "4",
        "--d",
        "5",
        "--m",
        "4",
        "--epsilon",
        "1/5",
        "--seed",
        "7",
        "--out",
        "e.txt",
    ];
    assert_eq!(skalab(&build, dir.path()).status.code(), Some(0));
    let o = skalab(
        &["run", "--extractor", "e.txt", "--trials", "4", "--out", "withfile"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let o2 = skalab(&["run", "--trials", "4", "--out", "builtin"], dir.path());
    assert_eq!(o2.status.code(), Some(0));
    let read = |d: &str| fs::read(dir.path().join(d).join("report.json")).unwrap();
    assert_eq!(read("withfile"), read("builtin"));

    let o = skalab(&["replay", "withfile/transcripts/run-000000.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("variant B n 4 epsilon 1/5"));
    assert!(text.contains("round 0 Alice "));

    let path = dir.path().join("withfile/transcripts/run-000000.txt");
    let body = fs::read_to_string(&path).unwrap().replace("bits 0", "bits 1");
    fs::write(&path, body).unwrap();
    assert_eq!(
        skalab(&["replay", "withfile/transcripts/run-000000.txt"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(skalab(&["replay", "nowhere.txt"], dir.path()).status.code(), Some(4));
}

#[test]
fn report_rejects_edited_files() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        skalab(&["run", "--trials", "2", "--out", "r"], dir.path())
            .status
            .code(),
        Some(0)
    );
    let path = dir.path().join("r/report.json");
    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, text.replace("\"trials\": 2", "\"trials\": 3")).unwrap();
    assert_eq!(
        skalab(&["report", "r/report.json", "--verify"], dir.path())
            .status
            .code(),
        Some(1)
    );
    fs::write(&path, "{").unwrap();
    assert_eq!(skalab(&["report", "r/report.json"], dir.path()).status.code(), Some(2));
}
