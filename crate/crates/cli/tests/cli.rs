use std::path::Path;
use std::process::{Command, Output};

fn socdist(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_socdist"))
        .args(args)
        .current_dir(dir)
        .env_remove("SOC_THREADS")
        .output()
        .expect("run socdist")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Splits one CSV line, honouring double-quoted fields.
fn split_csv(line: &str) -> Vec<String> {
    let mut fields = vec![String::new()];
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if quoted && chars.peek() == Some(&'"') => {
                chars.next();
                fields.last_mut().unwrap().push('"');
            }
            '"' => quoted = !quoted,
            ',' if !quoted => fields.push(String::new()),
            _ => fields.last_mut().unwrap().push(c),
        }
    }
    fields
}

/// Rows of a CSV as `(header, rows)`.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = split_csv(lines.next().unwrap());
    (header, lines.map(split_csv).collect())
}

fn field(text: &str, column: &str, row: usize) -> f64 {
    let (header, rows) = csv(text);
    let i = header.iter().position(|h| h == column).unwrap();
    rows[row][i].parse().unwrap()
}

#[test]
fn moment_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&socdist(
        &["moment", "--n", "1", "--M", "1", "--s", "1"],
        dir.path(),
    ));
    assert!((field(&out, "exact", 0) - 3.0).abs() < 1e-13);
    let out = stdout(&socdist(
        &["moment", "--n", "0", "--M", "5", "--s", "0"],
        dir.path(),
    ));
    assert!((field(&out, "exact", 0) - 1.0).abs() < 1e-12);
    let out = stdout(&socdist(
        &["moment", "--n", "1", "--M", "10000", "--s", "1"],
        dir.path(),
    ));
    assert!((0.99..=1.01).contains(&field(&out, "ratio", 0)));
}

#[test]
fn several_exponents_give_several_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&socdist(
        &["moment", "--n", "1", "--M", "1", "--s", "1,2,-0.5"],
        dir.path(),
    ));
    let (header, rows) = csv(&out);
    assert_eq!(header, ["n", "M", "s", "exact", "asymptotic", "ratio"]);
    assert_eq!(rows.len(), 3);
    assert!((field(&out, "exact", 1) - 10.0).abs() < 1e-12);
}

#[test]
fn precondition_violations_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["moment", "--n", "1", "--M", "1", "--s", "-2"][..],
        &["moment", "--n", "1"][..],
        &["moment", "--bogus"][..],
        &["dist", "--n", "1", "--M", "0"][..],
        &["density", "--n", "0"][..],
        &[
            "dist", "--n", "1", "--M", "2", "--x-min", "-1", "--x-max", "3",
        ][..],
        &[][..],
    ] {
        let out = socdist(args, dir.path());
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = Command::new(env!("CARGO_BIN_EXE_socdist"))
        .args(["moment", "--n", "1", "--M", "1", "--s", "1"])
        .env("SOC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = socdist(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("--contour-c"));
}

#[test]
fn dumped_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "dist",
        "--n",
        "2",
        "--M",
        "3",
        "--x-points",
        "40",
        "--x-max",
        "30.5",
        "--contour-c",
        "0.75",
    ];
    let direct = stdout(&socdist(&args, dir.path()));
    let mut dump_args = args.to_vec();
    dump_args.push("--dump-config");
    let dumped = stdout(&socdist(&dump_args, dir.path()));
    std::fs::write(dir.path().join("run.conf"), &dumped).unwrap();
    let replay = stdout(&socdist(&["--config", "run.conf"], dir.path()));
    assert_eq!(direct, replay);
    // dumping the replayed config is a fixed point
    let again = stdout(&socdist(
        &["--config", "run.conf", "--dump-config"],
        dir.path(),
    ));
    assert_eq!(dumped, again);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.conf"),
        "command = moment\nn = 3\nM = 2\ns = 1\n",
    )
    .unwrap();
    let out = stdout(&socdist(
        &["--config", "c.conf", "--n", "1", "--M", "1"],
        dir.path(),
    ));
    assert!((field(&out, "exact", 0) - 3.0).abs() < 1e-13);
    std::fs::write(dir.path().join("bad.conf"), "colour = blue\n").unwrap();
    assert_eq!(
        socdist(&["moment", "--config", "bad.conf"], dir.path())
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn json_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["moment", "--n", "2", "--M", "4", "--s", "0.5,1.5"];
    let text = stdout(&socdist(&args, dir.path()));
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&socdist(&json_args, dir.path()))).unwrap();
    let (header, rows) = csv(&text);
    assert_eq!(json.as_array().unwrap().len(), rows.len());
    for (r, row) in rows.iter().enumerate() {
        for (h, cell) in header.iter().zip(row) {
            let v = &json[r][h];
            let as_float: f64 = cell.parse().unwrap();
            assert_eq!(v.as_f64().unwrap(), as_float, "{h}");
        }
    }
}

#[test]
fn output_file_and_thread_cap_do_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["dist", "--n", "1", "--M", "4", "--x-points", "60"];
    let default = stdout(&socdist(&args, dir.path()));
    let capped = Command::new(env!("CARGO_BIN_EXE_socdist"))
        .args(args)
        .args(["--output", "capped.csv"])
        .env("SOC_THREADS", "1")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(capped.status.success());
    assert_eq!(
        std::fs::read_to_string(dir.path().join("capped.csv")).unwrap(),
        default
    );
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sample",
        "--n",
        "1",
        "--M",
        "3",
        "--samples",
        "40",
        "--chains",
        "2",
        "--burn-in",
        "200",
    ];
    let a = stdout(&socdist(&args, dir.path()));
    let b = stdout(&socdist(&args, dir.path()));
    assert_eq!(a, b);
    let (header, rows) = csv(&a);
    assert_eq!(header.len(), 3);
    assert_eq!(rows.len(), 40);
    let mut other = args.to_vec();
    other.extend(["--seed", "7"]);
    assert_ne!(a, stdout(&socdist(&other, dir.path())));
}

#[test]
fn tail_and_density_commands() {
    let dir = tempfile::tempdir().unwrap();
    let tail = stdout(&socdist(&["tail", "--n", "1", "--M", "6"], dir.path()));
    let (header, rows) = csv(&tail);
    assert!(header.contains(&"tail_probability".to_string()));
    assert!(!rows.is_empty());
    let dens = stdout(&socdist(
        &["density", "--n", "2", "--theta-points", "10"],
        dir.path(),
    ));
    let (header, rows) = csv(&dens);
    assert_eq!(header, ["theta", "n2"]);
    assert_eq!(rows.len(), 10);
}

#[test]
fn quick_verification_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = socdist(&["verify", "--quick"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let (header, rows) = csv(&String::from_utf8(out.stdout).unwrap());
    let passed = header.iter().position(|h| h == "passed").unwrap();
    assert!(rows.iter().all(|r| r[passed] == "true"));
}
