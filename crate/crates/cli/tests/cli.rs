use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const DEPHASING: &str = r#"
[model]
kind = "dephasing"
g = 1.0
a = 1.0

[preparation1]
type = "identity"

[preparation2]
type = "rotation"
axis = [1.0, 0.0, 0.0]
angle = 1.5707963267948966

[grid]
t_start = 0.0
t_end = 6.283185307179586
n_points = 200
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nmwitness"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn parse_csv(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn dephasing_scan_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "dephasing.toml", DEPHASING);
    let out_path = dir.path().join("scan.csv");
    let out = run(&["scan", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,D,N_fd,N_analytic,M,C,slack,degenerate");
    let rows = parse_csv(&text);
    assert_eq!(rows.len(), 200);
    let mut any_positive = false;
    for row in &rows {
        assert_eq!(row.len(), 8);
        assert_eq!(row[3], "NA");
        assert_eq!(row[7], "true");
        let n: f64 = row[2].parse().unwrap();
        let slack: f64 = row[6].parse().unwrap();
        any_positive |= n > 0.0;
        assert!(slack >= -1e-6);
        // 12 significant digits
        let mantissa = row[2].split('e').next().unwrap();
        assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 12);
    }
    assert!(any_positive);
    let log = String::from_utf8(out.stderr).unwrap();
    assert!(log.contains("non-Markovian detected: true"));
}

#[test]
fn scan_to_stdout_without_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "dephasing.toml", &DEPHASING.replace("n_points = 200", "n_points = 3"));
    let out = run(&["scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);
}

#[test]
fn zero_coupling_scan_is_all_zero() {
    let dir = TempDir::new().unwrap();
    let text = DEPHASING.replace("g = 1.0", "g = 0.0").replace("n_points = 200", "n_points = 7");
    let cfg = write(dir.path(), "h0.toml", &text);
    let out = run(&["scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    for row in parse_csv(&String::from_utf8(out.stdout).unwrap()) {
        for k in [2, 4, 5] {
            let v: f64 = row[k].parse().unwrap();
            assert!(v.abs() < 1e-9, "{row:?}");
        }
    }
}

#[test]
fn scan_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let text = "seed = 5\n[model]\nkind = \"random\"\n[preparation1]\ntype = \"identity\"\n[preparation2]\ntype = \"basis\"\nindex = 1\n[grid]\nt_start = -1.0\nt_end = 2.0\nn_points = 31\n";
    let cfg = write(dir.path(), "r.toml", text);
    let a = run(&["scan", "--config", cfg.to_str().unwrap(), "--seed", "9"]);
    let b = run(&["scan", "--config", cfg.to_str().unwrap(), "--seed", "9"]);
    let c = run(&["scan", "--config", cfg.to_str().unwrap(), "--seed", "10"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn invalid_configs_exit_one() {
    let dir = TempDir::new().unwrap();
    let neg_h = write(dir.path(), "neg.toml", &(DEPHASING.to_string() + "\n[witness]\nh = -1e-5\n"));
    assert_eq!(code(&run(&["scan", "--config", neg_h.to_str().unwrap()])), 1);
    let unknown = write(dir.path(), "unk.toml", &(DEPHASING.to_string() + "\ncolour = 1\n"));
    assert_eq!(code(&run(&["scan", "--config", unknown.to_str().unwrap()])), 1);
    let missing = dir.path().join("nope.toml");
    let out = run(&["scan", "--config", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read config"));
    let cfg = write(dir.path(), "dephasing.toml", DEPHASING);
    assert_eq!(code(&run(&["scan", "--config", cfg.to_str().unwrap(), "--h", "0"])), 1);
    assert_eq!(code(&run(&["scan"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
}

#[test]
fn file_model_with_short_schedule_fails_coverage() {
    let dir = TempDir::new().unwrap();
    let mut state = String::from("4 2 2\n");
    let mut ham = String::from("4 2 2\nsegment 0 1\n");
    for i in 0..4 {
        for j in 0..4 {
            state += &format!("{i} {j} {} 0\n", if i == j { 0.25 } else { 0.0 });
            ham += &format!("{i} {j} {} 0\n", if i + j == 3 { 1.0 } else { 0.0 });
        }
    }
    write(dir.path(), "state.txt", &state);
    write(dir.path(), "ham.txt", &ham);
    let base = "[model]\nkind = \"file\"\nstate = \"state.txt\"\nhamiltonian = \"ham.txt\"\n[preparation1]\ntype = \"identity\"\n[preparation2]\ntype = \"basis\"\nindex = 0\n";
    let ok = write(dir.path(), "ok.toml", &(base.to_string() + "[grid]\nt_start = 0.0\nt_end = 0.5\nn_points = 3\n"));
    let out = run(&["scan", "--config", ok.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let long = write(dir.path(), "long.toml", &(base.to_string() + "[grid]\nt_start = 0.0\nt_end = 2.0\nn_points = 3\n"));
    let out = run(&["scan", "--config", long.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not cover"));
}

#[test]
fn check_contractivity_suite() {
    let out = run(&["check", "--suite", "contractivity", "--n", "200", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().contains("200/200"));
}

#[test]
fn check_exit_codes() {
    assert_eq!(code(&run(&["check", "--suite", "all", "--n", "0"])), 0);
    assert_eq!(code(&run(&["check", "--suite", "everything", "--n", "1"])), 1);
    let corrupted = run(&["check", "--suite", "inequality", "--n", "40", "--seed", "7", "--corrupt-mu"]);
    assert_ne!(code(&corrupted), 0);
    assert!(String::from_utf8(corrupted.stdout).unwrap().contains("FAIL"));
    assert_eq!(code(&run(&["check", "--suite", "inequality", "--n", "40", "--seed", "7"])), 0);
}

#[test]
fn search_reports() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "dephasing.toml", DEPHASING);
    let out = run(&["search", "--config", cfg.to_str().unwrap(), "--budget", "2000", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let value = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(key)).unwrap();
        line.rsplit(' ').next().unwrap().parse().unwrap()
    };
    let best = value("best N_fd:");
    assert!(best >= 0.95, "{text}");
    assert!(best <= value("C at best pair:") + 1e-6);
    assert!(text.contains("P1: axis = [") && text.contains("P2: axis = ["));
    let again = run(&["search", "--config", cfg.to_str().unwrap(), "--budget", "2000", "--seed", "1"]);
    assert_eq!(again.stdout, text.as_bytes());

    assert_eq!(code(&run(&["search", "--config", cfg.to_str().unwrap(), "--budget", "0"])), 1);

    let h0 = write(dir.path(), "h0.toml", &DEPHASING.replace("g = 1.0", "g = 0.0"));
    let out = run(&["search", "--config", h0.to_str().unwrap(), "--budget", "30"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let best: f64 = text.lines().find(|l| l.starts_with("best")).unwrap().rsplit(' ').next().unwrap().parse().unwrap();
    assert!(best <= 1e-6);
}

#[test]
fn version_subcommand() {
    let out = run(&["version"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), format!("nmwitness {}", env!("CARGO_PKG_VERSION")));
}

#[test]
fn tight_bell_scan_reports_slack_violations() {
    // Bell state under σz⊗σz + σx⊗I: D = 0 at every grid time, so N_fd = D(h)/h
    // overshoots C by a term of order h that exceeds the default tolerance.
    let dir = TempDir::new().unwrap();
    let mut state = String::from("4 2 2\n");
    let mut ham = String::from("4 2 2\nsegment -inf inf\n");
    let zz = [1.0, -1.0, -1.0, 1.0];
    for (i, zz_i) in zz.iter().enumerate() {
        for j in 0..4usize {
            let bell = if (i == 0 || i == 3) && (j == 0 || j == 3) { 0.5 } else { 0.0 };
            state += &format!("{i} {j} {bell} 0\n");
            let h = if i == j { *zz_i } else if i ^ j == 2 { 1.0 } else { 0.0 };
            ham += &format!("{i} {j} {h} 0\n");
        }
    }
    write(dir.path(), "bell.txt", &state);
    write(dir.path(), "ham.txt", &ham);
    let text = "[model]\nkind = \"file\"\nstate = \"bell.txt\"\nhamiltonian = \"ham.txt\"\n[preparation1]\ntype = \"identity\"\n[preparation2]\ntype = \"rotation\"\naxis = [1.0, 0.0, 0.0]\nangle = 1.5707963267948966\n[grid]\nt_start = 0.0\nt_end = 1.0\nn_points = 5\n";
    let cfg = write(dir.path(), "tight.toml", text);
    let out = run(&["scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stderr).unwrap().contains("slack violations: 3"));
    for row in parse_csv(&String::from_utf8(out.stdout).unwrap()) {
        let slack: f64 = row[6].parse().unwrap();
        assert!(slack > -1e-4, "{row:?}");
    }
    // the overshoot shrinks with h
    let out = run(&["scan", "--config", cfg.to_str().unwrap(), "--h", "1e-8"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}
