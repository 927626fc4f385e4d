use std::process::{Command, Stdio};

use lsfem::cli::{parse_csv, CSV_HEADER};

fn lsfem() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lsfem"));
    c.stdout(Stdio::null());
    c
}

#[test]
fn uniform_run_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let svg = dir.path().join("out.svg");
    let st = lsfem()
        .args(["--benchmark", "smooth-a1", "--formulation", "weighted", "--degree", "2", "--mode", "uniform"])
        .args(["--levels", "4", "--out-csv"])
        .arg(&csv)
        .arg("--out-svg")
        .arg(&svg)
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));

    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 4);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], Some(i as f64));
        assert!(r[9].is_some() && r[10].is_some());
    }
    assert!(rows[0][11].is_none() && rows[3][11].is_some());

    let pic = std::fs::read_to_string(&svg).unwrap();
    assert!(pic.starts_with("<svg") && pic.trim_end().ends_with("</svg>"));
    for label in ["ls", "eta", "l2u", "h1u", "l2sigma", "wbh2A", "wbh2"] {
        assert!(pic.contains(&format!(">{label}</text>")), "{label}");
    }
    assert_eq!(pic.matches("<polyline").count(), 7);
}

#[test]
fn l2_rows_leave_broken_norms_empty() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("l2.csv");
    let st = lsfem()
        .args(["--benchmark", "singular-r74", "--formulation", "l2", "--degree", "1", "--levels", "3", "--out-csv"])
        .arg(&csv)
        .status()
        .unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let last = text.lines().last().unwrap();
    let cells: Vec<&str> = last.split(',').collect();
    assert_eq!(cells.len(), 17);
    assert_eq!((cells[9], cells[10], cells[15], cells[16]), ("", "", "", ""));
}

#[test]
fn adaptive_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for i in 0..2 {
        let csv = dir.path().join(format!("{i}.csv"));
        let st = lsfem()
            .args(["--benchmark", "lshape-a5", "--formulation", "weighted", "--degree", "3", "--mode", "adaptive"])
            .args(["--levels", "8", "--theta", "0.4", "--out-csv"])
            .arg(&csv)
            .status()
            .unwrap();
        assert!(st.success());
        files.push(std::fs::read(csv).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(parse_csv(std::str::from_utf8(&files[0]).unwrap()).unwrap().len(), 8);
}

#[test]
fn usage_errors_exit_2_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("never.csv");
    let bad: [&[&str]; 5] = [
        &["--formulation", "l2", "--degree", "2"],
        &["--formulation", "weighted", "--degree", "1"],
        &["--benchmark", "nope"],
        &["--theta", "1.5", "--mode", "adaptive"],
        &["--no-such-flag"],
    ];
    for args in bad {
        let out = lsfem().args(args).arg("--out-csv").arg(&csv).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(!csv.exists(), "{args:?}");
    }
}

#[test]
fn solver_failure_exits_1() {
    let out = lsfem()
        .args(["--benchmark", "smooth-a1", "--formulation", "l2", "--degree", "1", "--levels", "3"])
        .args(["--solver", "cg", "--tol", "1e-300"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("conjugate gradient"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let csv = dir.path().join("c.csv");
    std::fs::write(
        &cfg,
        format!(
            "benchmark = \"sanity-laplace\"\nformulation = \"l2\"\ndegree = 1\nlevels = 5\nout-csv = {:?}\n",
            csv.to_str().unwrap()
        ),
    )
    .unwrap();
    let st = lsfem().arg("--config").arg(&cfg).args(["--levels", "3"]).status().unwrap();
    assert!(st.success());
    assert_eq!(parse_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap().len(), 3);

    std::fs::write(&cfg, "levls = 3\n").unwrap();
    let out = lsfem().arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn last_rate(args: &[&str], column: usize) -> f64 {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let out = lsfem().args(args).arg("--out-csv").arg(&csv).output().unwrap();
    assert!(out.status.success());
    let rows = parse_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    rows.last().unwrap()[column].unwrap()
}

#[test]
fn l2_ls_rate_on_smooth_a1() {
    let r = last_rate(&["--benchmark", "smooth-a1", "--formulation", "l2", "--degree", "1", "--levels", "6"], 11);
    assert!((0.9..=1.1).contains(&r), "{r}");
}

#[test]
fn cubic_l2u_rate_on_smooth_a1() {
    let r = last_rate(&["--benchmark", "smooth-a1", "--formulation", "weighted", "--degree", "3", "--levels", "5"], 12);
    assert!((3.6..=4.3).contains(&r), "{r}");
}

#[test]
fn csv_round_trips_every_number() {
    use lsfem::cli::{run, write_csv, Mode, RunConfig};
    use lsfem::problems::BenchmarkName;
    let cfg = RunConfig {
        benchmark: BenchmarkName::DegenerateX43,
        mode: Mode::Adaptive,
        levels: 6,
        ..RunConfig::default()
    };
    let report = run(&cfg).unwrap();
    let rows = parse_csv(&write_csv(&report)).unwrap();
    assert_eq!(rows.len(), report.rows.len());
    for (parsed, r) in rows.iter().zip(&report.rows) {
        let e = &r.errors;
        let mut want = vec![
            Some(e.level as f64),
            Some(e.dofs as f64),
            Some(e.nodes as f64),
            Some(e.h_max),
            Some(e.ls),
            Some(e.eta),
            Some(e.l2_u),
            Some(e.h1_u),
            Some(e.l2_sigma),
            e.wbh2_a,
            e.wbh2,
        ];
        want.extend(r.rates);
        // bitwise equality, not approximate
        assert_eq!(
            parsed.iter().map(|v| v.map(f64::to_bits)).collect::<Vec<_>>(),
            want.iter().map(|v| v.map(f64::to_bits)).collect::<Vec<_>>()
        );
    }
}
