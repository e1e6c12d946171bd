use std::path::Path;
use std::process::{Command, Output};

fn ztnd(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ztnd"))
        .args(args)
        .arg("--output")
        .arg(out)
        .env_remove("ZTND_SEED")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Rows of a CSV file as (header, records).
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn summary_field(dir: &Path, model: &str, field: &str) -> String {
    let (header, rows) = read_csv(&dir.join("summary.csv"));
    let col = header.iter().position(|h| h == field).unwrap();
    let mcol = header.iter().position(|h| h == "model").unwrap();
    rows.iter().find(|r| r[mcol] == model).unwrap()[col].clone()
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = ztnd(&["run", "--scenario", "example1", "--model", "aztnd"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["trace.csv", "summary.csv", "residual.svg"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    assert_eq!(summary_field(dir.path(), "aztnd", "classification"), "negligible");

    let (header, rows) = read_csv(&dir.path().join("trace.csv"));
    assert_eq!(
        header,
        ["t", "z_1", "z_2", "residual_norm", "solution_error", "xi", "kappa"]
    );
    assert_eq!(rows.len(), 1001);
    let text = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(!text.contains('\r'));
    let svg = std::fs::read_to_string(dir.path().join("residual.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}

#[test]
fn baseline_trace_leaves_coefficients_blank() {
    let dir = tempfile::tempdir().unwrap();
    let o = ztnd(&["run", "--model", "oznn", "--horizon", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = read_csv(&dir.path().join("trace.csv"));
    assert!(rows.iter().all(|r| r[5].is_empty() && r[6].is_empty()));
}

// 0.4t noise makes the baseline residual grow, but only by a factor of
// about four over the tail window, short of the tenfold growth the
// classifier requires to call a run divergent
#[test]
fn linear_noise_baseline_grows() {
    let dir = tempfile::tempdir().unwrap();
    let o = ztnd(
        &[
            "run",
            "--scenario",
            "example1",
            "--model",
            "gnn",
            "--noise",
            "linear",
            "--slope",
            "0.4",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = read_csv(&dir.path().join("trace.csv"));
    let residual = |r: &Vec<String>| r[3].parse::<f64>().unwrap();
    assert!(residual(&rows[rows.len() - 1]) > 2.0 * residual(&rows[800]));
    assert_ne!(summary_field(dir.path(), "gnn", "classification"), "negligible");
}

#[test]
fn unknown_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = ztnd(&["run", "--set", "modle=gnn"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("modle"));

    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "scenario = example1\nmodle = gnn\n").unwrap();
    let o = ztnd(&["run", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("modle"));
}

#[test]
fn bad_value_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let o = ztnd(&["run", "--step", "abc"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("step"));
    let o = ztnd(&["run", "--model", "hopfield"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("hopfield"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# noise-free baseline\nmodel = gnn\nhorizon = 2\n").unwrap();
    let o = ztnd(&["run", "-c", cfg.to_str().unwrap(), "--model", "oznn"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = read_csv(&dir.path().join("summary.csv"));
    assert_eq!(rows[0][1], "oznn");
    let (_, trace) = read_csv(&dir.path().join("trace.csv"));
    assert_eq!(trace.len(), 201);
}

#[test]
fn compare_needs_two_models() {
    let dir = tempfile::tempdir().unwrap();
    let o = ztnd(&["compare", "--models", "aztnd"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("at least two"));
    let o = ztnd(&["compare", "--models", "gnn,gnn"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn compare_constant_noise() {
    let dir = tempfile::tempdir().unwrap();
    let o = ztnd(
        &[
            "compare",
            "--models",
            "aztnd,gnn,ptcznn,ncznn",
            "--noise",
            "constant",
            "--level",
            "5",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("mssre"));
    assert_eq!(summary_field(dir.path(), "aztnd", "classification"), "negligible");
    for m in ["gnn", "ptcznn", "ncznn"] {
        assert_eq!(summary_field(dir.path(), m, "classification"), "bounded", "{m}");
    }
    let (header, rows) = read_csv(&dir.path().join("compare.csv"));
    assert_eq!(
        header,
        [
            "t",
            "residual_aztnd",
            "residual_gnn",
            "residual_ptcznn",
            "residual_ncznn"
        ]
    );
    assert_eq!(rows.len(), 1001);
    // the predefined-time model stops short of t_c, leaving its last cell blank
    assert!(rows[1000][3].is_empty());
    assert!(!rows[1000][1].is_empty());
    assert!(dir.path().join("compare.svg").is_file());
}

#[test]
fn compare_is_order_independent() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |models| vec!["compare", "--models", models, "--horizon", "2"];
    assert_eq!(ztnd(&args("aztnd,oznn"), a.path()).status.code(), Some(0));
    assert_eq!(ztnd(&args("oznn,aztnd"), b.path()).status.code(), Some(0));
    let col = |dir: &Path, name: &str| {
        let (h, rows) = read_csv(&dir.join("compare.csv"));
        let c = h.iter().position(|x| x == name).unwrap();
        rows.into_iter().map(|r| r[c].clone()).collect::<Vec<_>>()
    };
    for m in ["residual_aztnd", "residual_oznn"] {
        assert_eq!(col(a.path(), m), col(b.path(), m));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["run", "--noise", "random", "--seed", "7", "--horizon", "3"];
    assert_eq!(ztnd(&args, a.path()).status.code(), Some(0));
    assert_eq!(ztnd(&args, b.path()).status.code(), Some(0));
    for f in ["trace.csv", "summary.csv", "residual.svg"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn seed_from_environment() {
    let read_init = |env: Option<&str>, dir: &Path| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ztnd"));
        cmd.args(["run", "--horizon", "0.1", "--output"]).arg(dir);
        match env {
            Some(v) => cmd.env("ZTND_SEED", v),
            None => cmd.env_remove("ZTND_SEED"),
        };
        assert_eq!(cmd.output().unwrap().status.code(), Some(0));
        read_csv(&dir.join("trace.csv")).1[0][1].clone()
    };
    let d = tempfile::tempdir().unwrap();
    let default = read_init(None, d.path());
    let env5 = read_init(Some("5"), d.path());
    assert_ne!(default, env5);
    let o = ztnd(&["run", "--horizon", "0.1", "--seed", "5"], d.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_csv(&d.path().join("trace.csv")).1[0][1], env5);
}

#[test]
fn runtime_termination_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = ztnd(
        &[
            "run",
            "--model",
            "oznn",
            "--method",
            "euler",
            "--step",
            "0.5",
            "--horizon",
            "50",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(summary_field(dir.path(), "oznn", "terminated"), "diverged");
    assert_eq!(summary_field(dir.path(), "oznn", "classification"), "divergent");

    let o = ztnd(&["run", "--model", "ptcznn"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("predefined_time_exceeded"));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let o = ztnd(&["run", "--horizon", "0.1"], &blocker);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("file"));
}

#[test]
fn aoa_tracks_target() {
    let dir = tempfile::tempdir().unwrap();
    let o = ztnd(&["aoa", "--model", "aztnd"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = read_csv(&dir.path().join("trajectory.csv"));
    assert_eq!(header, ["t", "truth_x", "truth_y", "est_x", "est_y", "position_error"]);
    let tail_max = rows[800..]
        .iter()
        .map(|r| r[5].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(tail_max < 1e-4, "{tail_max}");
    for f in ["trajectory.svg", "error.svg", "summary.csv"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
}

#[test]
fn aoa_start_on_truth() {
    let dir = tempfile::tempdir().unwrap();
    for model in ["aztnd", "oznn"] {
        let o = ztnd(&["aoa", "--model", model, "--init", "2,2"], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let (_, rows) = read_csv(&dir.path().join("trajectory.csv"));
        assert!(rows.iter().all(|r| r[5].parse::<f64>().unwrap() < 1e-6), "{model}");
    }
}

#[test]
fn aoa_rejects_bad_geometry_and_models() {
    let dir = tempfile::tempdir().unwrap();
    let o = ztnd(&["aoa", "--set", "aoa.stations=-5,2;5,2"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("parallel") || stderr(&o).contains("geometry"));
    let o = ztnd(&["aoa", "--set", "aoa.stations=1,-1;5,-1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = ztnd(&["aoa", "--model", "gnn"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    let o = Command::new(env!("CARGO_BIN_EXE_ztnd")).arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_ztnd"))
        .arg("frobnicate")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
