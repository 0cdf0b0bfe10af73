use std::fs;
use std::path::Path;
use std::process::Command as Process;

use proptest::prelude::*;
use stringbreak::cli::{help_text, parse_args, schemas, Command, Invocation, RunConfig, SchemaContext};

fn run(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_stringbreak"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn help_lists_every_command() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for c in Command::ALL {
        assert!(text.contains(c.name()), "{}", c.name());
    }
    for (k, _) in RunConfig::KEYS {
        assert!(text.contains(k));
    }
}

#[test]
fn command_help_shows_schemas() {
    for c in Command::ALL {
        let text = help_text(Some(c));
        for s in schemas(c) {
            assert!(text.contains(s.file) && text.contains(s.pattern));
        }
    }
}

#[test]
fn invalid_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    assert_eq!(run(&["nosuch"]).status.code(), Some(1));
    assert_eq!(run(&["g0", &format!("--output={out_dir}"), "--xi=-1"]).status.code(), Some(1));
    assert_eq!(run(&["g0", "--config", "/nonexistent/file.cfg"]).status.code(), Some(1));
    assert_eq!(run(&["g0", "--unknown_key=3"]).status.code(), Some(1));
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# g = 0 energetics\ncommand=g0\nells=3,4,5\nxi=0.8\n").unwrap();
    let out = dir.path().join("out");
    let status = run(&["--config", cfg.to_str().unwrap(), &format!("--output={}", out.display()), "--xi=1"]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("g0.json")).unwrap()).unwrap();
    assert_eq!(meta["command"], "g0");
    assert_eq!(meta["config"]["xi"], "1");
    assert_eq!(meta["config"]["ells"], "3,4,5");
    let csv = fs::read_to_string(out.join("g0.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "ell,dE,h_c,V_s,V_bs");
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn spectrum_output_is_deterministic_and_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, threads) in ["1", "2"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let status = run(&[
            "spectrum",
            &format!("--output={}", out.display()),
            "--ell=9",
            "--points=7",
            "--levels=3",
            &format!("--threads={threads}"),
        ]);
        assert!(status.status.success());
        files.push(out.join("spectrum.csv"));
    }
    let a = fs::read(&files[0]).unwrap();
    assert_eq!(a, fs::read(&files[1]).unwrap());
    let expected = schemas(Command::Spectrum)[0].header(&SchemaContext::new(9, 3)).join(",");
    assert_eq!(header(&files[0]), expected);
    assert_eq!(fs::read_to_string(&files[0]).unwrap().lines().count(), 8);
}

#[test]
fn ramp_columns_follow_enabled_observables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ramp");
    let status = run(&[
        "ramp",
        &format!("--output={}", out.display()),
        "--ell=3",
        "--tau=2",
        "--final=0.4",
        "--samples=5",
        "--levels=2",
        "--potential=false",
        "--bubbles=false",
    ]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert_eq!(
        header(&out.join("ramp.csv")),
        "t,control,m_z,mz_site_1,mz_site_2,mz_site_3,P_0,P_1,P_beyond,C,E,P_m"
    );
    assert!(!out.join("ramp_bubbles.csv").exists());
}

#[test]
fn parse_args_defaults_to_help() {
    assert_eq!(parse_args(&[]).unwrap(), Invocation::Help(None));
    let args = vec!["crossing".to_string(), "--help".to_string()];
    assert_eq!(parse_args(&args).unwrap(), Invocation::Help(Some(Command::Crossing)));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn config_text_round_trips(
        ell in 1usize..20,
        xi in 0.1f64..5.0,
        g in 0.0f64..3.0,
        tau in 0.5f64..500.0,
        taus in prop::collection::vec(0.5f64..500.0, 1..6),
        step in 1e-4f64..0.1,
        cmd in 0usize..11,
    ) {
        let mut cfg = RunConfig::new(Command::ALL[cmd]);
        cfg.ell = ell;
        cfg.xi = xi;
        cfg.g = g;
        cfg.tau = tau;
        cfg.taus = taus;
        cfg.step_dt = step;
        let back = RunConfig::parse(&cfg.serialize()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
