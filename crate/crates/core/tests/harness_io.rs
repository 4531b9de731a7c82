mod common;

use std::fs;
use std::path::Path;

use common::{noisy_state, rng};
use fkgs::harness::output::{
    read_bench, read_diagnostics, read_error_table, read_fields, read_metadata, write_fields,
};
use fkgs::harness::{
    invariant_series, run_cli, spatial_error_table, temporal_error_table, ExampleKind, RunConfig,
};
use fkgs::{GridSpec, SchemeKind};

fn cli(args: &[&str]) -> i32 {
    let mut argv = vec!["fkgs"];
    argv.extend_from_slice(args);
    run_cli(argv)
}

fn small_ex41(out: &Path) -> Vec<String> {
    [
        "--example",
        "ex41",
        "--n",
        "32",
        "--tau",
        "0.01",
        "--t-final",
        "0.1",
        "--alpha",
        "1.7",
        "--beta",
        "1.7",
        "--out",
    ]
    .iter()
    .map(|s| s.to_string())
    .chain([out.display().to_string()])
    .collect()
}

fn with(cmd: &str, rest: &[String], extra: &[&str]) -> i32 {
    let mut args: Vec<&str> = vec![cmd];
    args.extend(rest.iter().map(String::as_str));
    args.extend_from_slice(extra);
    cli(&args)
}

#[test]
fn help_and_bad_arguments() {
    assert_eq!(cli(&["--help"]), 0);
    assert_eq!(cli(&["run", "--help"]), 0);
    assert_ne!(cli(&[]), 0);
    assert_ne!(cli(&["run", "--no-such-flag"]), 0);
    assert_ne!(cli(&["frobnicate"]), 0);
    let dir = tempfile::tempdir().unwrap();
    let base = small_ex41(dir.path());
    assert_ne!(with("run", &base, &["--alpha", "0.5"]), 0);
    assert_ne!(with("run", &base, &["--scheme", "euler"]), 0);
    assert_ne!(with("run", &base, &["--r", "1.5"]), 0);
    assert_ne!(
        with("run", &base, &["--max-iter", "1", "--tol", "1e-15"]),
        0
    );
}

#[test]
fn run_writes_diagnostics_fields_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        with("run", &small_ex41(dir.path()), &["--scheme", "fpavf-c"]),
        0
    );
    let rows = read_diagnostics(&dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(rows.len(), 11);
    assert_eq!((rows[0].rm, rows[0].rh), (0.0, 0.0));
    for w in rows.windows(2) {
        assert!(w[1].t > w[0].t);
        assert!((w[1].t - w[0].t - 0.01).abs() < 1e-14);
    }
    let text = fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert!(text.starts_with("step,t,mass,energy,rm,rh,iters\n"));

    let meta = read_metadata(&dir.path().join("metadata.toml")).unwrap();
    assert_eq!(meta.scheme, SchemeKind::FpavfC);
    assert_eq!(meta.n, vec![32]);
    let raw = fs::read_to_string(dir.path().join("metadata.toml")).unwrap();
    assert!(raw.contains("u0_variant = \"exact\""));

    let grid = meta.grid().unwrap();
    let snap = read_fields(&dir.path().join("fields.csv"), &grid).unwrap();
    let header = fs::read_to_string(dir.path().join("fields.csv")).unwrap();
    assert!(header.starts_with("x,u,v,p,q,abs_phi\n"));
    assert!(snap.is_finite());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "example = \"ex41\"\nscheme = \"fpavf\"\nn = 16\nbox = [-10.0, 10.0]\ntau = 0.02\nt-final = 0.1\nalpha = 1.5\nbeta = 1.5\nu0-variant = \"printed\"\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let code = cli(&[
        "invariants",
        "--config",
        cfg.to_str().unwrap(),
        "--tau",
        "0.05",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let meta = read_metadata(&out.join("metadata.toml")).unwrap();
    assert_eq!(meta.tau, 0.05);
    assert_eq!(meta.n, vec![16]);
    assert_eq!(meta.bounds, vec![[-10.0, 10.0]]);
    assert_eq!(meta.scheme, SchemeKind::Fpavf);
    assert_eq!(meta.u0_variant.to_string(), "printed");
    assert_eq!(
        read_diagnostics(&out.join("diagnostics.csv"))
            .unwrap()
            .len(),
        3
    );

    fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    assert_ne!(cli(&["run", "--config", cfg.to_str().unwrap()]), 0);
}

#[test]
fn convergence_subcommands_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let base = small_ex41(dir.path());
    assert_eq!(
        with(
            "converge-time",
            &base,
            &["--scheme", "fpavf", "--taus", "0.02,0.01,0.005"]
        ),
        0
    );
    let t = read_error_table(&dir.path().join("errors_time.csv")).unwrap();
    assert_eq!(t.rows.len(), 3);
    assert!(t.rows[0].order.is_none());
    assert!(t.rows[1].order.is_some());
    let text = fs::read_to_string(dir.path().join("errors_time.csv")).unwrap();
    assert!(text.starts_with("tau,error,order\n"));

    assert_eq!(with("converge-space", &base, &["--ns", "8,16"]), 0);
    let s = read_error_table(&dir.path().join("errors_space.csv")).unwrap();
    assert_eq!(s.rows.len(), 2);
    assert_eq!(s.rows[0].param, 8.0);
    assert!(fs::read_to_string(dir.path().join("errors_space.csv"))
        .unwrap()
        .starts_with("n,error,order\n"));

    assert_ne!(with("converge-time", &base, &["--taus", "0.02,0.015"]), 0);
}

#[test]
fn bench_writes_one_row_per_scheme() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(with("bench", &small_ex41(dir.path()), &[]), 0);
    let rows = read_bench(&dir.path().join("bench.csv")).unwrap();
    let names: Vec<_> = rows.iter().map(|r| r.scheme).collect();
    assert_eq!(names, SchemeKind::MAIN.to_vec());
    assert!(rows.iter().all(|r| r.steps == 10 && r.iterations >= 10));
}

#[test]
fn csv_round_trips_are_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        n: vec![32],
        tau: 0.01,
        t_final: 0.05,
        alpha: 1.4,
        beta: 1.6,
        ..RunConfig::preset(ExampleKind::Ex41)
    };
    let rows = invariant_series(&cfg).unwrap();
    let p = dir.path().join("d.csv");
    fkgs::harness::output::write_diagnostics(&p, &rows).unwrap();
    assert_eq!(read_diagnostics(&p).unwrap(), rows);

    let table = temporal_error_table(&cfg, &[0.01, 0.005]).unwrap();
    fkgs::harness::output::write_error_table(&p, &table).unwrap();
    assert_eq!(read_error_table(&p).unwrap(), table);

    let table = spatial_error_table(&cfg, &[8, 16]).unwrap();
    fkgs::harness::output::write_error_table(&p, &table).unwrap();
    assert_eq!(read_error_table(&p).unwrap(), table);

    for g in [
        GridSpec::line(-1.0, 2.0, 12).unwrap(),
        GridSpec::new(&[(0.0, 1.0, 8), (-3.0, 3.0, 6)]).unwrap(),
    ] {
        let s = noisy_state(&g, &mut rng(5), 3.0);
        write_fields(&p, &s).unwrap();
        assert_eq!(read_fields(&p, &g).unwrap(), s);
        let other = GridSpec::line(-1.0, 2.0, 10).unwrap();
        assert!(read_fields(&p, &other).is_err());
    }
}

#[test]
fn custom_example_restarts_from_a_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let base = small_ex41(&first);
    assert_eq!(with("run", &base, &[]), 0);
    let snap = first.join("fields.csv");
    let second = dir.path().join("b");
    let code = cli(&[
        "run",
        "--example",
        "custom",
        "--init",
        snap.to_str().unwrap(),
        "--n",
        "32",
        "--tau",
        "0.01",
        "--t-final",
        "0.1",
        "--alpha",
        "1.7",
        "--beta",
        "1.7",
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let a = read_diagnostics(&first.join("diagnostics.csv")).unwrap();
    let b = read_diagnostics(&second.join("diagnostics.csv")).unwrap();
    // the restart starts where the first run ended
    assert_eq!(b[0].mass, a.last().unwrap().mass);
    assert!((b[0].energy - a.last().unwrap().energy).abs() < 1e-12);
    // a snapshot on the wrong grid is refused
    assert_ne!(
        cli(&[
            "run",
            "--example",
            "custom",
            "--init",
            snap.to_str().unwrap(),
            "--n",
            "16"
        ]),
        0
    );
}
