use std::path::Path;
use std::process::{Command, Output};

use fcs_cli::table::Table;
use fcs_cli::CliError;
use fcs_core::config::presets;
use fcs_core::{ConfigFile, FcsError};

fn fcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcs")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, file: &ConfigFile) -> String {
    let path = dir.join(name);
    std::fs::write(&path, file.to_toml()).unwrap();
    path.to_string_lossy().into_owned()
}

fn short_fig4() -> ConfigFile {
    let mut file = presets::fig4();
    file.sweep.as_mut().unwrap().values = vec![300.0, 0.0, 40.0, 150.0];
    file
}

#[test]
fn audit_on_hom_passes() {
    let out = fcs(&["audit", "--builtin", "hom"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(!text.contains("FAIL"));
    assert_eq!(text.matches("PASS").count(), 11, "{text}");
}

#[test]
fn preset_fig4_writes_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = fcs(&["preset", "fig4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("fig4.csv")).unwrap();
    let table = Table::parse_csv(&text).unwrap();
    assert_eq!(table.rows.len(), presets::SWEEP_POINTS);
    for kind in ["boson", "fermion", "dp"] {
        assert!(table.column_index(&format!("W_none3_4_{kind}")).is_some());
        assert!(table.column_index(&format!("W_1in3_{kind}")).is_some());
    }
    // every column is described in the header with a unit
    for c in &table.columns {
        let line = text.lines().find(|l| l.starts_with(&format!("# {}: ", c.name))).unwrap();
        assert!(line.contains('[') && line.contains(']'), "{line}");
    }
    let tau = table.column_index("tau").unwrap();
    assert!(table.rows.windows(2).all(|w| w[0][tau] < w[1][tau]));
    assert_eq!(table.rows.last().unwrap()[tau], 800.0);
}

#[test]
fn sweep_output_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "short.toml", &short_fig4());
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out_dir = dir.path().join(format!("t{threads}"));
        let out = fcs(&["sweep", "--config", &config, "--threads", threads, "--out", out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(out_dir.join("short_sweep.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    // rows keep the order of the configured values
    let table = Table::parse_csv(&String::from_utf8(outputs.remove(0)).unwrap()).unwrap();
    let taus: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
    assert_eq!(taus, vec![300.0, 0.0, 40.0, 150.0]);
    // fermion values are undefined where the two channel-2 packets coincide
    let col = table.column_index("W_1in3_fermion").unwrap();
    assert!(table.rows[1][col].is_nan());
    assert!(table.rows[0][col].is_finite());
}

#[test]
fn overlap_diagnostics_cover_both_limits() {
    let dir = tempfile::tempdir().unwrap();
    let mut file = short_fig4();
    file.sweep.as_mut().unwrap().values = vec![0.0, 600.0];
    let config = write_config(dir.path(), "diag.toml", &file);
    let out = fcs(&["overlaps", "--config", &config, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let table = Table::parse_csv(&std::fs::read_to_string(dir.path().join("diag_overlap_diagnostics.csv")).unwrap()).unwrap();
    let (per, det, flag) = (
        table.column_index("per_I").unwrap(),
        table.column_index("det_I").unwrap(),
        table.column_index("uncorrelated").unwrap(),
    );
    assert!((table.rows[0][per] - 2.0).abs() < 1e-10 && table.rows[0][det].abs() < 1e-10);
    assert_eq!(table.rows[0][flag], 0.0);
    assert!((table.rows[1][per] - 1.0).abs() < 1e-6 && (table.rows[1][det] - 1.0).abs() < 1e-6);
    assert_eq!(table.rows[1][flag], 1.0);
}

#[test]
fn single_writes_a_normalized_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let out = fcs(&["single", "--builtin", "hom", "--kinds", "boson,dp", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = Table::parse_csv(&std::fs::read_to_string(dir.path().join("hom_distribution.csv")).unwrap()).unwrap();
    let names: Vec<&str> = table.columns.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["n1", "n2", "W_boson", "W_dp"]);
    assert_eq!(table.rows.len(), 3);
    let total: f64 = table.rows.iter().map(|r| r[2]).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(dir.path().join("hom_overlaps.toml").exists());
}

#[test]
fn exit_codes_name_the_failure() {
    let dir = tempfile::tempdir().unwrap();
    // missing file and unknown preset are configuration errors
    assert_eq!(fcs(&["sweep", "--config", "/nonexistent/x.toml"]).status.code(), Some(1));
    assert_eq!(fcs(&["preset", "fig9"]).status.code(), Some(1));
    assert_eq!(fcs(&["sweep"]).status.code(), Some(1));
    assert_eq!(fcs(&["sweep", "--builtin", "hom", "--kinds", "anyon"]).status.code(), Some(1));
    std::fs::write(dir.path().join("bad.toml"), "mass = 1\nchannels = []\n").unwrap();
    assert_eq!(fcs(&["single", "--config", dir.path().join("bad.toml").to_str().unwrap()]).status.code(), Some(1));

    // an unreachable convergence tolerance
    let mut file = presets::hom();
    file.quadrature.convergence_tol = 1e-30;
    file.quadrature.max_doublings = 1;
    let config = write_config(dir.path(), "tight.toml", &file);
    let out = fcs(&["single", "--config", &config, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("converge"));

    let consistency = CliError::from(FcsError::Consistency {
        identity: "x".into(),
        residual: 1.0,
        tol: 0.0,
    });
    assert_eq!(consistency.exit_code(), 3);
    assert_eq!(CliError::from(FcsError::InequalityViolation("W(3|3)".into())).exit_code(), 4);
    assert_eq!(fcs(&["--help"]).status.code(), Some(0));
}

#[test]
fn shipped_configs_load_and_match_the_presets() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let hom = ConfigFile::load(root.join("hom.toml")).unwrap();
    let preset = presets::hom();
    assert_eq!(hom.modes, preset.modes);
    assert_eq!(hom.scatterer, preset.scatterer);
    let cavity = ConfigFile::load(root.join("cavity.toml")).unwrap();
    let preset = presets::fig3();
    assert_eq!(cavity.channels, preset.channels);
    assert_eq!(cavity.modes, preset.modes);
    assert_eq!(cavity.scatterer, preset.scatterer);
    assert_eq!(cavity.quadrature, preset.quadrature);
    for file in [hom, cavity] {
        fcs_core::ExperimentConfig::from_file(&file).unwrap();
    }
}
