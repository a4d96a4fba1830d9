use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hopfion::glmap::GLFields;
use hopfion::lattice::io::save_director;
use hopfion::{DirectorField, Grid};
use serde_json::Value;
use tempfile::TempDir;

fn hpfn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpfn"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .env_remove("HPFN_WORKERS")
        .env_remove("HPFN_CONFIG")
        .output()
        .expect("spawn hpfn")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Small Q=1 ansatz, coarse but still resolving the charge.
fn small_hopfion(dir: &Path) -> PathBuf {
    let v = json(&hpfn(dir, &["init", "--name", "q1", "--nodes", "32", "--half-width", "4"]));
    assert_eq!(v["target_charge"], 1);
    PathBuf::from(v["field"].as_str().unwrap())
}

fn vacuum_file(dir: &Path) -> PathBuf {
    let p = dir.join("vacuum.hpfn");
    save_director(&DirectorField::vacuum(Grid::cube(12, 2.0).unwrap()), &p).unwrap();
    p
}

#[test]
fn init_writes_field_and_sidecar() {
    let tmp = TempDir::new().unwrap();
    let v = json(&hpfn(tmp.path(), &["init", "--nodes", "16", "--half-width", "3", "--m", "1", "--k", "-1"]));
    assert_eq!(v["target_charge"], -1);
    assert!(Path::new(v["field"].as_str().unwrap()).exists());
    let side: Value = serde_json::from_str(&std::fs::read_to_string(v["sidecar"].as_str().unwrap()).unwrap()).unwrap();
    assert_eq!(side["ansatz"]["k"], -1);
}

#[test]
fn init_is_deterministic_given_seed() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["--seed", "7", "init", "--nodes", "16", "--half-width", "3", "--perturbation", "0.1"];
    let fa = json(&hpfn(a.path(), &args))["field"].as_str().unwrap().to_string();
    let fb = json(&hpfn(b.path(), &args))["field"].as_str().unwrap().to_string();
    assert_eq!(std::fs::read(fa).unwrap(), std::fs::read(fb).unwrap());
}

#[test]
fn init_rejects_bad_requests() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&hpfn(tmp.path(), &["init", "--m", "0", "--k", "0", "--nodes", "16"])), 1);
    assert_eq!(code(&hpfn(tmp.path(), &["init", "--nodes", "4"])), 1);
    assert_eq!(code(&hpfn(tmp.path(), &["init", "--nodes", "16", "--perturbation", "0.5"])), 1);
}

#[test]
fn charge_of_vacuum_and_hopfion() {
    let tmp = TempDir::new().unwrap();
    let v = json(&hpfn(tmp.path(), &["charge", vacuum_file(tmp.path()).to_str().unwrap()]));
    assert_eq!(v["q_rounded"], 0);
    assert_eq!(v["q_whitehead"], 0.0);

    let v = json(&hpfn(tmp.path(), &["charge", small_hopfion(tmp.path()).to_str().unwrap()]));
    assert_eq!(v["q_rounded"], 1);
    assert_eq!(v["q_linking"], 1);
}

#[test]
fn corrupted_and_missing_files_are_io_errors() {
    let tmp = TempDir::new().unwrap();
    let bad = tmp.path().join("bad.hpfn");
    std::fs::write(&bad, b"HPFX1 not a field").unwrap();
    let out = hpfn(tmp.path(), &["charge", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    assert_eq!(code(&hpfn(tmp.path(), &["charge", "/nonexistent/field.hpfn"])), 3);
}

#[test]
fn vacuum_relaxes_immediately() {
    let tmp = TempDir::new().unwrap();
    let v = json(&hpfn(tmp.path(), &["relax", vacuum_file(tmp.path()).to_str().unwrap()]));
    assert_eq!(v["status"], "Converged");
    assert_eq!(v["steps"], 0);
}

#[test]
fn inconsistent_steps_fail_before_reading_the_field() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "[relax]\nds0 = 0.01\nds_min = 0.02\n").unwrap();
    let out = hpfn(tmp.path(), &["--config", cfg.to_str().unwrap(), "relax", "/nonexistent/field.hpfn"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "[grid]\nnodez = 16\n").unwrap();
    assert_eq!(code(&hpfn(tmp.path(), &["--config", cfg.to_str().unwrap(), "init"])), 1);
}

#[test]
fn relax_logs_monotone_energy_and_resumes() {
    let tmp = TempDir::new().unwrap();
    let field = small_hopfion(tmp.path());
    let v = json(&hpfn(tmp.path(), &["relax", field.to_str().unwrap(), "--max-steps", "20", "--checkpoint-every", "10"]));
    assert_eq!(v["status"], "Running");
    assert_eq!(v["steps"], 20);

    let log = std::fs::read_to_string(v["log"].as_str().unwrap()).unwrap();
    let energies: Vec<f64> = log
        .lines()
        .map(|l| {
            let r: Value = serde_json::from_str(l).unwrap();
            r["e2"].as_f64().unwrap() + r["e4"].as_f64().unwrap()
        })
        .collect();
    assert_eq!(energies.len(), 20);
    assert!(energies.windows(2).all(|w| w[1] <= w[0]));

    let stem = tmp.path().join("relax");
    let v = json(&hpfn(tmp.path(), &["relax", "--resume", stem.to_str().unwrap(), "--max-steps", "25"]));
    assert_eq!(v["steps"], 25);
    let log = std::fs::read_to_string(v["log"].as_str().unwrap()).unwrap();
    assert_eq!(log.lines().count(), 25);
}

#[test]
fn resume_with_other_couplings_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let field = vacuum_file(tmp.path());
    json(&hpfn(tmp.path(), &["relax", field.to_str().unwrap()]));
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "[couplings]\na = 2.0\nb = 1.0\n").unwrap();
    let stem = tmp.path().join("relax");
    let out = hpfn(tmp.path(), &["--config", cfg.to_str().unwrap(), "relax", "--resume", stem.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn trace_closes_and_links() {
    let tmp = TempDir::new().unwrap();
    let field = small_hopfion(tmp.path());
    let v = json(&hpfn(tmp.path(), &["trace", field.to_str().unwrap(), "--value", "0,0,-1"]));
    assert_eq!(v["lines"][0]["closed"], true);
    assert!(v["linking"].is_null());
    let csv = std::fs::read_to_string(v["lines"][0]["csv"].as_str().unwrap()).unwrap();
    assert!(csv.lines().count() > 10);

    let v = json(&hpfn(
        tmp.path(),
        &["trace", field.to_str().unwrap(), "--value", "0.598,0,-0.801", "--value", "-0.598,0,-0.801", "--name", "pair"],
    ));
    assert_eq!(v["linking"], 1);
    let vtk = std::fs::read_to_string(v["vtk"].as_str().unwrap()).unwrap();
    assert!(vtk.starts_with("# vtk DataFile"));
}

#[test]
fn trace_in_vacuum_finds_no_preimage() {
    let tmp = TempDir::new().unwrap();
    let out = hpfn(tmp.path(), &["trace", vacuum_file(tmp.path()).to_str().unwrap(), "--value", "0,0,-1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no node"));
}

#[test]
fn trace_rejects_malformed_values() {
    let tmp = TempDir::new().unwrap();
    let field = vacuum_file(tmp.path());
    assert_eq!(code(&hpfn(tmp.path(), &["trace", field.to_str().unwrap(), "--value", "1,2"])), 1);
    assert_eq!(code(&hpfn(tmp.path(), &["trace", field.to_str().unwrap()])), 1);
}

#[test]
fn export_roundtrip_is_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let field = small_hopfion(tmp.path());
    let v = json(&hpfn(tmp.path(), &["export", field.to_str().unwrap(), "--format", "hpfn", "--name", "copy"]));
    let copy = v["output"].as_str().unwrap();
    assert_eq!(std::fs::read(&field).unwrap(), std::fs::read(copy).unwrap());
}

#[test]
fn export_vtk_and_csv() {
    let tmp = TempDir::new().unwrap();
    let field = vacuum_file(tmp.path());
    let v = json(&hpfn(tmp.path(), &["export", field.to_str().unwrap(), "--format", "vtk"]));
    let vtk = std::fs::read_to_string(v["output"].as_str().unwrap()).unwrap();
    assert!(vtk.contains("DIMENSIONS 12 12 12"));
    let v = json(&hpfn(tmp.path(), &["export", field.to_str().unwrap(), "--format", "csv"]));
    let csv = std::fs::read_to_string(v["output"].as_str().unwrap()).unwrap();
    assert_eq!(csv.lines().count(), 1 + 12 * 12 * 12);
    assert!(csv.starts_with("i,j,k,x,y,z,c0,c1,c2"));
}

#[test]
fn export_rejects_unknown_format() {
    let tmp = TempDir::new().unwrap();
    let field = vacuum_file(tmp.path());
    assert_eq!(code(&hpfn(tmp.path(), &["export", field.to_str().unwrap(), "--format", "png"])), 1);
}

#[test]
fn glcheck_vacuum_random_and_vortex() {
    let tmp = TempDir::new().unwrap();
    let grid = Grid::periodic_cube(12, 4.0).unwrap();
    let vac = tmp.path().join("gl_vacuum.hpfn");
    GLFields::vacuum(grid).to_raw().save(&vac).unwrap();
    let v = json(&hpfn(tmp.path(), &["glcheck", vac.to_str().unwrap()]));
    assert_eq!(v[0]["report"]["rel_diff"], 0.0);

    let v = json(&hpfn(tmp.path(), &["--seed", "3", "glcheck", "--random", "1"]));
    assert!(v[0]["report"]["rel_diff"].as_f64().unwrap() <= 1e-3);

    let mut f = GLFields::vacuum(grid);
    f.psi1.data[100] = Default::default();
    let vortex = tmp.path().join("gl_vortex.hpfn");
    f.to_raw().save(&vortex).unwrap();
    let out = hpfn(tmp.path(), &["glcheck", vortex.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("vortex"));
}

#[test]
fn workers_flag_and_env() {
    let tmp = TempDir::new().unwrap();
    let field = vacuum_file(tmp.path());
    assert_eq!(code(&hpfn(tmp.path(), &["--workers", "0", "charge", field.to_str().unwrap()])), 1);
    let out = Command::new(env!("CARGO_BIN_EXE_hpfn"))
        .args(["--out", tmp.path().to_str().unwrap(), "charge", field.to_str().unwrap()])
        .env("HPFN_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(json(&out)["q_rounded"], 0);
}

#[test]
fn usage_errors_exit_with_one() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&hpfn(tmp.path(), &["frobnicate"])), 1);
    assert_eq!(code(&hpfn(tmp.path(), &["relax"])), 1);
    assert_eq!(code(&hpfn(tmp.path(), &["--help"])), 0);
}
