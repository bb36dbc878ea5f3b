use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use holovortex::{cfld, pgm, Field, Plane};

const BASE: &str = "\
[grid]
n = 128
pitch = 1e-9 m

[beam]
energy = 200e3 eV
waist = 20e-9 m

[hologram]
charge = 2
period = 4e-9 m
depth = 30e-9 m
v_mip = 17 V
";

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("run.ini");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_holovortex"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn assert_error(o: &Output, code: i32, prefix: &str) {
    assert_eq!(o.status.code(), Some(code), "stderr: {}", stderr(o));
    let e = stderr(o);
    assert_eq!(e.lines().count(), 1, "multi-line error: {e}");
    assert!(e.starts_with(prefix), "{e:?} does not start with {prefix:?}");
}

#[test]
fn unitless_dimension_names_field_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &BASE.replace("pitch = 1e-9 m", "pitch = 1e-9"), &["synthesize"]);
    assert_error(&o, 2, "error: grid.pitch: line 3: missing unit suffix");
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &format!("{BASE}depht = 1e-9 m\n"), &["synthesize"]);
    assert_error(&o, 2, "error: hologram.depht: line 14: unknown key");
}

#[test]
fn undersampled_carrier_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &BASE.replace("period = 4e-9 m", "period = 3e-9 m"), &["synthesize"]);
    assert_error(&o, 2, "error: hologram.period: carrier undersampled");
}

#[test]
fn modal_refuses_zero_charge() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &format!("{BASE}[modal]\nm = 0\nz = 1e-3 m\nwaist = 5e-9 m\n"), &["modal"]);
    assert_error(&o, 2, "error: modal.m: line 15:");
}

#[test]
fn missing_input_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), BASE, &["analyze", "--input", "/nonexistent/field.cfld"]);
    assert_error(&o, 1, "error: /nonexistent/field.cfld:");
}

#[test]
fn argument_errors_are_single_line() {
    let o = Command::new(env!("CARGO_BIN_EXE_holovortex"))
        .args(["synthesize", "--bogus"])
        .output()
        .unwrap();
    assert_error(&o, 2, "error: arguments:");
    let o = Command::new(env!("CARGO_BIN_EXE_holovortex")).arg("synthesize").output().unwrap();
    assert_error(&o, 2, "error: --config:");
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), BASE, &["synthesize", "--threads", "0"]);
    assert_error(&o, 2, "error: --threads:");
}

#[test]
fn zero_depth_gives_uniform_thickness() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &BASE.replace("depth = 30e-9 m", "depth = 0 m").replace("v_mip = 17 V", "v_mip = 17 V\nbase = 30e-9 m"),
        &["synthesize"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let img = pgm::load(dir.path().join("out/thickness.pgm")).unwrap();
    assert_eq!((img.width, img.height, img.maxval), (128, 128, 65535));
    assert!(img.samples.iter().all(|&s| s == 10000));
}

#[test]
fn plain_gaussian_has_zero_oam() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = BASE.replace("depth = 30e-9 m", "depth = 0 m");
    let o = run(dir.path(), &cfg, &["pipeline"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("oam_peak: 0\n"), "{summary}");
    assert!(summary.contains("total_charge: 0\n"), "{summary}");
    let far: Field = cfld::load(dir.path().join("out/farfield.cfld")).unwrap();
    assert_eq!(far.plane(), Plane::Fraunhofer);
    let spec = fs::read_to_string(dir.path().join("out/oam_spectrum.csv")).unwrap();
    assert_eq!(spec.lines().next(), Some("m,weight"));
    assert_eq!(spec.lines().count(), 1 + 1024);
}

#[test]
fn first_order_of_a_fork_carries_its_charge() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        "{}\n[analysis]\nselection = disk\norder = 1\nselection_radius = 2.4e-4 rad\nn_phi = 256\nenclosed_radius = 1.2e-4 rad\nthreshold = 0\n",
        BASE.replace("n = 128", "n = 256").replace("waist = 20e-9 m", "waist = 40e-9 m")
            .replace("v_mip = 17 V", "v_mip = 17 V\ndead_zone_radius = 3e-9 m")
    );
    let o = run(dir.path(), &cfg, &["pipeline"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(summary.contains("oam_peak: 2\n"), "{summary}");
    assert!(summary.contains("enclosed_charge: 2\n"), "{summary}");
    let sing = fs::read_to_string(dir.path().join("out/singularities.csv")).unwrap();
    assert_eq!(sing.lines().next(), Some("ix,iy,q"));
    let prof = fs::read_to_string(dir.path().join("out/radial_profile.csv")).unwrap();
    assert_eq!(prof.lines().next(), Some("r_meters,intensity"));
}

#[test]
fn radius_unit_must_match_the_input_plane() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &format!("{BASE}[analysis]\nr_max = 30e-9 m\n"), &["pipeline"]);
    assert_error(&o, 2, "error: analysis.r_max: line 15: unit m does not match");
}

#[test]
fn fresnel_mode_writes_fresnel_outputs_and_stop_needs_far_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{BASE}[propagation]\nmode = fresnel\nz = 2e-6 m\n");
    let o = run(dir.path(), &cfg, &["synthesize"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(dir.path(), &cfg, &["propagate"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let f: Field = cfld::load(dir.path().join("out/fresnel.cfld")).unwrap();
    assert_eq!(f.plane(), Plane::Fresnel { z: None });
    assert!(dir.path().join("out/fresnel.pgm").exists());
    // A far field is not a valid propagation input.
    let o = run(
        dir.path(),
        &format!("{BASE}[render]\nbeam_stop = true\nbeam_stop_radius = 1e-5 rad\n"),
        &["pipeline"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let far = dir.path().join("out/farfield.cfld");
    let o = run(dir.path(), BASE, &["propagate", "--input", far.to_str().unwrap()]);
    assert_error(&o, 2, "error: input: expected a hologram-exit field");
}

#[test]
fn modal_writes_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &format!("{BASE}[modal]\nm = 2\np_max = 50\nz = 1e-3 m\nwaist = 5e-9 m\nn_points = 10\n"),
        &["modal"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let spec = fs::read_to_string(dir.path().join("out/radial_spectrum.csv")).unwrap();
    let lines: Vec<&str> = spec.lines().collect();
    assert_eq!(lines[0], "p,weight");
    assert_eq!(lines.len(), 52);
    // |c_0|² for m = 2 is Γ(2)²/(Γ(1)Γ(3)) = 1/2.
    let w0: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((w0 - 0.5).abs() < 1e-14);
    let prof = fs::read_to_string(dir.path().join("out/hygg_profile.csv")).unwrap();
    assert_eq!(prof.lines().next(), Some("r_meters,re,im"));
    assert_eq!(prof.lines().count(), 11);
}

#[test]
fn outputs_are_independent_of_thread_count() {
    let cfg = format!("{BASE}[modal]\nm = 2\np_max = 40\nz = 1e-3 m\nwaist = 5e-9 m\nn_points = 20\n");
    let mut runs = Vec::new();
    for threads in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let o = run(dir.path(), &cfg, &["pipeline", "--threads", threads, "--seed", "7"]);
        assert!(o.status.success(), "{}", stderr(&o));
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.path().join("out"))
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        runs.push((files, o.stdout));
    }
    assert_eq!(runs[0].0.len(), 10);
    assert!(runs[0] == runs[1]);
}
