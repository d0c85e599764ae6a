#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::path::Path;
use std::process::Command;

use persistack::barcode::read_barcode;
use persistack::config::{Artifact, ConfigLayer, PipelineConfig, SliceOrder};
use persistack::error::{CliError, Stage};
use persistack::io::{load_mask, write_tiff_stack, AnyStack, StackSource};
use persistack::pipeline::{process_stack, run_on_stack, run_pipeline};
use persistack_core::{BinaryImage, GrayImage, ThresholdMode, ZStack};
use support::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_persistack"))
}

fn planted(seed: u64, noise: f64) -> (ZStack<u8>, BinaryImage) {
    let mut rng = rng(seed);
    let shape = cross(96, 96, 40, 6);
    let p = planted_stack(&mut rng, &shape, 6, 3, noise);
    (ZStack::new(p.slices).unwrap(), shape)
}

fn config(dir: &Path) -> PipelineConfig {
    let mut c = PipelineConfig::new(StackSource::Files(Vec::new()), dir);
    c.filter.radius = 3;
    c
}

#[test]
fn mask_artifact_is_the_all_slice_components() {
    let dir = tempfile::tempdir().unwrap();
    let (stack, _) = planted(1, 0.02);
    let c = config(dir.path());
    let report = run_on_stack(stack.clone(), &c).unwrap();
    assert!(!report.has_warnings());
    let written = load_mask(&dir.path().join("mask.png")).unwrap();
    let out = process_stack(&stack, &c).unwrap();
    let slices: Vec<BinaryImage> = out.preprocessed.slices.iter().map(|s| s.mask.clone()).collect();
    assert_eq!(
        written,
        intersects_all_slices(out.preprocessed.projection_mask(), &slices, true)
    );
    assert_eq!(written, out.structure.mask);
}

#[test]
fn noise_free_planted_cross_is_recovered_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let (stack, shape) = planted(2, 0.0);
    let mut c = config(dir.path());
    c.filter.radius = 0;
    c.threshold = ThresholdMode::Fixed(100);
    run_on_stack(stack, &c).unwrap();
    assert_eq!(load_mask(&dir.path().join("mask.png")).unwrap(), shape);
}

#[test]
fn identical_slices_give_a_fully_stable_filtration() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng(3);
    let (proj, _) = random_filtration_input(&mut rng, 40, 40, 1);
    let img = GrayImage::<u8>::from_fn(40, 40, |x, y| if proj.get(x, y) { 200 } else { 20 });
    let stack = ZStack::new(vec![img; 5]).unwrap();
    let mut c = config(dir.path());
    c.filter.radius = 0;
    c.outputs.insert(Artifact::Levels);
    let report = run_on_stack(stack.clone(), &c).unwrap();
    assert!(report.warnings.is_empty());
    let out = process_stack(&stack, &c).unwrap();
    assert_eq!(
        out.filtration.materialize(0).unwrap(),
        out.filtration.materialize(5).unwrap()
    );
    assert!(out.filtration.survival_depths().iter().all(|&d| d == 5));
    assert_eq!(
        report.births_histogram,
        vec![out.filtration.component_count() as usize, 0, 0, 0, 0, 0]
    );
    for level in 0..=5 {
        assert_eq!(
            load_mask(&dir.path().join(format!("level_{level:02}.png"))).unwrap(),
            proj
        );
    }
}

#[test]
fn empty_persistent_structure_is_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let a = GrayImage::<u8>::from_fn(20, 20, |x, _| if x < 5 { 200 } else { 10 });
    let b = GrayImage::<u8>::from_fn(20, 20, |x, _| if x > 15 { 200 } else { 10 });
    let c = config(dir.path());
    let report = run_on_stack(ZStack::new(vec![a, b]).unwrap(), &c).unwrap();
    assert!(report.has_warnings());
    assert_eq!(report.persistent_components, 0);
    assert!(dir.path().join("report.json").is_file());
    assert!(load_mask(&dir.path().join("mask.png")).unwrap().is_empty());
}

#[test]
fn reversed_slice_order_changes_births_not_the_structure() {
    let dir = tempfile::tempdir().unwrap();
    let (stack, _) = planted(4, 0.0);
    let mut c = config(dir.path());
    let forward = process_stack(&stack, &c).unwrap();
    c.slice_order = SliceOrder::Reversed;
    let reversed = process_stack(&stack.reversed(), &c).unwrap();
    assert_eq!(forward.structure.mask, reversed.structure.mask);
    assert_eq!(forward.barcode.intervals.len(), reversed.barcode.intervals.len());
}

#[test]
fn degenerate_slice_is_tagged_with_stage_and_slice() {
    let dir = tempfile::tempdir().unwrap();
    let good = GrayImage::<u8>::from_fn(10, 10, |x, _| (x * 20) as u8);
    let flat = GrayImage::<u8>::filled(10, 10, 7);
    let err = run_on_stack(ZStack::new(vec![good, flat]).unwrap(), &config(dir.path())).unwrap_err();
    assert_eq!(err.stage(), Some(Stage::Preprocess));
    assert!(err.to_string().contains("slice 2"), "{err}");
}

#[test]
fn invalid_radius_is_rejected_before_io() {
    let layer = ConfigLayer {
        input: Some("/nonexistent/stack.tif".into()),
        radius: Some(-1),
        out: Some("/nonexistent/out".into()),
        ..Default::default()
    };
    assert!(matches!(layer.resolve(), Err(CliError::Config(_))));

    let out = bin()
        .args([
            "run",
            "--input",
            "/nonexistent/stack.tif",
            "--radius",
            "-1",
            "--out",
            "/nonexistent/out",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("radius"), "{stderr}");
    assert!(!Path::new("/nonexistent/out").exists());
}

fn write_stack(dir: &Path, stack: ZStack<u16>) -> String {
    let path = dir.join("stack.tif");
    write_tiff_stack(&path, &AnyStack::Sixteen(stack), true).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn binary_runs_a_16_bit_tiff_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let (stack, _) = planted(5, 0.02);
    let wide: Vec<GrayImage<u16>> = stack
        .slices()
        .iter()
        .map(|s| GrayImage::from_fn(s.width(), s.height(), |x, y| s.get(x, y) as u16 * 16))
        .collect();
    let input = write_stack(dir.path(), ZStack::new(wide).unwrap());
    let out_dir = dir.path().join("out");
    let status = bin()
        .args([
            "run",
            "--input",
            &input,
            "--radius",
            "3",
            "--emit",
            "mask,barcode,barcode-plot,colors,report,projection,filtered,thresholded",
        ])
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    for name in [
        "mask.png",
        "barcode.json",
        "barcode.png",
        "colors.png",
        "colors.palette.json",
        "report.json",
        "projection.png",
        "filtered.png",
        "thresholded.png",
    ] {
        assert!(out_dir.join(name).is_file(), "{name}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["bit_depth"], 16);
    assert_eq!(report["slice_levels"].as_array().unwrap().len(), 6);
    assert_eq!(report["parameters"]["radius"], 3);
    let barcode = read_barcode(&out_dir.join("barcode.json")).unwrap();
    assert_eq!(barcode.levels, 6);

    let config = PipelineConfig {
        input: StackSource::resolve(&input).unwrap(),
        ..config(&dir.path().join("lib"))
    };
    let lib_report = run_pipeline(&config).unwrap();
    assert_eq!(
        lib_report.births_histogram,
        report["births_histogram"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap() as usize)
            .collect::<Vec<_>>()
    );
}

#[test]
fn binary_exit_code_two_on_empty_structure() {
    let dir = tempfile::tempdir().unwrap();
    let a = GrayImage::<u16>::from_fn(20, 20, |x, _| if x < 5 { 2000 } else { 10 });
    let b = GrayImage::<u16>::from_fn(20, 20, |x, _| if x > 15 { 2000 } else { 10 });
    let input = write_stack(dir.path(), ZStack::new(vec![a, b]).unwrap());
    let out = bin()
        .args(["run", "--input", &input, "--radius", "1", "--emit", "mask,report"])
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(dir.path().join("out/report.json").is_file());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let (stack, _) = planted(6, 0.0);
    let wide: Vec<GrayImage<u16>> = stack
        .slices()
        .iter()
        .map(|s| GrayImage::from_fn(s.width(), s.height(), |x, y| s.get(x, y) as u16))
        .collect();
    let input = write_stack(dir.path(), ZStack::new(wide).unwrap());
    let toml = dir.path().join("run.toml");
    let out_dir = dir.path().join("out");
    std::fs::write(
        &toml,
        format!(
            "input = {input:?}\nradius = 5\nshape = \"disc\"\nthreshold = \"fixed:100\"\nemit = [\"report\"]\nout = {:?}\n",
            out_dir.to_string_lossy()
        ),
    )
    .unwrap();
    let status = bin()
        .args(["run", "--radius", "2"])
        .arg("--config")
        .arg(&toml)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["parameters"]["radius"], 2);
    assert_eq!(report["parameters"]["shape"], "disc");
    assert_eq!(report["parameters"]["threshold"], "fixed:100");
    assert_eq!(report["projection_level"], 100);
}

#[test]
fn unreadable_input_exits_with_load_stage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--input", "/nonexistent/stack.tif"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("load stage") && stderr.contains("/nonexistent/stack.tif"),
        "{stderr}"
    );
}
