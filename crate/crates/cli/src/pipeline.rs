//! End-to-end run: load, preprocess, filter, extract, write artifacts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use persistack_core::persistence::Filtration;
use persistack_core::preprocess::PreprocessedStack;
use persistack_core::{
    build_filtration, compute_barcode, extract_persistent_structure, persistence_color_map, preprocess_stack_with,
    Barcode, Intensity, PersistentStructure, Warning, ZStack,
};
use serde::Serialize;

use crate::barcode::{export_barcode, save_barcode_image};
use crate::config::{shape_name, threshold_name, Artifact, PipelineConfig, SliceOrder};
use crate::error::{CliError, Result, Stage, StageExt};
use crate::io::{load_stack, save_color_map, save_gray, save_mask, write_json, AnyStack};

/// In-memory results of one run.
#[derive(Debug, Clone)]
pub struct RunOutputs<P> {
    pub preprocessed: PreprocessedStack<P, f64>,
    pub filtration: Filtration,
    pub barcode: Barcode,
    pub structure: PersistentStructure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParameterEcho {
    pub radius: usize,
    pub shape: &'static str,
    pub connectivity: u32,
    pub slice_order: SliceOrder,
    pub threshold: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub width: usize,
    pub height: usize,
    pub slices: usize,
    pub bit_depth: u32,
    pub parameters: ParameterEcho,
    pub projection_level: u64,
    /// In the order the slices were consumed.
    pub slice_levels: Vec<u64>,
    /// Components of the top level `D^m`.
    pub component_count: u32,
    pub persistent_components: usize,
    /// Intervals born at each level `0..=m`.
    pub births_histogram: Vec<usize>,
    pub stable_level: usize,
    pub warnings: Vec<String>,
    pub artifacts: Vec<PathBuf>,
    pub timings: Vec<StageTiming>,
}

impl RunReport {
    pub fn has_warnings(&self) -> bool {
        !self.warnings.is_empty()
    }
}

fn warning_text(w: Warning) -> String {
    match w {
        Warning::NoPersistentStructure => {
            "no projection component intersects every slice; the extracted mask is empty".into()
        }
    }
}

struct Stopwatch(Vec<StageTiming>);

impl Stopwatch {
    fn time<T>(&mut self, stage: Stage, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.push(StageTiming {
            stage: stage.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }
}

/// Runs the in-memory part of the pipeline on a decoded stack. The slice
/// order has already been applied.
pub fn process_stack<P: Intensity>(stack: &ZStack<P>, config: &PipelineConfig) -> Result<RunOutputs<P>> {
    process_timed(stack, config, &mut Stopwatch(Vec::new()))
}

fn process_timed<P: Intensity>(
    stack: &ZStack<P>,
    config: &PipelineConfig,
    watch: &mut Stopwatch,
) -> Result<RunOutputs<P>> {
    let preprocessed = watch
        .time(Stage::Preprocess, || {
            preprocess_stack_with::<P, f64>(stack, &config.filter, config.threshold)
        })
        .stage(Stage::Preprocess)?;
    let filtration = watch
        .time(Stage::Filtration, || {
            let masks = preprocessed.slice_masks();
            build_filtration(preprocessed.projection_mask(), &masks, config.connectivity)
        })
        .stage(Stage::Filtration)?;
    let (barcode, structure) = watch.time(Stage::Filtration, || {
        (compute_barcode(&filtration), extract_persistent_structure(&filtration))
    });
    Ok(RunOutputs {
        preprocessed,
        filtration,
        barcode,
        structure,
    })
}

/// Loads the configured stack, runs the pipeline and writes the selected
/// artifacts into `config.out_dir`.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunReport> {
    if config.outputs.is_empty() {
        return Err(CliError::Config("no output artifact selected".into()).in_stage(Stage::Config));
    }
    let mut watch = Stopwatch(Vec::new());
    let stack = watch
        .time(Stage::Load, || load_stack(&config.input))
        .stage(Stage::Load)?;
    match stack {
        AnyStack::Eight(s) => run_typed(s, config, watch),
        AnyStack::Sixteen(s) => run_typed(s, config, watch),
    }
}

/// Runs the pipeline on an already decoded stack and writes artifacts.
pub fn run_on_stack<P: Intensity>(stack: ZStack<P>, config: &PipelineConfig) -> Result<RunReport> {
    run_typed(stack, config, Stopwatch(Vec::new()))
}

fn run_typed<P: Intensity>(stack: ZStack<P>, config: &PipelineConfig, mut watch: Stopwatch) -> Result<RunReport> {
    let stack = match config.slice_order {
        SliceOrder::Acquisition => stack,
        SliceOrder::Reversed => stack.reversed(),
    };
    let outputs = process_timed(&stack, config, &mut watch)?;
    let mut report = build_report(&stack, config, &outputs);
    let artifacts = watch
        .time(Stage::Write, || write_artifacts(&outputs, config))
        .stage(Stage::Write)?;
    report.artifacts = artifacts;
    report.timings = watch.0;
    if config.outputs.contains(&Artifact::Report) {
        let path = config.out_dir.join("report.json");
        report.artifacts.push(path.clone());
        write_json(&path, &report).stage(Stage::Write)?;
    }
    Ok(report)
}

fn build_report<P: Intensity>(stack: &ZStack<P>, config: &PipelineConfig, out: &RunOutputs<P>) -> RunReport {
    let (width, height) = stack.dimensions();
    RunReport {
        width,
        height,
        slices: stack.len(),
        bit_depth: P::BIT_DEPTH,
        parameters: ParameterEcho {
            radius: config.filter.radius,
            shape: shape_name(config.filter.shape),
            connectivity: config.connectivity.neighbors(),
            slice_order: config.slice_order,
            threshold: threshold_name(config.threshold),
        },
        projection_level: out.preprocessed.projection.level.bin() as u64,
        slice_levels: out.preprocessed.slice_levels().iter().map(|l| l.bin() as u64).collect(),
        component_count: out.filtration.component_count(),
        persistent_components: out.structure.component_ids.len(),
        births_histogram: out.barcode.births_histogram(),
        stable_level: out.filtration.stable_level(),
        warnings: out.structure.warning.into_iter().map(warning_text).collect(),
        artifacts: Vec::new(),
        timings: Vec::new(),
    }
}

fn write_artifacts<P: Intensity>(out: &RunOutputs<P>, config: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    let mut emit = |name: &str, write: &dyn Fn(&Path) -> Result<()>| -> Result<()> {
        let path = dir.join(name);
        write(&path)?;
        written.push(path);
        Ok(())
    };
    for artifact in &config.outputs {
        match artifact {
            Artifact::Mask => emit("mask.png", &|p| save_mask(p, &out.structure.mask))?,
            Artifact::Barcode => emit("barcode.json", &|p| export_barcode(&out.barcode, p))?,
            Artifact::BarcodePlot => emit("barcode.png", &|p| save_barcode_image(&out.barcode, p))?,
            Artifact::Colors => {
                let map = persistence_color_map(&out.filtration);
                emit("colors.png", &|p| save_color_map(p, &map).map(drop))?;
                emit("colors.palette.json", &|_| Ok(()))?;
            }
            Artifact::Projection => emit("projection.png", &|p| save_gray(p, &out.preprocessed.projection_raw))?,
            Artifact::Filtered => emit("filtered.png", &|p| save_gray(p, &out.preprocessed.projection.filtered))?,
            Artifact::Thresholded => emit("thresholded.png", &|p| save_mask(p, out.preprocessed.projection_mask()))?,
            Artifact::Levels => {
                let m = out.filtration.level_count();
                let digits = m.to_string().len().max(2);
                for level in 0..=m {
                    let mask = out.filtration.materialize(level)?;
                    emit(&format!("level_{level:0digits$}.png"), &|p| save_mask(p, &mask))?;
                }
            }
            // Written last, once timings are known.
            Artifact::Report => {}
        }
    }
    Ok(written)
}
