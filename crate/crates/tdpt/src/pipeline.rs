//! The three pipeline stages. Each stage reads its inputs from, and writes its outputs to, the
//! configured output directory.
//!
//! | stage         | reads        | writes                                                    |
//! |---------------|--------------|-----------------------------------------------------------|
//! | `simulate`    |              | `msr.json`, `msr/msr_###.csv`, `boundary_true.csv`        |
//! | `tdpt`        | `msr.json`   | `fdpt.json`, `tdpt.json`, `tdpt.csv`, and when noiseless `tdpt_exact.csv`, `errors.csv` |
//! | `reconstruct` | `tdpt.json`  | `report.json`, `boundary_ellipse.csv`, `boundary_final.csv`, `iterations.csv` |

use std::path::{Path, PathBuf};

use tdpt_core::forward::{add_noise, msr_matrix, noise_rng, MsrDataset, NoiseLevel};
use tdpt_core::geometry::{boundary_distance, EquivalentEllipse};
use tdpt_core::multi_index::MultiIndex;
use tdpt_core::reconstruction::estimates::symmetric_eigen;
use tdpt_core::reconstruction::lsq::reconstruct_fdpt_at;
use tdpt_core::reconstruction::{
    equivalent_ellipse, estimate_all, estimate_contrast, estimate_size, measured_first_order,
    optimize_shape_observed, reconstruct_tdpt, ShapeProblem,
};
use tdpt_core::tensors::{compute_fdpt, compute_tdpt, FdptTable, TdptTable};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::formats::*;
use crate::parallel::Runner;

/// File locations inside an output directory.
#[derive(Debug, Clone)]
pub struct Paths {
    pub dir: PathBuf,
}

impl Paths {
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
        }
    }

    pub fn msr(&self) -> PathBuf {
        self.dir.join("msr.json")
    }

    pub fn msr_csv_dir(&self) -> PathBuf {
        self.dir.join("msr")
    }

    pub fn fdpt(&self) -> PathBuf {
        self.dir.join("fdpt.json")
    }

    pub fn tdpt(&self) -> PathBuf {
        self.dir.join("tdpt.json")
    }

    pub fn tdpt_csv(&self) -> PathBuf {
        self.dir.join("tdpt.csv")
    }

    pub fn tdpt_exact_csv(&self) -> PathBuf {
        self.dir.join("tdpt_exact.csv")
    }

    pub fn errors(&self) -> PathBuf {
        self.dir.join("errors.csv")
    }

    pub fn report(&self) -> PathBuf {
        self.dir.join("report.json")
    }

    pub fn boundary(&self, which: &str) -> PathBuf {
        self.dir.join(format!("boundary_{which}.csv"))
    }

    pub fn iterations(&self) -> PathBuf {
        self.dir.join("iterations.csv")
    }
}

fn noise_level(cfg: &ExperimentConfig) -> NoiseLevel {
    if cfg.noise_percent > 0.0 {
        NoiseLevel::Percent(cfg.noise_percent)
    } else {
        NoiseLevel::None
    }
}

/// Synthesizes the MSR dataset of the configured experiment.
pub fn synthesize(cfg: &ExperimentConfig, runner: &Runner) -> Result<MsrDataset, CliError> {
    cfg.validate()?;
    let inc = cfg.inclusion()?;
    let layout = cfg.layout();
    let freqs = cfg.frequency_set()?.positive();
    let level = noise_level(cfg);
    let slots = runner.map(freqs.len(), |l| {
        let mut a = msr_matrix(&layout, &inc, freqs[l])?;
        let s = add_noise(&mut a, level, &mut noise_rng(cfg.seed, l));
        Ok::<_, CliError>((a, s))
    })?;
    let (matrices, sigma) = slots.into_iter().unzip();
    Ok(MsrDataset {
        layout,
        frequencies: freqs,
        matrices,
        sigma,
        seed: cfg.seed,
    })
}

pub fn simulate(cfg: &ExperimentConfig, runner: &Runner) -> Result<MsrDataset, CliError> {
    let data = synthesize(cfg, runner)?;
    let paths = Paths::new(&cfg.output_dir);
    write_json(&paths.msr(), &MsrFile::from_dataset(&data))?;
    write_msr_csv(&paths.msr_csv_dir(), &data)?;
    write_boundary_csv(&paths.boundary("true"), &cfg.inclusion()?.physical_curve())?;
    Ok(data)
}

/// Per-frequency least-squares recovery.
pub fn recover_fdpt(
    cfg: &ExperimentConfig,
    data: &MsrDataset,
    runner: &Runner,
) -> Result<Vec<FdptTable>, CliError> {
    let (tx, rx) = (&data.layout.transmitters, &data.layout.receivers);
    let rcond = cfg.rcond();
    runner.map(data.frequencies.len(), |l| {
        Ok(reconstruct_fdpt_at(
            &data.matrices[l],
            tx,
            rx,
            cfg.center,
            data.frequencies[l],
            cfg.order,
            rcond,
        )?)
    })
}

/// Tensors of the true inclusion from the boundary systems, up to the configured order.
pub fn exact_fdpt(cfg: &ExperimentConfig, runner: &Runner) -> Result<Vec<FdptTable>, CliError> {
    let inc = cfg.inclusion()?;
    let freqs = cfg.frequency_set()?.positive();
    runner.map(freqs.len(), |l| {
        Ok(
            compute_fdpt(&inc.base, inc.eps, freqs[l], inc.contrast, cfg.order - 1)?
                .truncated(cfg.order),
        )
    })
}

pub fn tdpt(cfg: &ExperimentConfig, runner: &Runner) -> Result<TdptTable, CliError> {
    cfg.validate()?;
    let paths = Paths::new(&cfg.output_dir);
    let msr: MsrFile = read_json(&paths.msr())?;
    let data = msr.to_dataset()?;
    let freqs = cfg.frequency_set()?;
    let grid = freqs.positive();
    if grid.len() != data.frequencies.len()
        || grid
            .iter()
            .zip(&data.frequencies)
            .any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
    {
        return Err(CliError::Config(format!(
            "{} holds {} frequencies that do not match the configured grid of {}",
            paths.msr().display(),
            data.frequencies.len(),
            grid.len()
        )));
    }
    let tables = recover_fdpt(cfg, &data, runner)?;
    let times = cfg.time_grid();
    let t = reconstruct_tdpt(&tables, &freqs, &times)?;
    write_json(&paths.fdpt(), &FdptFile::new(&tables, cfg.center))?;
    write_json(&paths.tdpt(), &TdptFile::new(&t))?;
    write_tdpt_csv(&paths.tdpt_csv(), &t)?;
    if cfg.noise_percent == 0.0 {
        let exact = compute_tdpt(&exact_fdpt(cfg, runner)?, &freqs, &times)?;
        write_tdpt_csv(&paths.tdpt_exact_csv(), &exact)?;
        let curves: Vec<ErrorCurve> = [MultiIndex::new(1, 0), MultiIndex::new(0, 1)]
            .iter()
            .map(|&e| error_curve((e, e), &times, t.signal(e, e), exact.signal(e, e)))
            .collect();
        write_error_csv(&paths.errors(), &curves)?;
    }
    Ok(t)
}

fn admissible_contrast(k: f64) -> bool {
    k.is_finite() && k > 0.0 && k != 1.0
}

/// Size and contrast from the data, falling back to the configured priors.
fn size_and_contrast(
    cfg: &ExperimentConfig,
    t: &TdptTable,
) -> Result<(EstimateReport, EstimateReport), CliError> {
    let chain = estimate_all(t, cfg.center);
    if let Ok((est, _)) = &chain {
        let data = |v: f64| EstimateReport {
            value: v,
            source: ValueSource::Data,
            estimate: Some(v),
            note: None,
        };
        return Ok((data(est.volume.value), data(est.contrast.value)));
    }
    let chain_note = chain.err().map(|e| e.to_string());
    let size = estimate_size(t)
        .ok()
        .map(|a| a.value)
        .filter(|v| v.is_finite());
    let volume = match (size, cfg.volume_prior) {
        (Some(v), None) if v > 0.0 => EstimateReport {
            value: v,
            source: ValueSource::Data,
            estimate: size,
            note: None,
        },
        (_, Some(p)) => EstimateReport {
            value: p,
            source: ValueSource::Prior,
            estimate: size,
            note: chain_note.clone(),
        },
        _ => {
            return Err(CliError::Estimation(format!(
                "no usable size estimate ({}) and no volume_prior",
                chain_note.unwrap_or_default()
            )))
        }
    };
    let (_, _, theta) = symmetric_eigen(measured_first_order(t)?);
    let k = estimate_contrast(t, volume.value, theta)
        .ok()
        .map(|a| a.value);
    let usable = k.filter(|&k| {
        admissible_contrast(k) && equivalent_ellipse(t, volume.value, k, cfg.center).is_ok()
    });
    let contrast = match (usable, cfg.contrast_prior) {
        (Some(k), _) => EstimateReport {
            value: k,
            source: ValueSource::Data,
            estimate: Some(k),
            note: None,
        },
        (None, Some(p)) => EstimateReport {
            value: p,
            source: ValueSource::Prior,
            estimate: k,
            note: Some("data-driven contrast is not admissible for the equivalent ellipse".into()),
        },
        (None, None) => {
            return Err(CliError::Estimation(format!(
                "contrast estimate {k:?} is not admissible and no contrast_prior is set"
            )))
        }
    };
    Ok((volume, contrast))
}

fn points_csv_rows(
    rows: &mut Vec<Vec<String>>,
    iteration: usize,
    order: u32,
    j: f64,
    pts: &[[f64; 2]],
) {
    for (n, p) in pts.iter().enumerate() {
        rows.push(vec![
            iteration.to_string(),
            order.to_string(),
            j.to_string(),
            n.to_string(),
            p[0].to_string(),
            p[1].to_string(),
        ]);
    }
}

pub fn reconstruct(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let paths = Paths::new(&cfg.output_dir);
    let file: TdptFile = read_json(&paths.tdpt())?;
    let t = file.to_table()?;
    let (volume, contrast) = size_and_contrast(cfg, &t)?;
    let ellipse = equivalent_ellipse(&t, volume.value, contrast.value, cfg.center)?;
    let inc = cfg.inclusion()?;
    let truth = inc.physical_curve();
    let ellipse_curve = ellipse.to_curve(cfg.nodes)?;
    write_boundary_csv(&paths.boundary("ellipse"), &ellipse_curve)?;
    let ellipse_l2 = boundary_distance(&ellipse_curve, &truth).l2;

    let mut shape = None;
    let mut final_l2 = None;
    if cfg.optimizer.enabled {
        let scale = volume.value.sqrt();
        let problem = ShapeProblem::new(&t, contrast.value, scale, cfg.order)?;
        let mut rows = Vec::new();
        let mut count = 0usize;
        let mut observer = |s: &tdpt_core::reconstruction::ShapeState| {
            if let Ok(c) = s.curve.scaled_translated(scale, cfg.center) {
                points_csv_rows(&mut rows, count, s.order, s.discrepancy, c.points());
            }
            count += 1;
        };
        let rec = optimize_shape_observed(&problem, &ellipse, &cfg.schedule(), &mut observer)?;
        let path = paths.iterations();
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::io(&path, e))?;
        w.write_record(["iteration", "order", "discrepancy", "node", "x1", "x2"])
            .map_err(|e| CliError::io(&path, e))?;
        for r in rows {
            w.write_record(r).map_err(|e| CliError::io(&path, e))?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        write_boundary_csv(&paths.boundary("final"), &rec.curve)?;
        final_l2 = Some(boundary_distance(&rec.curve, &truth).l2);
        shape = Some(ShapeReport {
            iterations: rec
                .state
                .history
                .iter()
                .map(|h| IterationReport {
                    order: h.order,
                    discrepancy: h.discrepancy,
                    step_scale: h.step_scale,
                })
                .collect(),
            initial_boundary: rec.initial.points().to_vec(),
            final_boundary: rec.curve.points().to_vec(),
        });
    }
    let report = Report {
        name: cfg.name.clone(),
        seed: cfg.seed,
        true_volume: inc.volume(),
        true_contrast: inc.contrast,
        volume,
        contrast,
        ellipse: EllipseReport {
            a: ellipse.a,
            b: ellipse.b,
            theta: ellipse.theta,
            center: ellipse.center,
        },
        shape,
        distances: DistanceReport {
            ellipse_l2,
            final_l2,
            ratio: final_l2.map(|d| d / ellipse_l2),
        },
    };
    write_json(&paths.report(), &report)?;
    Ok(report)
}

/// `simulate`, `tdpt` and `reconstruct` in sequence.
pub fn pipeline(cfg: &ExperimentConfig, runner: &Runner) -> Result<Report, CliError> {
    simulate(cfg, runner)?;
    tdpt(cfg, runner)?;
    reconstruct(cfg)
}

/// Equivalent ellipse of the configured true inclusion, for reference.
pub fn true_ellipse(
    cfg: &ExperimentConfig,
    runner: &Runner,
) -> Result<EquivalentEllipse, CliError> {
    let freqs = cfg.frequency_set()?;
    let t = compute_tdpt(&exact_fdpt(cfg, runner)?, &freqs, &cfg.time_grid())?;
    let inc = cfg.inclusion()?;
    Ok(equivalent_ellipse(
        &t,
        inc.volume(),
        inc.contrast,
        cfg.center,
    )?)
}
