//! JSON and CSV files exchanged between the pipeline stages.
//!
//! Complex matrices are stored row-major as separate real and imaginary arrays. Floats are
//! written in shortest round-trip form, so reading a file back reproduces the values exactly.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tdpt_core::forward::{LayoutKind, MsrDataset, SourceReceiverLayout};
use tdpt_core::geometry::BoundaryCurve;
use tdpt_core::linalg::CMatrix;
use tdpt_core::multi_index::MultiIndex;
use tdpt_core::tensors::{FdptTable, FrequencySet, TdptTable};
use tdpt_core::{Point, C64};

use crate::error::CliError;

fn ensure_parent(path: &Path) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
    }
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    ensure_parent(path)?;
    csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| CliError::io(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn split(values: impl Iterator<Item = C64>) -> (Vec<f64>, Vec<f64>) {
    values.map(|v| (v.re, v.im)).unzip()
}

fn join(re: &[f64], im: &[f64], what: &str) -> Result<Vec<C64>, CliError> {
    if re.len() != im.len() {
        return Err(CliError::Config(format!(
            "{what}: real and imaginary parts differ in length"
        )));
    }
    Ok(re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let (re, im) = split((0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])));
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            re,
            im,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, CliError> {
        let v = join(&self.re, &self.im, "matrix")?;
        if v.len() != self.rows * self.cols {
            return Err(CliError::Config(
                "matrix size does not match its shape".into(),
            ));
        }
        Ok(CMatrix::from_row_slice(self.rows, self.cols, &v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutFile {
    pub kind: String,
    pub transmitters: Vec<Point>,
    pub receivers: Vec<Point>,
}

/// MSR dataset: per-frequency `N × M` matrices of scattered fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsrFile {
    pub layout: LayoutFile,
    pub frequencies: Vec<f64>,
    pub seed: u64,
    pub sigma: Vec<f64>,
    pub matrices: Vec<MatrixFile>,
}

impl MsrFile {
    pub fn from_dataset(d: &MsrDataset) -> Self {
        let kind = match d.layout.kind {
            LayoutKind::Circle => "circle",
            LayoutKind::Square => "square",
            LayoutKind::Custom => "custom",
        };
        Self {
            layout: LayoutFile {
                kind: kind.into(),
                transmitters: d.layout.transmitters.clone(),
                receivers: d.layout.receivers.clone(),
            },
            frequencies: d.frequencies.clone(),
            seed: d.seed,
            sigma: d.sigma.clone(),
            matrices: d.matrices.iter().map(MatrixFile::from_matrix).collect(),
        }
    }

    pub fn to_dataset(&self) -> Result<MsrDataset, CliError> {
        let kind = match self.layout.kind.as_str() {
            "circle" => LayoutKind::Circle,
            "square" => LayoutKind::Square,
            _ => LayoutKind::Custom,
        };
        if self.matrices.len() != self.frequencies.len()
            || self.sigma.len() != self.frequencies.len()
        {
            return Err(CliError::Config(
                "MSR file: one matrix and one sigma per frequency expected".into(),
            ));
        }
        let matrices = self
            .matrices
            .iter()
            .map(MatrixFile::to_matrix)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MsrDataset {
            layout: SourceReceiverLayout {
                transmitters: self.layout.transmitters.clone(),
                receivers: self.layout.receivers.clone(),
                kind,
            },
            frequencies: self.frequencies.clone(),
            matrices,
            sigma: self.sigma.clone(),
            seed: self.seed,
        })
    }
}

/// One CSV per frequency with columns `receiver, transmitter, re, im`.
pub fn write_msr_csv(dir: &Path, d: &MsrDataset) -> Result<(), CliError> {
    for (l, a) in d.matrices.iter().enumerate() {
        let path = dir.join(format!("msr_{l:03}.csv"));
        let rows = (0..a.nrows()).flat_map(|i| {
            (0..a.ncols()).map(move |j| {
                let v = a[(i, j)];
                vec![
                    i.to_string(),
                    j.to_string(),
                    v.re.to_string(),
                    v.im.to_string(),
                ]
            })
        });
        write_rows(&path, &["receiver", "transmitter", "re", "im"], rows)?;
    }
    Ok(())
}

fn index_list(order: u32) -> Vec<[u32; 2]> {
    MultiIndex::up_to(order)
        .into_iter()
        .map(|m| [m.a1, m.a2])
        .collect()
}

fn check_indices(indices: &[[u32; 2]], order: u32) -> Result<(), CliError> {
    if indices != index_list(order).as_slice() {
        return Err(CliError::Config(
            "multi-index list does not match the graded order".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdptEntry {
    pub omega: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// Recovered per-frequency tensors; entry `(α, β)` sits at `index(α)·P + index(β)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdptFile {
    pub order: u32,
    pub center: Point,
    pub indices: Vec<[u32; 2]>,
    pub tables: Vec<FdptEntry>,
}

impl FdptFile {
    pub fn new(tables: &[FdptTable], center: Point) -> Self {
        let order = tables.first().map_or(0, |t| t.order);
        Self {
            order,
            center,
            indices: index_list(order),
            tables: tables
                .iter()
                .map(|t| {
                    let (re, im) = split(t.values().iter().cloned());
                    FdptEntry {
                        omega: t.omega,
                        re,
                        im,
                    }
                })
                .collect(),
        }
    }

    pub fn to_tables(&self) -> Result<Vec<FdptTable>, CliError> {
        check_indices(&self.indices, self.order)?;
        self.tables
            .iter()
            .map(|e| {
                Ok(FdptTable::from_values(
                    self.order,
                    e.omega,
                    1.0,
                    0.0,
                    join(&e.re, &e.im, "fdpt")?,
                )?)
            })
            .collect()
    }
}

/// Real parts of the time signals; `max_imag` records the largest discarded imaginary part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdptFile {
    pub rho: f64,
    pub l_count: usize,
    pub l0: usize,
    pub order: u32,
    pub indices: Vec<[u32; 2]>,
    pub times: Vec<f64>,
    pub signals: Vec<Vec<f64>>,
    pub max_imag: f64,
}

impl TdptFile {
    pub fn new(t: &TdptTable) -> Self {
        let max_imag = t
            .signals()
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.im.abs()));
        Self {
            rho: t.freqs.rho,
            l_count: t.freqs.l_count,
            l0: t.freqs.l0,
            order: t.order,
            indices: index_list(t.order),
            times: t.times.clone(),
            signals: t
                .signals()
                .iter()
                .map(|s| s.iter().map(|v| v.re).collect())
                .collect(),
            max_imag,
        }
    }

    pub fn to_table(&self) -> Result<TdptTable, CliError> {
        check_indices(&self.indices, self.order)?;
        let freqs = FrequencySet {
            rho: self.rho,
            l_count: self.l_count,
            l0: self.l0,
        };
        let signals = self
            .signals
            .iter()
            .map(|s| s.iter().map(|&v| C64::new(v, 0.0)).collect())
            .collect();
        Ok(TdptTable::from_signals(
            self.times.clone(),
            freqs,
            self.order,
            signals,
        )?)
    }
}

fn entry_name(a: MultiIndex, b: MultiIndex) -> String {
    format!("W_{}{}_{}{}", a.a1, a.a2, b.a1, b.a2)
}

/// Time series CSV: `t` followed by the real part of every `(α, β)` signal.
pub fn write_tdpt_csv(path: &Path, t: &TdptTable) -> Result<(), CliError> {
    let idx = MultiIndex::up_to(t.order);
    let mut header = vec!["t".to_string()];
    for &a in &idx {
        for &b in &idx {
            header.push(entry_name(a, b));
        }
    }
    let h: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let rows = t.times.iter().enumerate().map(|(i, time)| {
        let mut r = vec![time.to_string()];
        r.extend(t.signals().iter().map(|s| s[i].re.to_string()));
        r
    });
    write_rows(path, &h, rows)
}

/// Boundary CSV: parameter, point, outward normal and quadrature weight per node.
pub fn write_boundary_csv(path: &Path, c: &BoundaryCurve) -> Result<(), CliError> {
    let rows = (0..c.len()).map(|j| {
        let (p, n) = (c.points()[j], c.normals()[j]);
        vec![
            c.param(j).to_string(),
            p[0].to_string(),
            p[1].to_string(),
            n[0].to_string(),
            n[1].to_string(),
            c.weight(j).to_string(),
        ]
    });
    write_rows(path, &["t", "x1", "x2", "nu1", "nu2", "weight"], rows)
}

/// `L²(0, T)` errors of a measured signal against a reference, for every `T` of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub entry: String,
    pub horizon: Vec<f64>,
    pub abs_err: Vec<f64>,
    pub rel_err: Vec<f64>,
}

pub fn error_curve(
    entry: (MultiIndex, MultiIndex),
    times: &[f64],
    meas: &[C64],
    exact: &[C64],
) -> ErrorCurve {
    let mut num = 0.0;
    let mut den = 0.0;
    let (mut horizon, mut abs_err, mut rel_err) = (Vec::new(), Vec::new(), Vec::new());
    for i in 1..times.len() {
        let h = 0.5 * (times[i] - times[i - 1]);
        num += h * ((meas[i - 1] - exact[i - 1]).norm_sqr() + (meas[i] - exact[i]).norm_sqr());
        den += h * (exact[i - 1].norm_sqr() + exact[i].norm_sqr());
        horizon.push(times[i]);
        abs_err.push(num.sqrt());
        rel_err.push(if den > 0.0 { (num / den).sqrt() } else { 0.0 });
    }
    ErrorCurve {
        entry: entry_name(entry.0, entry.1),
        horizon,
        abs_err,
        rel_err,
    }
}

/// Error-curve CSV with columns `entry, T, absErr, relErr`.
pub fn write_error_csv(path: &Path, curves: &[ErrorCurve]) -> Result<(), CliError> {
    let rows = curves.iter().flat_map(|c| {
        (0..c.horizon.len()).map(move |i| {
            vec![
                c.entry.clone(),
                c.horizon[i].to_string(),
                c.abs_err[i].to_string(),
                c.rel_err[i].to_string(),
            ]
        })
    });
    write_rows(path, &["entry", "T", "absErr", "relErr"], rows)
}

/// Where a size or contrast value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueSource {
    Data,
    Prior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    /// Value used downstream.
    pub value: f64,
    pub source: ValueSource,
    /// Data-driven estimate, when it could be formed.
    pub estimate: Option<f64>,
    /// Why the data-driven estimate was not used.
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseReport {
    pub a: f64,
    pub b: f64,
    pub theta: f64,
    pub center: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub order: u32,
    pub discrepancy: f64,
    pub step_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub iterations: Vec<IterationReport>,
    pub initial_boundary: Vec<Point>,
    pub final_boundary: Vec<Point>,
}

/// Distances to the true boundary, known for synthetic experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub ellipse_l2: f64,
    pub final_l2: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub seed: u64,
    pub true_volume: f64,
    pub true_contrast: f64,
    pub volume: EstimateReport,
    pub contrast: EstimateReport,
    pub ellipse: EllipseReport,
    pub shape: Option<ShapeReport>,
    pub distances: DistanceReport,
}
