//! File formats: surface CSV, sweep CSV, and JSON documents.

use std::f64::consts::FRAC_PI_2;
use std::io::{Read, Write};
use std::path::Path;

use monty_core::noise::NoiseCurvePoint;
use monty_core::stats::{SurfaceCell, SurfaceGrid, SweepPoint, SweepValues};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `json` for `*.json`, CSV otherwise.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Nine significant digits.
pub fn sig9(v: f64) -> String {
    format!("{v:.8e}")
}

pub const SURFACE_HEADER: [&str; 5] = ["phi1", "phi2", "p_ns", "p_s", "p_abs"];

/// Surface with the model parameters it was computed under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDocument {
    pub entangled: bool,
    pub noise_p: f64,
    pub nodes: usize,
    pub grid: SurfaceGrid,
}

pub fn write_surface_csv<W: Write>(grid: &SurfaceGrid, out: W) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SURFACE_HEADER)?;
    for (phi1, phi2, cell) in grid.valid_cells() {
        w.write_record([phi1, phi2, cell.stay, cell.switch, cell.imbalance].map(sig9))?;
    }
    w.flush()?;
    Ok(())
}

/// Rebuilds a surface from CSV rows. The axis is the sorted set of angles
/// that occur in the file; nodes without a row are masked.
pub fn read_surface_csv<R: Read>(input: R) -> AppResult<SurfaceGrid> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(SURFACE_HEADER) {
        return Err(AppError::Format(format!(
            "expected columns {}, found {}",
            SURFACE_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let mut v = [0.0; 5];
        for (slot, field) in v.iter_mut().zip(record.iter()) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| AppError::Format(format!("not a number: {field:?}")))?;
        }
        rows.push(v);
    }
    let mut axis: Vec<f64> = rows.iter().flat_map(|v| [v[0], v[1]]).collect();
    axis.sort_by(f64::total_cmp);
    axis.dedup();
    let index = |x: f64| {
        axis.binary_search_by(|a| a.total_cmp(&x))
            .expect("angle is on the axis")
    };
    let mut cells = vec![vec![None; axis.len()]; axis.len()];
    for v in &rows {
        cells[index(v[0])][index(v[1])] = Some(SurfaceCell {
            stay: v[2],
            switch: v[3],
            imbalance: v[4],
        });
    }
    let grid_step = if axis.len() > 1 {
        axis[1] - axis[0]
    } else {
        FRAC_PI_2
    };
    Ok(SurfaceGrid {
        phi1_axis: axis.clone(),
        phi2_axis: axis,
        cells,
        grid_step,
    })
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> AppResult<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned, R: Read>(input: R) -> AppResult<T> {
    Ok(serde_json::from_reader(input)?)
}

/// Reads a surface from CSV or from a JSON [`SurfaceDocument`].
pub fn read_surface<R: Read>(input: R, format: Format) -> AppResult<SurfaceGrid> {
    match format {
        Format::Csv => read_surface_csv(input),
        Format::Json => Ok(read_json::<SurfaceDocument, _>(input)?.grid),
    }
}

/// `p,p_ns,p_s,ratio` for random sweeps, `p,max,max_phi1,max_phi2,min,min_phi1,min_phi2`
/// for extrema sweeps.
pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], out: W) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let extrema = matches!(
        points.first().map(|p| p.values),
        Some(SweepValues::Extrema { .. })
    );
    if extrema {
        w.write_record([
            "p", "max", "max_phi1", "max_phi2", "min", "min_phi1", "min_phi2",
        ])?;
    } else {
        w.write_record(["p", "p_ns", "p_s", "ratio"])?;
    }
    for pt in points {
        let row: Vec<f64> = match pt.values {
            SweepValues::Random(pair) => {
                vec![
                    pt.p,
                    pair.stay.value,
                    pair.switch.value,
                    pair.switch.value / pair.stay.value,
                ]
            }
            SweepValues::Extrema { max, min } => {
                vec![
                    pt.p, max.value, max.phi1, max.phi2, min.value, min.phi1, min.phi2,
                ]
            }
        };
        w.write_record(row.into_iter().map(sig9))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve_csv<W: Write>(points: &[NoiseCurvePoint], out: W) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "p_ns", "p_s", "ratio"])?;
    for pt in points {
        w.write_record([pt.p, pt.stay, pt.switch, pt.switch / pt.stay].map(sig9))?;
    }
    w.flush()?;
    Ok(())
}
