//! Ground-truth sidecar: JSON Lines, one record per entity.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{CloudField, SpectralScene, ThermalScene};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TruthRecord {
    CloudField {
        width: usize,
        height: usize,
        cloudy_pixels: usize,
        cloud_fraction: f64,
    },
    Hotspot {
        id: usize,
        row: usize,
        col: usize,
        peak: f64,
        sigma_px: f64,
    },
    Abundance {
        row: usize,
        col: usize,
        abundances: Vec<f64>,
    },
}

pub fn cloud_truth(field: &CloudField) -> Vec<TruthRecord> {
    vec![TruthRecord::CloudField {
        width: field.raster.width(),
        height: field.raster.height(),
        cloudy_pixels: field.cloudy_pixels,
        cloud_fraction: field.cloud_fraction(),
    }]
}

pub fn thermal_truth(scene: &ThermalScene) -> Vec<TruthRecord> {
    scene
        .hotspots
        .iter()
        .map(|h| TruthRecord::Hotspot {
            id: h.id,
            row: h.row,
            col: h.col,
            peak: h.peak,
            sigma_px: h.sigma_px,
        })
        .collect()
}

pub fn spectral_truth(scene: &SpectralScene) -> Vec<TruthRecord> {
    let w = scene.raster.width();
    scene
        .abundances
        .iter()
        .enumerate()
        .map(|(i, a)| TruthRecord::Abundance {
            row: i / w,
            col: i % w,
            abundances: a.clone(),
        })
        .collect()
}

pub fn write_truth<W: Write>(mut out: W, records: &[TruthRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_truth<R: BufRead>(input: R) -> std::io::Result<Vec<TruthRecord>> {
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, format!("line {}: {e}", i + 1)))?;
        records.push(rec);
    }
    Ok(records)
}
