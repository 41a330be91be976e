//! CSV and JSON writers for run artifacts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::lattice::LatticeConfig;
use crate::metrics::FidelityRecord;
use crate::model::{GapField, Magnetization};

pub const RECORD_COLUMNS: [&str; 17] = [
    "J",
    "delta_J",
    "mode",
    "site_a_x",
    "site_a_y",
    "site_b_x",
    "site_b_y",
    "F",
    "H",
    "F_minus_H",
    "F_charge",
    "F_spin",
    "C2",
    "total_magnetization",
    "min_positive_level",
    "iterations",
    "residual",
];

/// 17 significant digits, `.` decimal separator.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn opt_usize(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn record_row(r: &FidelityRecord) -> Vec<String> {
    vec![
        fmt_f64(r.j_value),
        opt(r.delta_j),
        r.mode.as_str().to_string(),
        r.site_a.0.to_string(),
        r.site_a.1.to_string(),
        opt_usize(r.site_b.map(|s| s.0)),
        opt_usize(r.site_b.map(|s| s.1)),
        fmt_f64(r.fidelity),
        fmt_f64(r.h_value),
        fmt_f64(r.f_minus_h()),
        opt(r.f_charge),
        opt(r.f_spin),
        opt(r.c2),
        fmt_f64(r.total_magnetization),
        opt(r.min_positive_level),
        r.iterations.to_string(),
        fmt_f64(r.residual),
    ]
}

pub fn write_records<W: Write>(writer: W, records: &[FidelityRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        w.write_record(record_row(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records_csv(path: &Path, records: &[FidelityRecord]) -> Result<()> {
    write_records(BufWriter::new(File::create(path)?), records)
}

/// Columns `n, energy`.
pub fn write_spectrum_csv(path: &Path, energies: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "energy"])?;
    for (n, &e) in energies.iter().enumerate() {
        w.write_record([n.to_string(), fmt_f64(e)])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `site, x, y, re_delta, im_delta`.
pub fn write_gap_csv(path: &Path, lattice: &LatticeConfig, gap: &GapField) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["site", "x", "y", "re_delta", "im_delta"])?;
    for (i, d) in gap.delta.iter().enumerate() {
        let (x, y) = lattice.site_coords(i)?;
        w.write_record([i.to_string(), x.to_string(), y.to_string(), fmt_f64(d.re), fmt_f64(d.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `site, x, y, m`.
pub fn write_magnetization_csv(path: &Path, lattice: &LatticeConfig, m: &Magnetization) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["site", "x", "y", "m"])?;
    for (i, &v) in m.per_site.iter().enumerate() {
        let (x, y) = lattice.site_coords(i)?;
        w.write_record([i.to_string(), x.to_string(), y.to_string(), fmt_f64(v)])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `x, y, F, H` for a per-site field.
pub fn write_field_csv(path: &Path, width: usize, fidelity: &[f64], h_value: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "y", "F", "H"])?;
    for (i, (&f, &h)) in fidelity.iter().zip(h_value).enumerate() {
        w.write_record([(i % width).to_string(), (i / width).to_string(), fmt_f64(f), fmt_f64(h)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::SweepMode;

    #[test]
    fn empty_records_give_header_only() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), RECORD_COLUMNS.join(",") + "\n");
    }

    #[test]
    fn full_precision_and_empty_fields() {
        let r = FidelityRecord {
            j_value: 0.1,
            delta_j: Some(0.05),
            mode: SweepMode::OneSiteSameSite,
            site_a: (7, 7),
            site_b: None,
            fidelity: 0.9,
            h_value: 0.8,
            f_charge: None,
            f_spin: None,
            c2: None,
            total_magnetization: 0.0,
            min_positive_level: None,
            iterations: 3,
            residual: 1e-9,
        };
        let row = record_row(&r);
        assert_eq!(row.len(), RECORD_COLUMNS.len());
        assert_eq!(row[0].parse::<f64>().unwrap(), 0.1);
        assert_eq!(row[0], "1.0000000000000001e-1");
        assert!(row[5].is_empty() && row[12].is_empty());
        assert_eq!(row[2], "one_site_same_site");
    }
}
