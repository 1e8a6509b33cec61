//! Fixed-column CSV tables. Floats use Rust's shortest round-trip form and
//! missing values are written as empty fields.

use std::path::Path;

use crate::cavity::{CavityMode, ModeStatus};
use crate::dispersion::CurvePoint;
use crate::error::Result;
use crate::response::{to_db, CompareRow, FrequencyResponse, ScoreRow, SweepRow};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| crate::error::Error::Io(e.into_error()))
    }
}

pub fn export_csv(table: &Table, path: &Path) -> Result<()> {
    std::fs::write(path, table.to_csv_bytes()?)?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok(Table { header, rows })
}

pub fn dispersion_table(points: &[CurvePoint<f64>]) -> Table {
    let mut t = Table::new(&["k_x_rad_per_cm", "m", "f_hz", "engine"]);
    for p in points {
        t.rows.push(match p {
            CurvePoint::Solved(p) => vec![num(p.k_x), p.m.to_string(), num(p.f), p.engine.to_string()],
            CurvePoint::Gap { k_x, m, .. } => vec![num(*k_x), m.to_string(), String::new(), String::new()],
        });
    }
    t
}

pub fn modes_table(modes: &[CavityMode<f64>]) -> Table {
    let mut t = Table::new(&["n", "m", "label", "k_x", "k_y", "f_hz", "status"]);
    for m in modes {
        let status = match &m.status {
            ModeStatus::Solved => "solved".to_string(),
            ModeStatus::Failed(reason) => format!("failed: {reason}"),
        };
        t.rows.push(vec![
            m.n.to_string(),
            m.m.to_string(),
            m.label().to_string(),
            num(m.k_x),
            num(m.k_y),
            opt(m.f),
            status,
        ]);
    }
    t
}

pub fn response_table(r: &FrequencyResponse<f64>) -> Table {
    let mut t = Table::new(&["f_hz", "s21_re", "s21_im", "s11_re", "s11_im", "s21_db"]);
    for ((f, s21), s11) in r.f_grid.iter().zip(&r.s21).zip(&r.s11) {
        t.rows.push(vec![
            num(*f),
            num(s21.re),
            num(s21.im),
            num(s11.re),
            num(s11.im),
            num(to_db(s21.norm())),
        ]);
    }
    t
}

pub fn sweep_table(rows: &[SweepRow<f64>]) -> Table {
    let mut t = Table::new(&[
        "h0_gauss",
        "f_center_hz",
        "il_db",
        "bw3_hz",
        "spur_suppression_db",
        "oob_rejection_db",
        "f_min_hz",
        "f_max_hz",
    ]);
    for row in rows {
        let m = row.outcome.as_ref().ok();
        t.rows.push(vec![
            num(row.h0),
            opt(m.map(|m| m.f_center)),
            opt(m.map(|m| m.il_db)),
            opt(m.map(|m| m.bw3_hz)),
            opt(m.and_then(|m| m.spur_suppression_db)),
            opt(m.and_then(|m| m.oob_rejection_db)),
            opt(row.edges.map(|e| e.f_min)),
            opt(row.edges.map(|e| e.f_max)),
        ]);
    }
    t
}

pub fn score_table(rows: &[ScoreRow<f64>]) -> Table {
    let mut t = Table::new(&[
        "hc_x_cm",
        "hc_y_cm",
        "score_db",
        "spur_suppression_db",
        "ripple_db",
        "il_db",
        "bw3_hz",
        "status",
    ]);
    for row in rows {
        let m = row.outcome.as_ref().ok();
        t.rows.push(vec![
            num(row.hc_x),
            num(row.hc_y),
            opt(row.score),
            opt(m.and_then(|m| m.spur_suppression_db)),
            opt(m.map(|m| m.ripple_db)),
            opt(m.map(|m| m.il_db)),
            opt(m.map(|m| m.bw3_hz)),
            match &row.outcome {
                Ok(_) => "ok".to_string(),
                Err(e) => format!("failed: {e}"),
            },
        ]);
    }
    t
}

pub fn compare_table(rows: &[CompareRow<f64>]) -> Table {
    let mut t = Table::new(&[
        "shape",
        "f_center_hz",
        "il_db",
        "bw3_hz",
        "spur_suppression_db",
        "oob_rejection_db",
        "s21_top_primary_db",
    ]);
    for row in rows {
        let m = &row.metrics;
        t.rows.push(vec![
            row.shape.to_string(),
            num(m.f_center),
            num(m.il_db),
            num(m.bw3_hz),
            opt(m.spur_suppression_db),
            opt(m.oob_rejection_db),
            num(row.s21_top_primary_db),
        ]);
    }
    t
}
