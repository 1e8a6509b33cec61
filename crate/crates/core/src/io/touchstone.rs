//! Two-port Touchstone v1 (`.s2p`) in real/imaginary form.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::response::{check_grid, FrequencyResponse};

const DIGEST_TAG: &str = "! config_digest ";

/// Renders the response. The reciprocal, symmetric model gives S12 = S21 and
/// S22 = S11.
pub fn touchstone_string(r: &FrequencyResponse<f64>, z0: f64) -> Result<String> {
    check_grid(&r.f_grid)?;
    if r.s21.len() != r.len() || r.s11.len() != r.len() {
        return Err(Error::InvalidGrid("response length does not match its grid".into()));
    }
    let mut out = String::new();
    if !r.config_digest.is_empty() {
        writeln!(out, "{DIGEST_TAG}{}", r.config_digest).unwrap();
    }
    writeln!(out, "# HZ S RI R {z0}").unwrap();
    for ((f, s21), s11) in r.f_grid.iter().zip(&r.s21).zip(&r.s11) {
        writeln!(
            out,
            "{f} {} {} {} {} {} {} {} {}",
            s11.re, s11.im, s21.re, s21.im, s21.re, s21.im, s11.re, s11.im
        )
        .unwrap();
    }
    Ok(out)
}

pub fn export_touchstone(r: &FrequencyResponse<f64>, z0: f64, path: &Path) -> Result<()> {
    std::fs::write(path, touchstone_string(r, z0)?)?;
    Ok(())
}

/// Parses what [`touchstone_string`] writes: Hz, RI format, nine columns.
/// Returns the response and the reference impedance.
pub fn parse_touchstone(text: &str) -> Result<(FrequencyResponse<f64>, f64)> {
    let mut digest = String::new();
    let mut z0 = None;
    let (mut f_grid, mut s21, mut s11) = (Vec::new(), Vec::new(), Vec::new());
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let bad = |message: String| Error::Parse {
            line: line_no,
            column: 1,
            message,
        };
        if let Some(d) = raw.strip_prefix(DIGEST_TAG) {
            digest = d.trim().to_string();
            continue;
        }
        let line = raw.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(opts) = line.strip_prefix('#') {
            let tokens: Vec<String> = opts.split_whitespace().map(|t| t.to_ascii_uppercase()).collect();
            match tokens.as_slice() {
                [hz, s, ri, r, value] if hz == "HZ" && s == "S" && ri == "RI" && r == "R" => {
                    z0 = Some(value.parse::<f64>().map_err(|e| bad(e.to_string()))?);
                }
                _ => return Err(bad(format!("unsupported option line '{line}'"))),
            }
            continue;
        }
        if z0.is_none() {
            return Err(bad("data before option line".into()));
        }
        let values = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| bad(format!("'{t}': {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != 9 {
            return Err(bad(format!("expected 9 columns, found {}", values.len())));
        }
        f_grid.push(values[0]);
        s11.push(Complex::new(values[1], values[2]));
        s21.push(Complex::new(values[3], values[4]));
    }
    let z0 = z0.ok_or_else(|| Error::Parse {
        line: 1,
        column: 1,
        message: "missing option line".into(),
    })?;
    check_grid(&f_grid)?;
    Ok((
        FrequencyResponse {
            f_grid,
            s21,
            s11,
            config_digest: digest,
        },
        z0,
    ))
}
