//! Filter figures of merit extracted from a synthesized response.

use serde::{Deserialize, Serialize};

use super::{to_db, FrequencyResponse};
use crate::cavity::CavityMode;
use crate::error::{Error, Result};
use crate::materials::BandEdges;
use crate::scalar::Real;

/// Margin around the surface-wave band used to split spur and stopband regions, Hz.
pub const BAND_MARGIN_HZ: f64 = 1e9;

/// Below this peak |S21| the response is treated as having no passband.
pub const PASSBAND_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterMetrics<T> {
    /// Frequency of the largest |S21|, Hz.
    pub f_center: T,
    /// `−20 log10 max|S21|`, dB.
    pub il_db: T,
    /// Width of the contiguous region around `f_center` within 3 dB of the peak, Hz.
    pub bw3_hz: T,
    /// Peak minus the strongest response away from the passband, dB. `None`
    /// when the grid has no point in the spur window.
    pub spur_suppression_db: Option<T>,
    /// Peak minus the 95th percentile of the far stopband, dB. `None` when the
    /// grid does not reach the stopband.
    pub oob_rejection_db: Option<T>,
    /// Largest deviation from the median level inside the 3-dB band, dB.
    pub ripple_db: T,
}

/// Solved members of the primary (m = 1) family.
pub fn passband_family<T: Real>(modes: &[CavityMode<T>]) -> Vec<CavityMode<T>> {
    modes.iter().filter(|m| m.m == 1 && m.is_solved()).cloned().collect()
}

pub fn extract_metrics<T: Real>(
    r: &FrequencyResponse<T>,
    passband_modes: &[CavityMode<T>],
    edges: BandEdges<T>,
) -> Result<FilterMetrics<T>> {
    if passband_modes.is_empty() {
        return Err(Error::EmptyModeSet);
    }
    if passband_modes.iter().any(|m| m.m != 1) {
        return Err(Error::validation("passband modes must belong to the m = 1 family"));
    }
    super::check_grid(&r.f_grid)?;
    if r.s21.len() != r.f_grid.len() {
        return Err(Error::InvalidGrid("response length does not match its grid".into()));
    }

    let mag: Vec<T> = r.s21.iter().map(|s| s.norm()).collect();
    let f = &r.f_grid;
    let (peak_idx, peak) = mag
        .iter()
        .copied()
        .enumerate()
        .fold((0, T::neg_infinity()), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    if !(peak >= T::lit(PASSBAND_FLOOR)) {
        return Err(Error::NoPassband);
    }
    let f_center = f[peak_idx];
    let half_power = peak * T::FRAC_1_SQRT_2();

    let mut lo = peak_idx;
    while lo > 0 && mag[lo - 1] >= half_power {
        lo -= 1;
    }
    let mut hi = peak_idx;
    while hi + 1 < mag.len() && mag[hi + 1] >= half_power {
        hi += 1;
    }
    let crossing = |inside: usize, outside: usize| {
        let (a, b) = (mag[outside], mag[inside]);
        let t = if b > a { (half_power - a) / (b - a) } else { T::zero() };
        f[outside] + (f[inside] - f[outside]) * t
    };
    let f_lo = if lo == 0 { f[0] } else { crossing(lo, lo - 1) };
    let f_hi = if hi + 1 == mag.len() { f[hi] } else { crossing(hi, hi + 1) };
    let bw3_hz = f_hi - f_lo;

    let peak_db = to_db(peak);
    let mut band_db: Vec<T> = mag[lo..=hi].iter().map(|&v| to_db(v)).collect();
    band_db.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = band_db.len() / 2;
    let median = if band_db.len() % 2 == 1 {
        band_db[mid]
    } else {
        (band_db[mid - 1] + band_db[mid]) * T::half()
    };
    let ripple_db = band_db
        .iter()
        .map(|&v| (v - median).abs())
        .fold(T::zero(), T::max);

    let margin = T::lit(BAND_MARGIN_HZ);
    let spur_lo = edges.f_min - margin;
    let spur_peak = f
        .iter()
        .zip(&mag)
        .filter(|(&fi, _)| (fi - f_center).abs() > T::two() * bw3_hz && fi >= spur_lo && fi <= edges.f_max)
        .map(|(_, &v)| v)
        .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.max(v))));
    let spur_suppression_db = spur_peak.map(|s| peak_db - to_db(s));

    let mut stop: Vec<T> = f
        .iter()
        .zip(&mag)
        .filter(|(&fi, _)| fi < edges.f_min - margin || fi > edges.f_max + margin)
        .map(|(_, &v)| v)
        .collect();
    let oob_rejection_db = if stop.is_empty() {
        None
    } else {
        stop.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // nearest-rank percentile
        let rank = (T::lit(0.95) * T::from_usize_lossy(stop.len())).ceil().to_usize().unwrap_or(1).max(1);
        Some(peak_db - to_db(stop[rank - 1]))
    };

    Ok(FilterMetrics {
        f_center,
        il_db: T::zero() - peak_db,
        bw3_hz,
        spur_suppression_db,
        oob_rejection_db,
        ripple_db,
    })
}
