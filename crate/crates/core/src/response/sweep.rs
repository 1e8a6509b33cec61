//! Bias sweeps, apodization grid search and shape comparison.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{extract_metrics, passband_family, FilterMetrics};
use super::{config_digest, solve_modes, spectrum_for, to_db, DeviceConfig, ModeSpectrum, Synthesizer};
use crate::cavity::CavityMode;
use crate::error::{Error, Result};
use crate::materials::{resonance_bounds, BandEdges, BiasField};
use crate::scalar::Real;
use crate::transducer::{Shape, TransducerPair};

/// Span added below `f_min` and above `f_max` by [`frequency_grid`], Hz.
pub const GRID_MARGIN_HZ: f64 = 1.5e9;

/// Default number of points per synthesized response.
pub const DEFAULT_POINTS: usize = 10_001;

/// Uniform grid from `f_min − 1.5 GHz` to `f_max + 1.5 GHz`, floored at 1 MHz.
pub fn frequency_grid<T: Real>(edges: BandEdges<T>, points: usize) -> Result<Vec<T>> {
    if points < 2 {
        return Err(Error::InvalidGrid("at least 2 points are required".into()));
    }
    let margin = T::lit(GRID_MARGIN_HZ);
    let start = (edges.f_min - margin).max(T::lit(1e6));
    let stop = edges.f_max + margin;
    let last = T::from_usize_lossy(points - 1);
    Ok((0..points)
        .map(|i| start + (stop - start) * T::from_usize_lossy(i) / last)
        .collect())
}

fn evaluate<T: Real + Serialize>(
    cfg: &DeviceConfig<T>,
    bias: &BiasField<T>,
    spectrum: &ModeSpectrum<T>,
    points: usize,
) -> Result<(FilterMetrics<T>, Synthesizer<T>)> {
    let grid = frequency_grid(spectrum.edges, points)?;
    let synth = Synthesizer::for_spectrum(cfg, spectrum, &spectrum.coupling, &spectrum.coupling, &grid)?;
    let response = synth.response(&grid, config_digest(cfg, bias))?;
    let metrics = extract_metrics(&response, &passband_family(&spectrum.modes), spectrum.edges)?;
    Ok((metrics, synth))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow<T> {
    pub h0: T,
    pub edges: Option<BandEdges<T>>,
    /// Metrics, or the reason this field could not be evaluated.
    pub outcome: std::result::Result<FilterMetrics<T>, String>,
}

/// One row per bias, in input order. Failures are recorded per row.
pub fn field_sweep<T: Real + Serialize>(cfg: &DeviceConfig<T>, h_list: &[T], points: usize) -> Result<Vec<SweepRow<T>>> {
    if h_list.is_empty() {
        return Err(Error::validation("h0 list must not be empty"));
    }
    for &h0 in h_list {
        BiasField::new(h0)?;
    }
    cfg.validate()?;
    Ok(h_list
        .par_iter()
        .map(|&h0| {
            let bias = BiasField::new(h0).expect("checked above");
            let edges = resonance_bounds(&cfg.film, &bias).ok();
            let outcome = solve_modes(cfg, &bias)
                .and_then(|modes| spectrum_for(cfg, &bias, modes))
                .and_then(|spectrum| evaluate(cfg, &bias, &spectrum, points))
                .map(|(metrics, _)| metrics)
                .map_err(|e| e.to_string());
            SweepRow { h0, edges, outcome }
        })
        .collect())
}

/// Inclusive arithmetic range `start, start + step, …, ≤ stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRange<T> {
    pub start: T,
    pub stop: T,
    pub step: T,
}

impl<T: Real> GridRange<T> {
    pub fn single(value: T) -> Self {
        Self {
            start: value,
            stop: value,
            step: T::one(),
        }
    }

    pub fn values(&self) -> Result<Vec<T>> {
        if !(self.step > T::zero()) {
            return Err(Error::validation("range step must be positive"));
        }
        if !(self.stop >= self.start) {
            return Err(Error::validation("range stop must not precede start"));
        }
        let count = ((self.stop - self.start) / self.step + T::lit(1e-9)).floor();
        let count = count.to_usize().ok_or_else(|| Error::validation("range too large"))?;
        Ok((0..=count)
            .map(|i| self.start + self.step * T::from_usize_lossy(i))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow<T> {
    pub hc_x: T,
    pub hc_y: T,
    pub outcome: std::result::Result<FilterMetrics<T>, String>,
    /// `spur_suppression_db − ripple_db`; `None` without a spur measurement.
    pub score: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimization<T> {
    pub best: TransducerPair<T>,
    pub best_score: T,
    /// Rows in evaluation order: hc_x outer, hc_y inner.
    pub table: Vec<ScoreRow<T>>,
}

/// Scores closer than this are ties, dB. Keeps the choice stable against
/// last-bit differences between otherwise equivalent grid points.
pub const SCORE_TIE_DB: f64 = 1e-9;

/// Exhaustive search over cone extents for the configured shape.
///
/// Ties keep the earlier grid point, i.e. the smaller hc_x, then the
/// smaller hc_y.
pub fn optimize_apodization<T: Real + Serialize>(
    cfg: &DeviceConfig<T>,
    bias: &BiasField<T>,
    hc_x_values: &[T],
    hc_y_values: &[T],
    points: usize,
) -> Result<Optimization<T>> {
    if hc_x_values.is_empty() || hc_y_values.is_empty() {
        return Err(Error::validation("optimization ranges must not be empty"));
    }
    let modes = solve_modes(cfg, bias)?;
    let grid: Vec<(T, T)> = hc_x_values
        .iter()
        .flat_map(|&x| hc_y_values.iter().map(move |&y| (x, y)))
        .collect();
    let results: Vec<Result<FilterMetrics<T>>> = grid
        .par_iter()
        .map(|&(hc_x, hc_y)| {
            let trial = DeviceConfig {
                transducer: TransducerPair { hc_x, hc_y, ..cfg.transducer },
                ..*cfg
            };
            trial.validate()?;
            let spectrum = spectrum_for(&trial, bias, modes.clone())?;
            evaluate(&trial, bias, &spectrum, points).map(|(m, _)| m)
        })
        .collect();

    let mut best: Option<(usize, T)> = None;
    let mut first_error = None;
    let mut table = Vec::with_capacity(grid.len());
    for (i, (&(hc_x, hc_y), result)) in grid.iter().zip(results).enumerate() {
        let (outcome, score) = match result {
            Ok(m) => {
                let score = m.spur_suppression_db.map(|s| s - m.ripple_db);
                (Ok(m), score)
            }
            Err(e) => {
                let text = e.to_string();
                first_error.get_or_insert(e);
                (Err(text), None)
            }
        };
        if let Some(s) = score {
            if best.is_none_or(|(_, b)| s > b + T::lit(SCORE_TIE_DB)) {
                best = Some((i, s));
            }
        }
        table.push(ScoreRow { hc_x, hc_y, outcome, score });
    }
    match best {
        Some((i, best_score)) => Ok(Optimization {
            best: TransducerPair {
                hc_x: table[i].hc_x,
                hc_y: table[i].hc_y,
                ..cfg.transducer
            },
            best_score,
            table,
        }),
        None => Err(first_error.unwrap_or_else(|| Error::validation("no grid point has a spur measurement"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow<T> {
    pub shape: Shape,
    pub metrics: FilterMetrics<T>,
    /// |S21| at the highest solved primary mode, dB.
    pub s21_top_primary_db: T,
    /// Label of that mode.
    pub top_primary: String,
}

/// Highest solved member of the m = 1 family.
pub fn top_primary<T: Real>(modes: &[CavityMode<T>]) -> Option<&CavityMode<T>> {
    modes.iter().filter(|m| m.m == 1 && m.is_solved()).max_by_key(|m| m.n)
}

/// Extra cone length used for the extended cone when none is configured.
pub fn default_extended_asymmetry<T: Real>(hc_x: T) -> T {
    hc_x * T::half()
}

/// Evaluates each shape with otherwise identical settings.
pub fn compare_shapes<T: Real + Serialize>(
    cfg: &DeviceConfig<T>,
    bias: &BiasField<T>,
    shapes: &[Shape],
    points: usize,
) -> Result<Vec<CompareRow<T>>> {
    if shapes.is_empty() {
        return Err(Error::validation("at least one shape is required"));
    }
    let modes = solve_modes(cfg, bias)?;
    let top = top_primary(&modes).ok_or(Error::EmptyModeSet)?.clone();
    shapes
        .par_iter()
        .map(|&shape| {
            let mut transducer = cfg.transducer.with_shape(shape);
            if shape == Shape::ExtendedCone && transducer.extended_asymmetry == T::zero() {
                transducer.extended_asymmetry = default_extended_asymmetry(transducer.hc_x);
            }
            let trial = DeviceConfig { transducer, ..*cfg };
            trial.validate()?;
            let spectrum = spectrum_for(&trial, bias, modes.clone())?;
            let (metrics, synth) = evaluate(&trial, bias, &spectrum, points)?;
            let s21_top_primary_db = to_db(synth.s21(top.f.unwrap())?.norm());
            Ok(CompareRow {
                shape,
                metrics,
                s21_top_primary_db,
                top_primary: top.label().to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::Engine;

    fn cfg() -> DeviceConfig<f64> {
        DeviceConfig::default()
    }

    fn bias(h0: f64) -> BiasField<f64> {
        BiasField::new(h0).unwrap()
    }

    #[test]
    fn grid_spans_band_with_margin() {
        let e = BandEdges { f_min: 6e9, f_max: 7e9 };
        let g = frequency_grid(e, 5).unwrap();
        assert_eq!(g, vec![4.5e9, 5.5e9, 6.5e9, 7.5e9, 8.5e9]);
        let low = frequency_grid(BandEdges { f_min: 1e9, f_max: 2e9 }, 3).unwrap();
        assert_eq!(low[0], 1e6);
        assert!(frequency_grid(e, 1).is_err());
    }

    #[test]
    fn sweep_centers_increase_with_field() {
        let rows = field_sweep(&cfg(), &[1500.0, 2500.0, 3500.0, 4500.0], 4001).unwrap();
        assert_eq!(rows.len(), 4);
        let centers: Vec<f64> = rows.iter().map(|r| r.outcome.as_ref().unwrap().f_center).collect();
        assert!(centers.windows(2).all(|w| w[1] > w[0]), "{centers:?}");
        let first = &rows[0];
        let e = first.edges.unwrap();
        assert!(e.contains(centers[0]));
        assert!((e.f_max - 6.65e9).abs() < 1e6);
    }

    #[test]
    fn sweep_keeps_input_order_and_single_rows() {
        let rows = field_sweep(&cfg(), &[3500.0, 1500.0], 2001).unwrap();
        assert_eq!(rows.iter().map(|r| r.h0).collect::<Vec<_>>(), vec![3500.0, 1500.0]);
        assert_eq!(field_sweep(&cfg(), &[2500.0], 2001).unwrap().len(), 1);
        assert!(field_sweep(&cfg(), &[], 2001).is_err());
        assert!(field_sweep(&cfg(), &[2500.0, -1.0], 2001).is_err());
    }

    #[test]
    fn sweep_records_row_failures() {
        let mut c = cfg();
        c.solver.engine = Engine::Paper;
        c.solver.options.max_iter = 1;
        let rows = field_sweep(&c, &[1500.0, 2500.0], 2001).unwrap();
        assert!(rows.iter().all(|r| r.outcome.is_err()));
        assert!(rows[0].outcome.as_ref().unwrap_err().contains("solved"));
    }

    #[test]
    fn ranges() {
        let r = GridRange { start: 40e-4, stop: 70e-4, step: 5e-4 };
        assert_eq!(r.values().unwrap().len(), 7);
        let r = GridRange { start: 60e-4, stop: 140e-4, step: 20e-4 };
        assert_eq!(r.values().unwrap().len(), 5);
        assert_eq!(GridRange::single(3.0).values().unwrap(), vec![3.0]);
        assert!(GridRange { start: 1.0, stop: 2.0, step: 0.0 }.values().is_err());
        assert!(GridRange { start: 2.0, stop: 1.0, step: 1.0 }.values().is_err());
    }

    #[test]
    fn single_point_grid_returns_that_point() {
        let o = optimize_apodization(&cfg(), &bias(2500.0), &[50e-4], &[80e-4], 2001).unwrap();
        assert_eq!(o.table.len(), 1);
        assert_eq!((o.best.hc_x, o.best.hc_y), (50e-4, 80e-4));
    }

    #[test]
    fn optimum_is_the_table_maximum_with_earliest_tie() {
        let xs = [0.0, 40e-4, 65e-4];
        let ys = [60e-4, 100e-4];
        let o = optimize_apodization(&cfg(), &bias(2500.0), &xs, &ys, 2001).unwrap();
        assert_eq!(o.table.len(), 6);
        assert_eq!((o.table[1].hc_x, o.table[1].hc_y), (0.0, 100e-4));
        let max = o.table.iter().filter_map(|r| r.score).fold(f64::MIN, f64::max);
        assert!(o.best_score >= max - SCORE_TIE_DB);
        let first = o.table.iter().find(|r| r.score.unwrap() >= max - SCORE_TIE_DB).unwrap();
        assert_eq!((o.best.hc_x, o.best.hc_y), (first.hc_x, first.hc_y));
        assert_eq!(Some(o.best_score), first.score);
        // hc_x = 0 rows are the straight electrode for every hc_y
        assert!((o.table[0].score.unwrap() - o.table[1].score.unwrap()).abs() < 1e-9);
        assert!(o.best_score >= o.table[0].score.unwrap());
    }

    #[test]
    fn near_equal_scores_keep_the_first_point() {
        // hc_x = 0 is the straight electrode whatever hc_y is; the scores
        // differ only in the last bits.
        let o = optimize_apodization(&cfg(), &bias(2500.0), &[0.0], &[60e-4, 80e-4, 100e-4, 120e-4], 2001).unwrap();
        assert_eq!(o.best.hc_y, 60e-4);
    }

    #[test]
    fn infeasible_grid_propagates_the_error() {
        let err = optimize_apodization(&cfg(), &bias(2500.0), &[65e-4], &[250e-4], 2001).unwrap_err();
        assert!(err.to_string().contains("hc_y > W/2"));
        let partial = optimize_apodization(&cfg(), &bias(2500.0), &[65e-4], &[100e-4, 250e-4], 2001).unwrap();
        assert!(partial.table[1].outcome.is_err());
    }

    #[test]
    fn full_cone_loses_the_top_primary_mode() {
        let rows = compare_shapes(&cfg(), &bias(2500.0), &[Shape::HalfCone, Shape::FullCone], 4001).unwrap();
        assert_eq!(rows[0].top_primary, "p10w1");
        assert!(rows[1].s21_top_primary_db < rows[0].s21_top_primary_db);
    }

    #[test]
    fn compare_fills_extended_asymmetry() {
        let rows = compare_shapes(&cfg(), &bias(2500.0), &Shape::ALL, 2001).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows.iter().map(|r| r.shape).collect::<Vec<_>>(), Shape::ALL.to_vec());
        assert_ne!(rows[1].metrics, rows[3].metrics);
    }
}
