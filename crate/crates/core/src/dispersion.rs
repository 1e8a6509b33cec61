//! Spin-wave dispersion for the in-plane magnetized film.
//!
//! Two engines are provided:
//!
//! * [`Engine::Paper`] evaluates the dipole-exchange relation
//!   `f² = γ² [h0 + b(1 − P + α k_z²)] [h0 + b(P k_ym²/k_z² + α k_z²)]`
//!   with the width-mode wavenumber inside the film, `k_ym² = (mπ/W)² / μ1(f)`.
//!   Because μ1 depends on f, width modes are solved self-consistently by
//!   bisection on `g(f) = f − F(k_z(f))` inside the surface-wave band.
//! * [`Engine::DeOracle`] is the closed-form surface-wave curve
//!   `f = γ √(h0 (h0 + b) + (b²/4)(1 − e^{−2 k_x T}))`, pinned to the band
//!   edges at both limits. It carries no width dependence.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::{permeability, resonance_bounds, BiasField, FerriteFilm};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Engine {
    #[serde(rename = "paper")]
    Paper,
    #[default]
    #[serde(rename = "de")]
    DeOracle,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Paper => "paper",
            Engine::DeOracle => "de",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Engine::Paper),
            "de" | "de-oracle" | "de_oracle" => Ok(Engine::DeOracle),
            other => Err(Error::validation(format!(
                "unknown engine '{other}' (expected 'paper' or 'de')"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionPoint<T> {
    /// Propagation wavenumber, rad/cm.
    pub k_x: T,
    /// Width-mode order; 0 denotes an infinitely wide film.
    pub m: u32,
    /// Frequency, Hz.
    pub f: T,
    /// Total effective wavenumber inside the film, rad/cm.
    pub k_z: T,
    pub engine: Engine,
}

/// Thickness reduction factor `P(x) = 1 − (1 − e^{−x}) / x` with `x = k_z T`.
pub fn reduction_factor<T: Real>(x: T) -> Result<T> {
    if x < T::zero() || x.is_nan() {
        return Err(Error::NegativeArgument(x.to_f64_lossy()));
    }
    if x < T::lit(1e-4) {
        // x/2 − x²/6, the series about 0
        return Ok(x * T::half() - x.sq() / T::lit(6.0));
    }
    Ok(T::one() + (-x).exp_m1() / x)
}

/// Pure evaluation of the dipole-exchange relation; no self-consistency.
pub fn dipole_exchange_frequency<T: Real>(
    film: &FerriteFilm<T>,
    bias: &BiasField<T>,
    k_x: T,
    k_ym: T,
    k_z: T,
) -> Result<T> {
    if k_x < T::zero() || k_ym < T::zero() || k_z < T::zero() {
        return Err(Error::NegativeArgument(k_x.min(k_ym).min(k_z).to_f64_lossy()));
    }
    let p = reduction_factor(k_z * film.thickness)?;
    let ratio = if k_z == T::zero() {
        T::zero()
    } else {
        (k_ym / k_z).sq()
    };
    let exchange = film.exch * k_z.sq();
    let first = bias.h0 + film.b_sat * (T::one() - p + exchange);
    let second = bias.h0 + film.b_sat * (p * ratio + exchange);
    if !(first > T::zero()) {
        return Err(Error::NegativeRadicand { bracket: "first" });
    }
    if !(second > T::zero()) {
        return Err(Error::NegativeRadicand { bracket: "second" });
    }
    Ok(film.gamma * (first * second).sqrt())
}

/// Closed-form surface-wave frequency used as the band-anchored reference.
pub fn de_surface_frequency<T: Real>(film: &FerriteFilm<T>, bias: &BiasField<T>, k_x: T) -> Result<T> {
    if k_x < T::zero() || k_x.is_nan() {
        return Err(Error::NegativeArgument(k_x.to_f64_lossy()));
    }
    let base = bias.h0 * (bias.h0 + film.b_sat);
    let surface = film.b_sat.sq() / T::lit(4.0) * -(-T::two() * k_x * film.thickness).exp_m1();
    Ok(film.gamma * (base + surface).sqrt())
}

/// Inside-film total wavenumber for width order `m` at frequency `f`.
///
/// Returns `(k_z, k_ym)` with `k_ym² = (mπ/W)² / μ1(f)`.
pub fn inside_wavenumber<T: Real>(
    film: &FerriteFilm<T>,
    bias: &BiasField<T>,
    k_x: T,
    m: u32,
    f: T,
) -> Result<(T, T)> {
    let k_y = width_wavenumber(film, m);
    let mu1 = permeability(film, bias, f)?.mu1;
    let k_ym_sq = k_y.sq() / mu1;
    if k_ym_sq < T::zero() {
        return Err(Error::NegativeArgument(k_ym_sq.to_f64_lossy()));
    }
    Ok(((k_x.sq() + k_ym_sq).sqrt(), k_ym_sq.sqrt()))
}

/// Diagnostic only: total wavenumber outside the film, where μ1 = 1.
pub fn outside_wavenumber<T: Real>(film: &FerriteFilm<T>, k_x: T, m: u32) -> T {
    (k_x.sq() + width_wavenumber(film, m).sq()).sqrt()
}

/// Bare width quantization `mπ/W`, rad/cm.
pub fn width_wavenumber<T: Real>(film: &FerriteFilm<T>, m: u32) -> T {
    T::from_u32(m).unwrap() * T::PI() / film.width
}

/// Self-consistency residual `g(f) = f − F(k_z(f))`, Hz.
pub fn mode_residual<T: Real>(
    film: &FerriteFilm<T>,
    bias: &BiasField<T>,
    k_x: T,
    m: u32,
    f: T,
) -> Result<T> {
    let (k_z, k_ym) = inside_wavenumber(film, bias, k_x, m, f)?;
    Ok(f - dipole_exchange_frequency(film, bias, k_x, k_ym, k_z)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions<T> {
    /// Relative inset of the bracket from both band edges.
    pub bracket_eps: T,
    /// Convergence threshold on |g|, Hz. Widened automatically to a few ulps
    /// of f for narrow scalar types.
    pub residual_tol_hz: T,
    pub max_iter: usize,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            bracket_eps: T::lit(1e-6),
            residual_tol_hz: T::one(),
            max_iter: 200,
        }
    }
}

impl<T: Real> SolverOptions<T> {
    fn tolerance_at(&self, f: T) -> T {
        self.residual_tol_hz.max(T::lit(8.0) * T::epsilon() * f.abs())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bracket_eps > T::zero() && self.bracket_eps < T::half()) {
            return Err(Error::validation("bracket_eps must lie in (0, 0.5)"));
        }
        if !(self.residual_tol_hz > T::zero()) {
            return Err(Error::validation("residual_tol_hz must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::validation("max_iter must be at least 1"));
        }
        Ok(())
    }
}

fn check_mode_inputs<T: Real>(k_x: T, m: u32) -> Result<()> {
    if !(k_x > T::zero()) {
        return Err(Error::validation("k_x must be positive for a width mode"));
    }
    if m == 0 {
        return Err(Error::validation("width order m must be at least 1"));
    }
    Ok(())
}

pub fn solve_mode_frequency<T: Real>(
    film: &FerriteFilm<T>,
    bias: &BiasField<T>,
    k_x: T,
    m: u32,
) -> Result<DispersionPoint<T>> {
    solve_mode_frequency_with(film, bias, k_x, m, &SolverOptions::default())
}

/// Bisection on the self-consistency residual over the open band.
///
/// μ1 is positive everywhere inside `(f_min, f_max)`, so the inside-film
/// wavenumber stays real on the whole bracket.
pub fn solve_mode_frequency_with<T: Real>(
    film: &FerriteFilm<T>,
    bias: &BiasField<T>,
    k_x: T,
    m: u32,
    opts: &SolverOptions<T>,
) -> Result<DispersionPoint<T>> {
    check_mode_inputs(k_x, m)?;
    let edges = resonance_bounds(film, bias)?;
    let mut lo = edges.f_min * (T::one() + opts.bracket_eps);
    let mut hi = edges.f_max * (T::one() - opts.bracket_eps);
    let residual = |f: T| mode_residual(film, bias, k_x, m, f);

    let g_lo = residual(lo)?;
    let g_hi = residual(hi)?;
    let finish = |f: T| -> Result<DispersionPoint<T>> {
        let (k_z, _) = inside_wavenumber(film, bias, k_x, m, f)?;
        Ok(DispersionPoint {
            k_x,
            m,
            f,
            k_z,
            engine: Engine::Paper,
        })
    };
    if g_lo.abs() < opts.tolerance_at(lo) {
        return finish(lo);
    }
    if g_hi.abs() < opts.tolerance_at(hi) {
        return finish(hi);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::NoSolutionInBand {
            k_x: k_x.to_f64_lossy(),
            m,
        });
    }

    let lo_negative = g_lo < T::zero();
    let mut last = g_lo;
    for _ in 0..opts.max_iter {
        let mid = lo + (hi - lo) * T::half();
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = residual(mid)?;
        last = g_mid;
        if g_mid.abs() < opts.tolerance_at(mid) {
            return finish(mid);
        }
        if (g_mid < T::zero()) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual_hz: last.abs().to_f64_lossy(),
    })
}

/// Damped fixed-point iteration `f ← f + λ (F(k_z(f)) − f)`; cross-check for
/// the bisection solver. The step is halved whenever the residual grows.
pub fn fixed_point_mode_frequency<T: Real>(
    film: &FerriteFilm<T>,
    bias: &BiasField<T>,
    k_x: T,
    m: u32,
    opts: &SolverOptions<T>,
) -> Result<T> {
    check_mode_inputs(k_x, m)?;
    let edges = resonance_bounds(film, bias)?;
    let lo = edges.f_min * (T::one() + opts.bracket_eps);
    let hi = edges.f_max * (T::one() - opts.bracket_eps);
    let mut f = (lo + hi) * T::half();
    let mut g = mode_residual(film, bias, k_x, m, f)?;
    let mut damping = T::half();
    let budget = opts.max_iter * 50;
    for _ in 0..budget {
        if g.abs() < opts.tolerance_at(f) {
            return Ok(f);
        }
        let candidate = (f - damping * g).max(lo).min(hi);
        let g_new = mode_residual(film, bias, k_x, m, candidate)?;
        if g_new.abs() < g.abs() {
            f = candidate;
            g = g_new;
            damping = (damping * T::lit(1.5)).min(T::one());
        } else {
            damping *= T::half();
            if damping < T::lit(1e-12) {
                break;
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: budget,
        residual_hz: g.abs().to_f64_lossy(),
    })
}

/// One entry of a dispersion curve. Unsolved grid points are kept as gaps
/// and never interpolated.
#[derive(Debug, Clone, PartialEq)]
pub enum CurvePoint<T> {
    Solved(DispersionPoint<T>),
    Gap { k_x: T, m: u32, reason: String },
}

impl<T: Real> CurvePoint<T> {
    pub fn point(&self) -> Option<&DispersionPoint<T>> {
        match self {
            CurvePoint::Solved(p) => Some(p),
            CurvePoint::Gap { .. } => None,
        }
    }

    pub fn k_x(&self) -> T {
        match self {
            CurvePoint::Solved(p) => p.k_x,
            CurvePoint::Gap { k_x, .. } => *k_x,
        }
    }
}

/// Evaluates a single (k_x, m) point with the requested engine.
pub fn evaluate_point<T: Real>(
    film: &FerriteFilm<T>,
    bias: &BiasField<T>,
    m: u32,
    k_x: T,
    engine: Engine,
) -> Result<DispersionPoint<T>> {
    match (engine, m) {
        (Engine::DeOracle, 0) => Ok(DispersionPoint {
            k_x,
            m,
            f: de_surface_frequency(film, bias, k_x)?,
            k_z: k_x,
            engine,
        }),
        (Engine::DeOracle, _) => Err(Error::validation(
            "the closed-form engine is defined for m = 0 only",
        )),
        (Engine::Paper, 0) => Ok(DispersionPoint {
            k_x,
            m,
            f: dipole_exchange_frequency(film, bias, k_x, T::zero(), k_x)?,
            k_z: k_x,
            engine,
        }),
        (Engine::Paper, _) => solve_mode_frequency(film, bias, k_x, m),
    }
}

pub fn dispersion_curve<T: Real>(
    film: &FerriteFilm<T>,
    bias: &BiasField<T>,
    m: u32,
    k_grid: &[T],
    engine: Engine,
) -> Result<Vec<CurvePoint<T>>> {
    if engine == Engine::DeOracle && m != 0 {
        return Err(Error::validation(
            "the closed-form engine is defined for m = 0 only",
        ));
    }
    if k_grid.iter().any(|k| !(*k >= T::zero())) {
        return Err(Error::validation("k grid entries must be non-negative"));
    }
    if k_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::validation("k grid must be strictly increasing"));
    }
    Ok(k_grid
        .par_iter()
        .map(|&k_x| match evaluate_point(film, bias, m, k_x, engine) {
            Ok(p) => CurvePoint::Solved(p),
            Err(e) => CurvePoint::Gap {
                k_x,
                m,
                reason: e.to_string(),
            },
        })
        .collect())
}

/// Outcome of checking whether higher width orders sit at lower frequency.
#[derive(Debug, Clone)]
pub struct WidthOrderingReport<T> {
    /// `(k_x, [f(m = 1), f(m = 2), ...])`; `None` where the solver failed.
    pub rows: Vec<(T, Vec<Option<T>>)>,
    pub ordering_holds: bool,
}

impl<T: Real> WidthOrderingReport<T> {
    pub fn discrepancy(&self) -> Option<String> {
        if self.ordering_holds {
            return None;
        }
        Some(
            "KNOWN DISCREPANCY [width-mode ordering of the printed dipole-exchange relation]: \
             width modes are expected to shift toward lower frequency as m increases, but the \
             relation as printed, solved with the inside-film width wavenumber, yields frequencies \
             that increase with m. A propagation-angle factor may be missing from the P k_ym^2/k_z^2 \
             term; the printed form is kept unchanged and the closed-form surface-wave engine \
             remains the default for response synthesis."
                .to_string(),
        )
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k_x, freqs) in &self.rows {
            let cells: Vec<String> = freqs
                .iter()
                .map(|f| match f {
                    Some(f) => format!("{:.6}", f.to_f64_lossy() / 1e9),
                    None => "gap".to_string(),
                })
                .collect();
            out.push_str(&format!("k_x = {k_x} rad/cm: f(m=1..) GHz = [{}]\n", cells.join(", ")));
        }
        match self.discrepancy() {
            Some(d) => out.push_str(&d),
            None => out.push_str("width-mode ordering holds (frequency decreases with m)"),
        }
        out
    }
}

pub fn width_ordering_report<T: Real>(
    film: &FerriteFilm<T>,
    bias: &BiasField<T>,
    k_values: &[T],
    m_max: u32,
) -> WidthOrderingReport<T> {
    let rows: Vec<(T, Vec<Option<T>>)> = k_values
        .iter()
        .map(|&k_x| {
            let freqs = (1..=m_max)
                .map(|m| solve_mode_frequency(film, bias, k_x, m).ok().map(|p| p.f))
                .collect();
            (k_x, freqs)
        })
        .collect();
    let ordering_holds = rows.iter().all(|(_, freqs)| {
        freqs.iter().all(Option::is_some)
            && freqs.windows(2).all(|w| w[1].unwrap() < w[0].unwrap())
    });
    WidthOrderingReport {
        rows,
        ordering_holds,
    }
}
