//! Apodized transducer geometry and per-mode excitation coupling.
//!
//! Each transducer is described along the aperture coordinate `y ∈ [0, W]`
//! by its electrode width, the resulting current weight, and the local
//! transducer-to-transducer gap. The coupling of cavity mode (n, m) is the
//! overlap
//!
//! ```text
//! c_nm ∝ ∫_0^W w(y) sin(mπy/W) exp(i k_xn [gap(y) − gap0 + y tan θ]) dy
//! ```
//!
//! where `w(y)` is the current weight and `θ` the cavity tilt.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cavity::{CavityMode, ModeLabel};
use crate::error::{Error, Result};
use crate::materials::FerriteFilm;
use crate::quadrature::{integrate, integrate_real, QuadratureOptions};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Straight,
    FullCone,
    #[default]
    HalfCone,
    ExtendedCone,
}

impl Shape {
    pub const ALL: [Shape; 4] = [Shape::Straight, Shape::HalfCone, Shape::FullCone, Shape::ExtendedCone];

    pub fn as_str(&self) -> &'static str {
        match self {
            Shape::Straight => "straight",
            Shape::FullCone => "full_cone",
            Shape::HalfCone => "half_cone",
            Shape::ExtendedCone => "extended_cone",
        }
    }

    /// Shapes whose spacing to the facing transducer is constant along y.
    pub fn keeps_gap(&self) -> bool {
        !matches!(self, Shape::FullCone)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Shape::ALL
            .into_iter()
            .find(|shape| shape.as_str() == s)
            .ok_or_else(|| Error::validation(format!("unknown transducer shape '{s}'")))
    }
}

/// Geometry shared by the input and output transducers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransducerPair<T> {
    pub shape: Shape,
    /// Electrode width in the narrow central region, cm.
    pub base_width: T,
    /// Cone extent along x (extra electrode width at the ends), cm.
    pub hc_x: T,
    /// Cone extent along y at each end, cm.
    pub hc_y: T,
    /// Nominal spacing between the two transducers, cm.
    pub gap0: T,
    /// Cavity tilt relative to the transducers, degrees.
    pub tilt_deg: T,
    /// Extra cone extent along x at the high-y end (extended cone only), cm.
    pub extended_asymmetry: T,
}

impl<T: Real> TransducerPair<T> {
    /// Fabricated half-cone geometry for the given cavity: transducers at the
    /// quarter-length positions, hence separated by L/2.
    pub fn for_film(film: &FerriteFilm<T>) -> Self {
        Self {
            shape: Shape::HalfCone,
            base_width: T::lit(10e-4),
            hc_x: T::lit(65e-4),
            hc_y: T::lit(100e-4),
            gap0: film.length * T::half(),
            tilt_deg: T::zero(),
            extended_asymmetry: T::zero(),
        }
    }

    pub fn with_shape(mut self, shape: Shape) -> Self {
        self.shape = shape;
        self
    }

    pub fn validate(&self, film: &FerriteFilm<T>) -> Result<()> {
        if !(self.base_width > T::zero()) {
            return Err(Error::validation("base_width must be positive"));
        }
        if !(self.hc_x >= T::zero()) {
            return Err(Error::validation("hc_x must be non-negative"));
        }
        if !(self.hc_y >= T::zero()) {
            return Err(Error::validation("hc_y must be non-negative"));
        }
        if self.hc_y > film.width * T::half() {
            return Err(Error::validation("hc_y must not exceed half the cavity width (hc_y > W/2)"));
        }
        if !(self.gap0 > T::zero()) {
            return Err(Error::validation("gap0 must be positive"));
        }
        if !(self.tilt_deg >= T::zero() && self.tilt_deg < T::lit(90.0)) {
            return Err(Error::validation("tilt_deg must lie in [0, 90)"));
        }
        if !(self.extended_asymmetry >= T::zero()) {
            return Err(Error::validation("extended_asymmetry must be non-negative"));
        }
        Ok(())
    }

    fn end_extents(&self) -> (T, T) {
        match self.shape {
            Shape::Straight => (T::zero(), T::zero()),
            Shape::ExtendedCone => (self.hc_x, self.hc_x + self.extended_asymmetry),
            Shape::HalfCone | Shape::FullCone => (self.hc_x, self.hc_x),
        }
    }

    /// Extra electrode width beyond `base_width` at position y.
    fn flare(&self, film: &FerriteFilm<T>, y: T) -> Result<T> {
        check_domain(film, y)?;
        let (low, high) = self.end_extents();
        if self.hc_y == T::zero() {
            return Ok(T::zero());
        }
        if y < self.hc_y {
            Ok(TaperArc::new(low, self.hc_y).eval(self.hc_y - y))
        } else if y > film.width - self.hc_y {
            Ok(TaperArc::new(high, self.hc_y).eval(y - (film.width - self.hc_y)))
        } else {
            Ok(T::zero())
        }
    }

    /// Positions where the profiles change smoothness.
    fn breakpoints(&self, film: &FerriteFilm<T>) -> Vec<T> {
        let mut pts = vec![T::zero(), self.hc_y, film.width * T::half(), film.width - self.hc_y, film.width];
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }
}

fn check_domain<T: Real>(film: &FerriteFilm<T>, y: T) -> Result<()> {
    if y >= T::zero() && y <= film.width {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            y: y.to_f64_lossy(),
            width: film.width.to_f64_lossy(),
        })
    }
}

/// Circle (or straight line, when the points are collinear) through three
/// points `(u, w)`, evaluated as a function `w(u)` on the branch containing
/// the middle point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThreePointArc<T> {
    Circle { cu: T, cw: T, radius: T, lower: bool },
    Line { u0: T, w0: T, slope: T },
}

impl<T: Real> ThreePointArc<T> {
    pub fn through(p1: (T, T), p2: (T, T), p3: (T, T)) -> Self {
        let (ax, ay) = p1;
        let (bx, by) = p2;
        let (cx, cy) = p3;
        let d = T::two() * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
        let span = (cx - ax).abs().max((cy - ay).abs()).max(T::min_positive_value());
        if d.abs() <= T::lit(1e3) * T::epsilon() * span * span {
            return ThreePointArc::Line {
                u0: ax,
                w0: ay,
                slope: if cx == ax { T::zero() } else { (cy - ay) / (cx - ax) },
            };
        }
        let a2 = ax.sq() + ay.sq();
        let b2 = bx.sq() + by.sq();
        let c2 = cx.sq() + cy.sq();
        let cu = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
        let cw = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
        let radius = ((ax - cu).sq() + (ay - cw).sq()).sqrt();
        ThreePointArc::Circle {
            cu,
            cw,
            radius,
            lower: by <= cw,
        }
    }

    pub fn eval(&self, u: T) -> T {
        match *self {
            ThreePointArc::Line { u0, w0, slope } => w0 + slope * (u - u0),
            ThreePointArc::Circle { cu, cw, radius, lower } => {
                let root = (radius.sq() - (u - cu).sq()).max(T::zero()).sqrt();
                if lower {
                    cw - root
                } else {
                    cw + root
                }
            }
        }
    }
}

/// Cone flare over one end of the aperture, parameterized by the distance
/// `u ∈ [0, span]` from the taper start. Rises monotonically from 0 to
/// `extent`, leaving the straight electrode tangentially when
/// `extent ≤ span` and meeting the cavity edge square otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaperArc<T> {
    pub start: (T, T),
    pub mid: (T, T),
    pub end: (T, T),
    arc: ThreePointArc<T>,
}

impl<T: Real> TaperArc<T> {
    pub fn new(extent: T, span: T) -> Self {
        let start = (T::zero(), T::zero());
        let end = (span, extent);
        let half_span = span * T::half();
        let mid_w = if extent == T::zero() || span == T::zero() {
            T::zero()
        } else if extent <= span {
            // tangent to the electrode edge at the taper start
            let r = (span.sq() + extent.sq()) / (T::two() * extent);
            r - (r.sq() - half_span.sq()).sqrt()
        } else {
            // tangent to the cavity edge at the widest point
            let r = (span.sq() + extent.sq()) / (T::two() * span);
            extent - (r.sq() - (half_span - span + r).sq()).sqrt()
        };
        let mid = (half_span, mid_w);
        Self {
            start,
            mid,
            end,
            arc: ThreePointArc::through(start, mid, end),
        }
    }

    pub fn eval(&self, u: T) -> T {
        let (span, extent) = self.end;
        if span == T::zero() || extent == T::zero() {
            return T::zero();
        }
        self.arc.eval(u.max(T::zero()).min(span)).max(T::zero()).min(extent)
    }
}

/// Maps local electrode width to a relative current weight.
pub trait CurrentModel<T: Real>: Sync {
    fn weight(&self, base_width: T, electrode_width: T) -> T;
}

/// Current spread over a wider electrode dilutes in proportion to width.
#[derive(Debug, Clone, Copy, Default)]
pub struct InverseWidth;

impl<T: Real> CurrentModel<T> for InverseWidth {
    fn weight(&self, base_width: T, electrode_width: T) -> T {
        base_width / electrode_width
    }
}

pub fn electrode_width_profile<T: Real>(t: &TransducerPair<T>, film: &FerriteFilm<T>, y: T) -> Result<T> {
    Ok(t.base_width + t.flare(film, y)?)
}

pub fn current_weight<T: Real>(t: &TransducerPair<T>, film: &FerriteFilm<T>, y: T) -> Result<T> {
    current_weight_with(t, film, y, &InverseWidth)
}

pub fn current_weight_with<T: Real, M: CurrentModel<T>>(
    t: &TransducerPair<T>,
    film: &FerriteFilm<T>,
    y: T,
    model: &M,
) -> Result<T> {
    let width = electrode_width_profile(t, film, y)?;
    Ok(model.weight(t.base_width, width))
}

pub fn gap_profile<T: Real>(t: &TransducerPair<T>, film: &FerriteFilm<T>, y: T) -> Result<T> {
    let gap = if t.shape.keeps_gap() {
        check_domain(film, y)?;
        t.gap0
    } else {
        t.gap0 - T::two() * t.flare(film, y)?
    };
    if gap <= T::zero() {
        return Err(Error::NonPhysicalGap {
            y: y.to_f64_lossy(),
            gap: gap.to_f64_lossy(),
        });
    }
    Ok(gap)
}

/// Normalized complex coupling coefficients, strongest entry at magnitude 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpectrum<T> {
    pub entries: BTreeMap<ModeLabel, Complex<T>>,
    /// Raw magnitude of the strongest overlap integral, cm.
    pub scale: T,
    /// ∫ w(y) dy over the aperture, cm.
    pub weight_integral: T,
}

impl<T: Real> CouplingSpectrum<T> {
    pub fn get(&self, label: ModeLabel) -> Option<Complex<T>> {
        self.entries.get(&label).copied()
    }

    pub fn magnitude(&self, n: u32, m: u32) -> T {
        self.get(ModeLabel { n, m }).map(|c| c.norm()).unwrap_or(T::zero())
    }

    /// Un-normalized overlap integral, cm.
    pub fn raw(&self, n: u32, m: u32) -> Complex<T> {
        self.get(ModeLabel { n, m })
            .map(|c| c * self.scale)
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// All couplings set to zero; useful for baseline responses.
    pub fn zeroed(&self) -> Self {
        Self {
            entries: self
                .entries
                .keys()
                .map(|&k| (k, Complex::new(T::zero(), T::zero())))
                .collect(),
            scale: T::zero(),
            weight_integral: self.weight_integral,
        }
    }
}

pub fn mode_coupling<T: Real>(
    t: &TransducerPair<T>,
    film: &FerriteFilm<T>,
    modes: &[CavityMode<T>],
) -> Result<CouplingSpectrum<T>> {
    mode_coupling_with(t, film, modes, &InverseWidth)
}

pub fn mode_coupling_with<T: Real, M: CurrentModel<T>>(
    t: &TransducerPair<T>,
    film: &FerriteFilm<T>,
    modes: &[CavityMode<T>],
    model: &M,
) -> Result<CouplingSpectrum<T>> {
    if modes.is_empty() {
        return Err(Error::EmptyModeSet);
    }
    t.validate(film)?;
    let breaks = t.breakpoints(film);
    // Surface any gap collapse before integrating.
    for &y in &breaks {
        gap_profile(t, film, y)?;
    }

    let weight = |y: T| current_weight_with(t, film, y, model).unwrap_or(T::zero());
    let tight = QuadratureOptions {
        abs_tol: T::lit(1e-13) * film.width,
        rel_tol: T::lit(1e-12),
        ..QuadratureOptions::default()
    };
    let (weight_integral, _) = integrate_real(weight, &breaks, &tight)?;
    let opts = QuadratureOptions {
        abs_tol: (T::lit(1e-10) * weight_integral).max(T::lit(16.0) * T::epsilon() * weight_integral),
        rel_tol: T::zero(),
        ..QuadratureOptions::default()
    };
    let tan_tilt = t.tilt_deg.to_radians().tan();

    let raw: Vec<(ModeLabel, Complex<T>)> = modes
        .par_iter()
        .map(|mode| {
            let k_x = mode.k_x;
            let m = T::from_u32(mode.m).unwrap();
            let integrand = |y: T| {
                let w = weight(y);
                let shape = (m * T::PI() * y / film.width).sin();
                let deviation = if t.shape.keeps_gap() {
                    T::zero()
                } else {
                    -T::two() * t.flare(film, y).unwrap_or(T::zero())
                };
                let phase = k_x * (deviation + y * tan_tilt);
                Complex::from_polar(w * shape, phase)
            };
            integrate(integrand, &breaks, &opts).map(|r| (mode.label(), r.value))
        })
        .collect::<Result<_>>()?;

    let scale = raw.iter().map(|(_, c)| c.norm()).fold(T::zero(), T::max);
    if !(scale > T::zero()) {
        return Err(Error::DegenerateCoupling);
    }
    Ok(CouplingSpectrum {
        entries: raw.into_iter().map(|(k, c)| (k, c / scale)).collect(),
        scale,
        weight_integral,
    })
}
