//! Film constants, bias field, and the gyrotropic permeability of the
//! magnetized film.
//!
//! Units are CGS-Gaussian throughout: fields in Gauss, lengths in cm,
//! frequencies in Hz. Every magnetization symbol maps onto the single
//! saturation induction `b_sat` (4πM_s).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Material constants and cavity geometry of the YIG film.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FerriteFilm<T> {
    /// Saturation induction 4πM_s, Gauss.
    pub b_sat: T,
    /// Gyromagnetic ratio, Hz/Gauss.
    pub gamma: T,
    /// Exchange stiffness, cm².
    pub exch: T,
    /// Film thickness, cm.
    pub thickness: T,
    /// Cavity length along propagation (x), cm.
    pub length: T,
    /// Cavity width along the transducers (y), cm.
    pub width: T,
    /// Loaded quality factor applied to every cavity mode.
    pub q_loaded: T,
}

impl<T: Real> Default for FerriteFilm<T> {
    fn default() -> Self {
        Self {
            b_sat: T::lit(1750.0),
            gamma: T::lit(2.8e6),
            exch: T::lit(5.18e-13),
            thickness: T::lit(15e-4),
            length: T::lit(280e-4),
            width: T::lit(400e-4),
            q_loaded: T::lit(500.0),
        }
    }
}

impl<T: Real> FerriteFilm<T> {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("b_sat", self.b_sat),
            ("gamma", self.gamma),
            ("exch", self.exch),
            ("thickness", self.thickness),
            ("length", self.length),
            ("width", self.width),
            ("q_loaded", self.q_loaded),
        ];
        for (name, value) in fields {
            if !(value > T::zero()) || !value.is_finite() {
                return Err(Error::validation(format!("{name} must be positive")));
            }
        }
        if self.thickness >= self.width {
            return Err(Error::validation("thickness must be smaller than width"));
        }
        if self.thickness >= self.length {
            return Err(Error::validation("thickness must be smaller than length"));
        }
        Ok(())
    }
}

/// Orientation of the applied bias. Only the surface-wave geometry (in-plane,
/// parallel to the transducers, perpendicular to propagation) is modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasOrientation {
    #[default]
    InPlaneParallelToTransducers,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasField<T> {
    /// Applied field magnitude, Gauss.
    pub h0: T,
    pub orientation: BiasOrientation,
}

impl<T: Real> BiasField<T> {
    pub fn new(h0: T) -> Result<Self> {
        check_field(h0)?;
        Ok(Self {
            h0,
            orientation: BiasOrientation::InPlaneParallelToTransducers,
        })
    }
}

fn check_field<T: Real>(h0: T) -> Result<()> {
    if h0 > T::zero() && h0.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveField(h0.to_f64_lossy()))
    }
}

/// Components of the lossless permeability tensor
///
/// ```text
///     | mu1    mu2  0 |
///     | -i mu2 mu1  0 |
///     | 0      0    1 |
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermeabilityTensor<T> {
    pub mu1: T,
    /// Off-diagonal magnitude. The numerator is Ω_H as in the source
    /// relation; the textbook Polder form has Ω there. Nothing downstream
    /// consumes this component.
    pub mu2: T,
    /// Ω = f / (γ b_sat).
    pub omega_norm: T,
    /// Ω_H = h0 / b_sat.
    pub omega_h: T,
}

impl<T: Real> PermeabilityTensor<T> {
    /// Non-magnetic media: unit diagonal, no gyrotropy.
    pub fn free_space() -> Self {
        Self {
            mu1: T::one(),
            mu2: T::zero(),
            omega_norm: T::zero(),
            omega_h: T::zero(),
        }
    }
}

/// Band edges of the surface-wave manifold for a given bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandEdges<T> {
    /// Uniform-precession (k → 0) frequency, Hz.
    pub f_min: T,
    /// Surface-wave convergence frequency (k → ∞), Hz.
    pub f_max: T,
}

impl<T: Real> BandEdges<T> {
    pub fn contains(&self, f: T) -> bool {
        f >= self.f_min && f <= self.f_max
    }
}

pub fn permeability<T: Real>(
    film: &FerriteFilm<T>,
    bias: &BiasField<T>,
    f: T,
) -> Result<PermeabilityTensor<T>> {
    if !(f > T::zero()) {
        return Err(Error::NonPositiveFrequency(f.to_f64_lossy()));
    }
    check_field(bias.h0)?;
    let omega = f / (film.gamma * film.b_sat);
    let omega_h = bias.h0 / film.b_sat;
    let denom = omega.sq() - omega_h.sq();
    let rel_tol = T::lit(1e-12).max(T::lit(4.0) * T::epsilon());
    if denom.abs() <= rel_tol * omega.sq().max(omega_h.sq()) {
        return Err(Error::SingularPermeability {
            f_hz: f.to_f64_lossy(),
        });
    }
    Ok(PermeabilityTensor {
        mu1: T::one() - omega_h / denom,
        mu2: omega_h / denom,
        omega_norm: omega,
        omega_h,
    })
}

/// `f_min = γ √(h0 (h0 + b_sat))`, `f_max = γ √(h0 (h0 + b_sat) + b_sat²/4)`.
pub fn resonance_bounds<T: Real>(film: &FerriteFilm<T>, bias: &BiasField<T>) -> Result<BandEdges<T>> {
    check_field(bias.h0)?;
    let base = bias.h0 * (bias.h0 + film.b_sat);
    Ok(BandEdges {
        f_min: film.gamma * base.sqrt(),
        f_max: film.gamma * (base + film.b_sat.sq() / T::lit(4.0)).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rel_close;
    use proptest::prelude::*;

    fn film() -> FerriteFilm<f64> {
        FerriteFilm::default()
    }

    fn bias(h0: f64) -> BiasField<f64> {
        BiasField::new(h0).unwrap()
    }

    #[test]
    fn tensor_at_9p3_ghz_matches_hand_arithmetic() {
        let p = permeability(&film(), &bias(2500.0), 9.3e9).unwrap();
        assert!((p.omega_norm - 1.897_959).abs() < 1e-6);
        assert!((p.omega_h - 1.428_571).abs() < 1e-6);
        assert!((p.mu1 - 0.085_089_357_161_909_84).abs() < 1e-12);
        assert!((p.mu2 - 0.914_910_642_838_090_2).abs() < 1e-12);
    }

    #[test]
    fn tensor_tends_to_free_space_at_high_frequency() {
        let p = permeability(&film(), &bias(2500.0), 1e16).unwrap();
        let free = PermeabilityTensor::<f64>::free_space();
        assert!((p.mu1 - free.mu1).abs() < 1e-6);
        assert!((p.mu2 - free.mu2).abs() < 1e-6);
    }

    #[test]
    fn pole_at_larmor_frequency() {
        let err = permeability(&film(), &bias(2500.0), 7.0e9).unwrap_err();
        assert!(matches!(err, Error::SingularPermeability { .. }));
    }

    #[test]
    fn rejects_non_positive_frequency() {
        for f in [0.0, -1.0] {
            assert!(matches!(
                permeability(&film(), &bias(2500.0), f),
                Err(Error::NonPositiveFrequency(_))
            ));
        }
    }

    #[test]
    fn band_edges_at_2500_gauss() {
        let b = resonance_bounds(&film(), &bias(2500.0)).unwrap();
        assert!(rel_close(b.f_min, 2.8e6 * 10_625_000f64.sqrt(), 1e-15));
        assert!((b.f_min / 1e9 - 9.1269).abs() < 5e-5);
        assert!((b.f_max - 9.45e9).abs() < 1.0);
    }

    #[test]
    fn band_edges_at_1500_gauss() {
        let b = resonance_bounds(&film(), &bias(1500.0)).unwrap();
        assert!((b.f_min - 6_182_232_606.429_493).abs() < 1e-3);
        assert!((b.f_max - 6.65e9).abs() < 1e-3);
    }

    #[test]
    fn band_edges_vanishing_field_limit() {
        let b = resonance_bounds(&film(), &BiasField { h0: 1e-9, ..bias(1.0) }).unwrap();
        assert!(b.f_min < 1e6);
        assert!((b.f_max - 2.45e9).abs() / 2.45e9 < 1e-9);
    }

    #[test]
    fn rejects_non_positive_field() {
        assert!(matches!(BiasField::new(0.0f64), Err(Error::NonPositiveField(_))));
        let raw = BiasField {
            h0: -5.0,
            orientation: BiasOrientation::default(),
        };
        assert!(matches!(resonance_bounds(&film(), &raw), Err(Error::NonPositiveField(_))));
    }

    #[test]
    fn mu1_vanishes_at_f_min() {
        for h0 in [800.0, 1500.0, 2500.0, 4500.0, 9800.0] {
            let b = resonance_bounds(&film(), &bias(h0)).unwrap();
            let p = permeability(&film(), &bias(h0), b.f_min).unwrap();
            assert!(p.mu1.abs() < 1e-9, "h0 = {h0}: mu1 = {}", p.mu1);
        }
    }

    #[test]
    fn film_validation() {
        assert!(film().validate().is_ok());
        let bad = FerriteFilm { width: -1.0, ..film() };
        assert_eq!(bad.validate().unwrap_err().to_string(), "width must be positive");
        let thick = FerriteFilm { thickness: 0.05, ..film() };
        assert!(thick.validate().is_err());
    }

    #[test]
    fn single_precision_agrees() {
        let film32 = FerriteFilm::<f32>::default();
        let b32 = resonance_bounds(&film32, &BiasField::new(2500.0f32).unwrap()).unwrap();
        let b64 = resonance_bounds(&film(), &bias(2500.0)).unwrap();
        assert!(((b32.f_min as f64) - b64.f_min).abs() / b64.f_min < 1e-6);
        let p32 = permeability(&film32, &BiasField::new(2500.0f32).unwrap(), 9.3e9f32).unwrap();
        assert!((p32.mu1 as f64 - 0.085_089_36).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn mu1_increasing_and_inside_unit_interval_in_band(h0 in 200.0f64..12_000.0, a in 0.001f64..0.999, b in 0.001f64..0.999) {
            let edges = resonance_bounds(&film(), &bias(h0)).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-6);
            let span = edges.f_max - edges.f_min;
            let f1 = edges.f_min + lo * span;
            let f2 = edges.f_min + hi * span;
            let m1 = permeability(&film(), &bias(h0), f1).unwrap().mu1;
            let m2 = permeability(&film(), &bias(h0), f2).unwrap().mu1;
            prop_assert!(m1 < m2);
            prop_assert!(m1 > 0.0 && m1 < 1.0);
            prop_assert!(m2 > 0.0 && m2 < 1.0);
        }

        #[test]
        fn band_edges_ordered_and_increasing_in_field(h0 in 1.0f64..20_000.0, dh in 1.0f64..1000.0) {
            let a = resonance_bounds(&film(), &bias(h0)).unwrap();
            let b = resonance_bounds(&film(), &bias(h0 + dh)).unwrap();
            prop_assert!(a.f_min < a.f_max);
            prop_assert!(b.f_min > a.f_min);
            prop_assert!(b.f_max > a.f_max);
        }
    }
}
