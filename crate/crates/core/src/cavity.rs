//! Quantized cavity resonances and their `p{n}w{m}` labels.
//!
//! Primary order n follows the round-trip condition `k_x = nπ/L`; width
//! order m follows `k_y = mπ/W`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{de_surface_frequency, solve_mode_frequency_with, width_wavenumber, Engine, SolverOptions};
use crate::error::{Error, Result};
use crate::materials::{BiasField, FerriteFilm};
use crate::scalar::Real;

pub const DEFAULT_N_MAX: u32 = 10;
pub const DEFAULT_M_MAX: u32 = 7;

/// Mode identifier, printed as `p{n}w{m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeLabel {
    pub n: u32,
    pub m: u32,
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}w{}", self.n, self.m)
    }
}

impl FromStr for ModeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::validation(format!("malformed mode label '{s}'"));
        let rest = s.strip_prefix('p').ok_or_else(bad)?;
        let (n, m) = rest.split_once('w').ok_or_else(bad)?;
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if !digits(n) || !digits(m) {
            return Err(bad());
        }
        Ok(ModeLabel {
            n: n.parse().map_err(|_| bad())?,
            m: m.parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeStatus {
    Solved,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityMode<T> {
    pub n: u32,
    pub m: u32,
    /// nπ/L, rad/cm.
    pub k_x: T,
    /// mπ/W, rad/cm.
    pub k_y: T,
    /// Resonance frequency, Hz; `None` when the solve failed.
    pub f: Option<T>,
    pub status: ModeStatus,
}

impl<T: Real> CavityMode<T> {
    pub fn label(&self) -> ModeLabel {
        ModeLabel { n: self.n, m: self.m }
    }

    pub fn is_solved(&self) -> bool {
        self.f.is_some()
    }
}

pub fn primary_wavenumber<T: Real>(film: &FerriteFilm<T>, n: u32) -> T {
    T::from_u32(n).unwrap() * T::PI() / film.length
}

/// Enumerates every (n, m) in `1..=n_max × 1..=m_max`.
///
/// Failed solves are kept with a `None` frequency and the reason. Solved
/// modes come first in ascending frequency (ties by `(n, m)`), followed by
/// the failures in `(n, m)` order.
pub fn enumerate_modes<T: Real>(
    film: &FerriteFilm<T>,
    bias: &BiasField<T>,
    n_max: u32,
    m_max: u32,
    engine: Engine,
) -> Result<Vec<CavityMode<T>>> {
    enumerate_modes_with(film, bias, n_max, m_max, engine, &SolverOptions::default())
}

pub fn enumerate_modes_with<T: Real>(
    film: &FerriteFilm<T>,
    bias: &BiasField<T>,
    n_max: u32,
    m_max: u32,
    engine: Engine,
    opts: &SolverOptions<T>,
) -> Result<Vec<CavityMode<T>>> {
    opts.validate()?;
    if n_max == 0 || m_max == 0 {
        return Err(Error::validation("n_max and m_max must be at least 1"));
    }
    let pairs: Vec<(u32, u32)> = (1..=n_max)
        .flat_map(|n| (1..=m_max).map(move |m| (n, m)))
        .collect();
    let mut modes: Vec<CavityMode<T>> = pairs
        .par_iter()
        .map(|&(n, m)| {
            let k_x = primary_wavenumber(film, n);
            let k_y = width_wavenumber(film, m);
            let solved = match engine {
                Engine::Paper => solve_mode_frequency_with(film, bias, k_x, m, opts).map(|p| p.f),
                Engine::DeOracle => de_surface_frequency(film, bias, k_x),
            };
            let (f, status) = match solved {
                Ok(f) => (Some(f), ModeStatus::Solved),
                Err(e) => (None, ModeStatus::Failed(e.to_string())),
            };
            CavityMode {
                n,
                m,
                k_x,
                k_y,
                f,
                status,
            }
        })
        .collect();
    modes.sort_by(|a, b| match (a.f, b.f) {
        (Some(fa), Some(fb)) => fa
            .partial_cmp(&fb)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((a.n, a.m).cmp(&(b.n, b.m))),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => (a.n, a.m).cmp(&(b.n, b.m)),
    });
    Ok(modes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeGap<T> {
    pub lower: ModeLabel,
    pub upper: ModeLabel,
    /// f(upper) − f(lower), Hz. Signed: on a backward-curving branch it is negative.
    pub delta_f: T,
}

/// Gaps between consecutive primary orders at each fixed width order.
pub fn mode_spacing_report<T: Real>(modes: &[CavityMode<T>]) -> Result<Vec<ModeGap<T>>> {
    let mut by_width: BTreeMap<u32, Vec<(u32, T)>> = BTreeMap::new();
    for mode in modes {
        if let Some(f) = mode.f {
            by_width.entry(mode.m).or_default().push((mode.n, f));
        }
    }
    let mut gaps = Vec::new();
    for (m, mut family) in by_width {
        family.sort_by_key(|(n, _)| *n);
        for pair in family.windows(2) {
            let ((n1, f1), (n2, f2)) = (pair[0], pair[1]);
            gaps.push(ModeGap {
                lower: ModeLabel { n: n1, m },
                upper: ModeLabel { n: n2, m },
                delta_f: f2 - f1,
            });
        }
    }
    if gaps.is_empty() {
        return Err(Error::TooFewModes);
    }
    Ok(gaps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::resonance_bounds;
    use proptest::prelude::*;

    fn film() -> FerriteFilm<f64> {
        FerriteFilm::default()
    }

    fn bias() -> BiasField<f64> {
        BiasField::new(2500.0).unwrap()
    }

    #[test]
    fn quantized_wavenumbers() {
        assert!((primary_wavenumber(&film(), 1) - 112.199_737_628_207).abs() < 1e-9);
        assert!((width_wavenumber(&film(), 3) - 235.619_449_019_234_5).abs() < 1e-9);
    }

    #[test]
    fn labels_follow_convention() {
        let label = ModeLabel { n: 2, m: 3 };
        assert_eq!(label.to_string(), "p2w3");
        assert_eq!("p2w3".parse::<ModeLabel>().unwrap(), label);
        for bad in ["", "p", "pw1", "p1w", "q1w1", "p1x1", "p-1w2", "p1w2x"] {
            assert!(bad.parse::<ModeLabel>().is_err(), "{bad}");
        }
    }

    #[test]
    fn label_round_trip_to_99() {
        for n in 1..=99 {
            for m in 1..=99 {
                let label = ModeLabel { n, m };
                assert_eq!(label.to_string().parse::<ModeLabel>().unwrap(), label);
            }
        }
    }

    #[test]
    fn de_oracle_primary_modes_increase_and_stay_in_band() {
        let modes = enumerate_modes(&film(), &bias(), 5, 1, Engine::DeOracle).unwrap();
        let edges = resonance_bounds(&film(), &bias()).unwrap();
        let ns: Vec<u32> = modes.iter().map(|m| m.n).collect();
        assert_eq!(ns, vec![1, 2, 3, 4, 5]);
        let fs: Vec<f64> = modes.iter().map(|m| m.f.unwrap()).collect();
        assert!(fs.windows(2).all(|w| w[1] > w[0]));
        assert!(fs.iter().all(|&f| edges.contains(f)));
    }

    #[test]
    fn enumeration_is_exact_and_complete() {
        let modes = enumerate_modes(&film(), &bias(), DEFAULT_N_MAX, DEFAULT_M_MAX, Engine::Paper).unwrap();
        assert_eq!(modes.len(), 70);
        for mode in &modes {
            let nx = mode.k_x * film().length / std::f64::consts::PI;
            let my = mode.k_y * film().width / std::f64::consts::PI;
            assert!((nx - mode.n as f64).abs() < 1e-12);
            assert!((my - mode.m as f64).abs() < 1e-12);
        }
        let fs: Vec<f64> = modes.iter().filter_map(|m| m.f).collect();
        assert!(fs.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn failed_modes_are_retained_after_solved_ones() {
        // A 1 um wide strip pushes high width orders out of the band.
        let strip = FerriteFilm { width: 1e-4, thickness: 5e-5, ..film() };
        let modes = enumerate_modes(&strip, &bias(), 1, 7, Engine::Paper).unwrap();
        assert_eq!(modes.len(), 7);
        let first_failed = modes.iter().position(|m| m.f.is_none()).expect("a failed mode");
        assert!(first_failed > 0);
        assert!(modes[..first_failed].iter().all(|m| m.status == ModeStatus::Solved));
        for m in &modes[first_failed..] {
            assert!(matches!(&m.status, ModeStatus::Failed(reason) if reason.contains("no self-consistent solution")));
        }
    }

    #[test]
    fn spacing_two_modes_one_gap() {
        let modes = enumerate_modes(&film(), &bias(), 2, 1, Engine::DeOracle).unwrap();
        let gaps = mode_spacing_report(&modes).unwrap();
        assert_eq!(gaps.len(), 1);
        assert_eq!(gaps[0].delta_f, modes[1].f.unwrap() - modes[0].f.unwrap());
        assert_eq!(gaps[0].lower.to_string(), "p1w1");
    }

    #[test]
    fn spacing_needs_two_modes() {
        let modes = enumerate_modes(&film(), &bias(), 1, 3, Engine::DeOracle).unwrap();
        assert!(matches!(mode_spacing_report(&modes), Err(Error::TooFewModes)));
    }

    #[test]
    fn de_oracle_spacing_shrinks_with_order_and_length() {
        let modes = enumerate_modes(&film(), &bias(), 10, 1, Engine::DeOracle).unwrap();
        let gaps = mode_spacing_report(&modes).unwrap();
        assert!(gaps.windows(2).all(|w| w[1].delta_f < w[0].delta_f));

        // Doubling L interleaves one new mode between each old pair: around any given
        // frequency the spacing shrinks.
        let long = FerriteFilm { length: 2.0 * film().length, ..film() };
        let long_gaps = mode_spacing_report(&enumerate_modes(&long, &bias(), 20, 1, Engine::DeOracle).unwrap()).unwrap();
        for (j, short) in gaps.iter().enumerate() {
            let (a, b) = (long_gaps[2 * j + 1], long_gaps[2 * j + 2]);
            assert_eq!(a.lower.n, 2 * short.lower.n);
            assert!(a.delta_f < short.delta_f && b.delta_f < short.delta_f);
            assert!((a.delta_f + b.delta_f - short.delta_f).abs() < 1e-3);
        }
        // Index-wise the claim only holds while the short cavity is still dispersive.
        for n in 0..3 {
            assert!(long_gaps[n].delta_f < gaps[n].delta_f);
        }
    }

    #[test]
    fn zero_bounds_rejected() {
        assert!(enumerate_modes(&film(), &bias(), 0, 1, Engine::DeOracle).is_err());
    }

    proptest! {
        #[test]
        fn de_oracle_frequency_increases_with_n(h0 in 300.0f64..10_000.0, m in 1u32..5) {
            let b = BiasField::new(h0).unwrap();
            let modes = enumerate_modes(&film(), &b, 8, m, Engine::DeOracle).unwrap();
            let mut family: Vec<&CavityMode<f64>> = modes.iter().filter(|x| x.m == m).collect();
            family.sort_by_key(|x| x.n);
            prop_assert!(family.windows(2).all(|w| w[1].f.unwrap() > w[0].f.unwrap()));
        }
    }
}
