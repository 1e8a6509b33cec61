//! Two-port response synthesis: electrode impedance, port mismatch and the
//! Lorentzian sum over cavity modes.

pub mod metrics;
pub mod sweep;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cavity::{enumerate_modes_with, CavityMode, DEFAULT_M_MAX, DEFAULT_N_MAX};
use crate::dispersion::{Engine, SolverOptions};
use crate::error::{Error, Result};
use crate::materials::{resonance_bounds, BandEdges, BiasField, FerriteFilm};
use crate::scalar::Real;
use crate::transducer::{mode_coupling, CouplingSpectrum, TransducerPair};

pub use metrics::{extract_metrics, passband_family, FilterMetrics};
pub use sweep::{compare_shapes, field_sweep, frequency_grid, optimize_apodization, CompareRow, GridRange, Optimization, ScoreRow, SweepRow};

/// Frequency at which a single cavity is matched by default, Hz.
pub const MATCH_FREQUENCY_HZ: f64 = 9e9;

/// Mode solver settings used during synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig<T> {
    pub engine: Engine,
    pub n_max: u32,
    pub m_max: u32,
    pub options: SolverOptions<T>,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            engine: Engine::default(),
            n_max: DEFAULT_N_MAX,
            m_max: DEFAULT_M_MAX,
            options: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceConfig<T> {
    pub film: FerriteFilm<T>,
    pub transducer: TransducerPair<T>,
    /// Number of cavities driven in parallel (1 or 2).
    pub cavities: u32,
    /// Port reference impedance, Ω.
    pub port_impedance: T,
    /// Series electrode resistance, Ω.
    pub electrode_r: T,
    /// Series electrode inductance, H.
    pub electrode_l: T,
    pub solver: SolverConfig<T>,
}

impl<T: Real> Default for DeviceConfig<T> {
    fn default() -> Self {
        let film = FerriteFilm::default();
        let port_impedance = T::lit(50.0);
        let electrode_r = T::lit(3.0);
        Self {
            film,
            transducer: TransducerPair::for_film(&film),
            cavities: 1,
            port_impedance,
            electrode_r,
            electrode_l: fit_electrode_inductance(electrode_r, port_impedance, T::lit(MATCH_FREQUENCY_HZ))
                .expect("default resistance below port impedance"),
            solver: SolverConfig::default(),
        }
    }
}

impl<T: Real> DeviceConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.film.validate()?;
        self.transducer.validate(&self.film)?;
        if !(self.cavities == 1 || self.cavities == 2) {
            return Err(Error::validation("cavities must be 1 or 2"));
        }
        if !(self.port_impedance > T::zero()) {
            return Err(Error::validation("port_impedance must be positive"));
        }
        if !(self.electrode_r >= T::zero()) {
            return Err(Error::validation("electrode_r must be non-negative"));
        }
        if !(self.electrode_l >= T::zero()) {
            return Err(Error::validation("electrode_l must be non-negative"));
        }
        if self.solver.n_max == 0 || self.solver.m_max == 0 {
            return Err(Error::validation("n_max and m_max must be at least 1"));
        }
        self.solver.options.validate()
    }
}

/// Series inductance that makes a single electrode's |R + i2πfL| equal to
/// the port impedance at `f_match`.
pub fn fit_electrode_inductance<T: Real>(r: T, z0: T, f_match: T) -> Result<T> {
    if !(r >= T::zero() && r < z0) {
        return Err(Error::validation("electrode_r must lie in [0, port_impedance) to fit electrode_l"));
    }
    if !(f_match > T::zero()) {
        return Err(Error::NonPositiveFrequency(f_match.to_f64_lossy()));
    }
    Ok((z0.sq() - r.sq()).sqrt() / (T::two() * T::PI() * f_match))
}

/// `Z_s = (R + i2πfL) / cavities`, Ω.
pub fn electrode_impedance<T: Real>(cfg: &DeviceConfig<T>, f: T) -> Complex<T> {
    let cavities = T::from_u32(cfg.cavities).unwrap();
    Complex::new(cfg.electrode_r, T::two() * T::PI() * f * cfg.electrode_l) / cavities
}

pub fn reflection_coefficient<T: Real>(z: Complex<T>, z0: T) -> Result<Complex<T>> {
    let denom = z + z0;
    if denom.norm() <= T::epsilon() * z0 {
        return Err(Error::DegenerateLoad);
    }
    Ok((z - z0) / denom)
}

/// Fraction of available power delivered into `z`: `1 − |Γ|²`.
pub fn mismatch_factor<T: Real>(z: Complex<T>, z0: T) -> Result<T> {
    if !(z0 > T::zero()) {
        return Err(Error::validation("port_impedance must be positive"));
    }
    if z.re < T::zero() {
        return Err(Error::validation("load resistance must be non-negative"));
    }
    Ok(T::one() - reflection_coefficient(z, z0)?.norm_sqr())
}

/// Unit-peak complex Lorentzian with full 3-dB width `f_k / q`.
pub fn lorentzian<T: Real>(f: T, f_k: T, q: T) -> Complex<T> {
    let detuning = T::two() * q * (f - f_k) / f_k;
    Complex::new(T::one(), detuning).inv()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyResponse<T> {
    pub f_grid: Vec<T>,
    pub s21: Vec<Complex<T>>,
    pub s11: Vec<Complex<T>>,
    pub config_digest: String,
}

impl<T: Real> FrequencyResponse<T> {
    pub fn len(&self) -> usize {
        self.f_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_grid.is_empty()
    }

    pub fn s21_db(&self) -> Vec<T> {
        self.s21.iter().map(|s| to_db(s.norm())).collect()
    }
}

pub fn to_db<T: Real>(magnitude: T) -> T {
    T::lit(20.0) * magnitude.max(T::min_positive_value()).log10()
}

pub fn check_grid<T: Real>(f_grid: &[T]) -> Result<()> {
    if f_grid.len() < 2 {
        return Err(Error::InvalidGrid("frequency grid needs at least 2 points".into()));
    }
    if !(f_grid[0] > T::zero()) {
        return Err(Error::InvalidGrid("frequencies must be positive".into()));
    }
    if f_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid("frequency grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Hex SHA-256 of the canonical JSON form of the configuration and bias.
pub fn config_digest<T: Real + Serialize>(cfg: &DeviceConfig<T>, bias: &BiasField<T>) -> String {
    let doc = serde_json::json!({ "config": cfg, "h0": bias.h0 });
    hex::encode(Sha256::digest(doc.to_string().as_bytes()))
}

/// Solved modes, band edges and the transducer coupling at one bias.
#[derive(Debug, Clone)]
pub struct ModeSpectrum<T> {
    pub edges: BandEdges<T>,
    pub modes: Vec<CavityMode<T>>,
    pub coupling: CouplingSpectrum<T>,
}

impl<T: Real> ModeSpectrum<T> {
    pub fn solved(&self) -> impl Iterator<Item = &CavityMode<T>> {
        self.modes.iter().filter(|m| m.is_solved())
    }
}

pub fn solve_modes<T: Real>(cfg: &DeviceConfig<T>, bias: &BiasField<T>) -> Result<Vec<CavityMode<T>>> {
    cfg.validate()?;
    let s = &cfg.solver;
    enumerate_modes_with(&cfg.film, bias, s.n_max, s.m_max, s.engine, &s.options)
}

pub fn mode_spectrum<T: Real>(cfg: &DeviceConfig<T>, bias: &BiasField<T>) -> Result<ModeSpectrum<T>> {
    let modes = solve_modes(cfg, bias)?;
    spectrum_for(cfg, bias, modes)
}

/// Couples an already solved mode set to the configured transducer.
pub fn spectrum_for<T: Real>(cfg: &DeviceConfig<T>, bias: &BiasField<T>, modes: Vec<CavityMode<T>>) -> Result<ModeSpectrum<T>> {
    if !modes.iter().any(|m| m.is_solved()) {
        return Err(Error::EmptyModeSet);
    }
    let coupling = mode_coupling(&cfg.transducer, &cfg.film, &modes)?;
    Ok(ModeSpectrum {
        edges: resonance_bounds(&cfg.film, bias)?,
        modes,
        coupling,
    })
}

/// Evaluates S-parameters for a fixed set of weighted resonances.
///
/// The Lorentzian sum is divided by `K = max(1, max Σ_k |Λ_k|)` taken over
/// the grid and every mode centre, so |S21| ≤ 1 even where neighbouring
/// modes overlap. `K` does not depend on the coupling weights.
#[derive(Debug, Clone)]
pub struct Synthesizer<T> {
    centers: Vec<T>,
    weights: Vec<T>,
    q: T,
    norm: T,
    cfg: DeviceConfig<T>,
}

impl<T: Real> Synthesizer<T> {
    pub fn new(cfg: &DeviceConfig<T>, centers: Vec<T>, weights: Vec<T>, f_grid: &[T]) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::EmptyModeSet);
        }
        let q = cfg.film.q_loaded;
        let overlap = |f: T| centers.iter().map(|&fk| lorentzian(f, fk, q).norm()).sum::<T>();
        let norm = f_grid
            .par_iter()
            .chain(centers.par_iter())
            .map(|&f| overlap(f))
            .reduce(T::one, T::max);
        Ok(Self {
            centers,
            weights,
            q,
            norm,
            cfg: *cfg,
        })
    }

    /// Weights `|c_in|·|c_out|` for every solved mode.
    pub fn for_spectrum(
        cfg: &DeviceConfig<T>,
        spectrum: &ModeSpectrum<T>,
        input: &CouplingSpectrum<T>,
        output: &CouplingSpectrum<T>,
        f_grid: &[T],
    ) -> Result<Self> {
        let (centers, weights) = spectrum
            .solved()
            .map(|m| {
                let c_in = input.magnitude(m.n, m.m);
                let c_out = output.magnitude(m.n, m.m);
                (m.f.unwrap(), c_in * c_out)
            })
            .unzip();
        Self::new(cfg, centers, weights, f_grid)
    }

    pub fn overlap_norm(&self) -> T {
        self.norm
    }

    pub fn s21(&self, f: T) -> Result<Complex<T>> {
        let z = electrode_impedance(&self.cfg, f);
        let mismatch = mismatch_factor(z, self.cfg.port_impedance)?;
        let sum = self
            .centers
            .iter()
            .zip(&self.weights)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&fk, &w)| acc + lorentzian(f, fk, self.q) * w);
        Ok(sum * (mismatch / self.norm))
    }

    pub fn s11(&self, f: T, s21: Complex<T>) -> Result<Complex<T>> {
        let gamma = reflection_coefficient(electrode_impedance(&self.cfg, f), self.cfg.port_impedance)?;
        Ok(gamma * (T::one() - s21.norm_sqr()).max(T::zero()).sqrt())
    }

    pub fn response(&self, f_grid: &[T], config_digest: String) -> Result<FrequencyResponse<T>> {
        check_grid(f_grid)?;
        let points: Vec<(Complex<T>, Complex<T>)> = f_grid
            .par_iter()
            .map(|&f| {
                let s21 = self.s21(f)?;
                Ok((s21, self.s11(f, s21)?))
            })
            .collect::<Result<_>>()?;
        let (s21, s11) = points.into_iter().unzip();
        Ok(FrequencyResponse {
            f_grid: f_grid.to_vec(),
            s21,
            s11,
            config_digest,
        })
    }
}

pub fn synthesize_response<T: Real + Serialize>(
    cfg: &DeviceConfig<T>,
    bias: &BiasField<T>,
    f_grid: &[T],
) -> Result<FrequencyResponse<T>> {
    check_grid(f_grid)?;
    let spectrum = mode_spectrum(cfg, bias)?;
    synthesize_from(cfg, bias, &spectrum, f_grid)
}

pub fn synthesize_from<T: Real + Serialize>(
    cfg: &DeviceConfig<T>,
    bias: &BiasField<T>,
    spectrum: &ModeSpectrum<T>,
    f_grid: &[T],
) -> Result<FrequencyResponse<T>> {
    check_grid(f_grid)?;
    let synth = Synthesizer::for_spectrum(cfg, spectrum, &spectrum.coupling, &spectrum.coupling, f_grid)?;
    synth.response(f_grid, config_digest(cfg, bias))
}
