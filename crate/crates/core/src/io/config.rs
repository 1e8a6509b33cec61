//! Strict JSON device configuration.
//!
//! Every key is optional and falls back to the fabricated device. Unknown
//! keys are rejected. Units: Gauss, cm, Hz, Ω, H, degrees.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dispersion::{Engine, SolverOptions};
use crate::error::{Error, Result};
use crate::materials::FerriteFilm;
use crate::response::sweep::default_extended_asymmetry;
use crate::response::{fit_electrode_inductance, DeviceConfig, SolverConfig, MATCH_FREQUENCY_HZ};
use crate::transducer::{Shape, TransducerPair};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilmSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_sat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exch: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thickness: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_loaded: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransducerSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<Shape>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hc_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hc_y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tilt_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extended_asymmetry: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cavities: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub port_impedance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub electrode_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub electrode_l: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<Engine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_tol_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket_eps: Option<f64>,
}

/// On-disk form of a device configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigDocument {
    pub film: FilmSection,
    pub transducer: TransducerSection,
    pub device: DeviceSection,
    pub solver: SolverSection,
}

impl ConfigDocument {
    /// Fills every missing key and validates the result.
    pub fn resolve(&self) -> Result<DeviceConfig<f64>> {
        let d = FerriteFilm::<f64>::default();
        let f = &self.film;
        let film = FerriteFilm {
            b_sat: f.b_sat.unwrap_or(d.b_sat),
            gamma: f.gamma.unwrap_or(d.gamma),
            exch: f.exch.unwrap_or(d.exch),
            thickness: f.thickness.unwrap_or(d.thickness),
            length: f.length.unwrap_or(d.length),
            width: f.width.unwrap_or(d.width),
            q_loaded: f.q_loaded.unwrap_or(d.q_loaded),
        };
        film.validate()?;

        let td = TransducerPair::for_film(&film);
        let t = &self.transducer;
        let shape = t.shape.unwrap_or(td.shape);
        let hc_x = t.hc_x.unwrap_or(td.hc_x);
        let asymmetry_default = if shape == Shape::ExtendedCone {
            default_extended_asymmetry(hc_x)
        } else {
            0.0
        };
        let transducer = TransducerPair {
            shape,
            base_width: t.base_width.unwrap_or(td.base_width),
            hc_x,
            hc_y: t.hc_y.unwrap_or(td.hc_y),
            gap0: t.gap0.unwrap_or(td.gap0),
            tilt_deg: t.tilt_deg.unwrap_or(td.tilt_deg),
            extended_asymmetry: t.extended_asymmetry.unwrap_or(asymmetry_default),
        };

        let dd = DeviceConfig::<f64>::default();
        let dev = &self.device;
        let port_impedance = dev.port_impedance.unwrap_or(dd.port_impedance);
        let electrode_r = dev.electrode_r.unwrap_or(dd.electrode_r);
        if !(port_impedance > 0.0) {
            return Err(Error::validation("port_impedance must be positive"));
        }
        let electrode_l = match dev.electrode_l {
            Some(l) => l,
            None => fit_electrode_inductance(electrode_r, port_impedance, MATCH_FREQUENCY_HZ).map_err(|_| {
                Error::validation(
                    "electrode_l cannot be fitted when electrode_r >= port_impedance; set device.electrode_l",
                )
            })?,
        };

        let sd = SolverConfig::<f64>::default();
        let s = &self.solver;
        let cfg = DeviceConfig {
            film,
            transducer,
            cavities: dev.cavities.unwrap_or(dd.cavities),
            port_impedance,
            electrode_r,
            electrode_l,
            solver: SolverConfig {
                engine: s.engine.unwrap_or(sd.engine),
                n_max: s.n_max.unwrap_or(sd.n_max),
                m_max: s.m_max.unwrap_or(sd.m_max),
                options: SolverOptions {
                    bracket_eps: s.bracket_eps.unwrap_or(sd.options.bracket_eps),
                    residual_tol_hz: s.residual_tol_hz.unwrap_or(sd.options.residual_tol_hz),
                    max_iter: s.max_iter.unwrap_or(sd.options.max_iter),
                },
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Fully populated document for a resolved configuration.
    pub fn from_config(cfg: &DeviceConfig<f64>) -> Self {
        let (f, t, s) = (&cfg.film, &cfg.transducer, &cfg.solver);
        Self {
            film: FilmSection {
                b_sat: Some(f.b_sat),
                gamma: Some(f.gamma),
                exch: Some(f.exch),
                thickness: Some(f.thickness),
                length: Some(f.length),
                width: Some(f.width),
                q_loaded: Some(f.q_loaded),
            },
            transducer: TransducerSection {
                shape: Some(t.shape),
                base_width: Some(t.base_width),
                hc_x: Some(t.hc_x),
                hc_y: Some(t.hc_y),
                gap0: Some(t.gap0),
                tilt_deg: Some(t.tilt_deg),
                extended_asymmetry: Some(t.extended_asymmetry),
            },
            device: DeviceSection {
                cavities: Some(cfg.cavities),
                port_impedance: Some(cfg.port_impedance),
                electrode_r: Some(cfg.electrode_r),
                electrode_l: Some(cfg.electrode_l),
            },
            solver: SolverSection {
                engine: Some(s.engine),
                n_max: Some(s.n_max),
                m_max: Some(s.m_max),
                residual_tol_hz: Some(s.options.residual_tol_hz),
                max_iter: Some(s.options.max_iter),
                bracket_eps: Some(s.options.bracket_eps),
            },
        }
    }
}

pub fn parse_config_str(text: &str) -> Result<ConfigDocument> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn parse_device_config_str(text: &str) -> Result<DeviceConfig<f64>> {
    parse_config_str(text)?.resolve()
}

pub fn parse_device_config(path: &Path) -> Result<DeviceConfig<f64>> {
    parse_device_config_str(&std::fs::read_to_string(path)?)
}
