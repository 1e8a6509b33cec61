//! Modelling toolkit for thin-film YIG magnetostatic surface-wave cavity
//! filters: surface-wave dispersion, cavity mode tables, apodized transducer
//! coupling and S-parameter synthesis.
//!
//! The numeric core is generic over [`scalar::Real`]; the aliases below fix
//! it to `f64` or `f32`. Units are CGS: Gauss, cm, Hz.

// `!(x > 0)` is deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod dispersion;
pub mod error;
pub mod io;
pub mod materials;
pub mod quadrature;
pub mod response;
pub mod scalar;
pub mod transducer;

pub use error::{Error, ErrorClass, Result};

pub type FerriteFilm64 = materials::FerriteFilm<f64>;
pub type BiasField64 = materials::BiasField<f64>;
pub type BandEdges64 = materials::BandEdges<f64>;
pub type DispersionPoint64 = dispersion::DispersionPoint<f64>;
pub type CavityMode64 = cavity::CavityMode<f64>;
pub type TransducerPair64 = transducer::TransducerPair<f64>;
pub type CouplingSpectrum64 = transducer::CouplingSpectrum<f64>;
pub type DeviceConfig64 = response::DeviceConfig<f64>;
pub type FrequencyResponse64 = response::FrequencyResponse<f64>;
pub type FilterMetrics64 = response::FilterMetrics<f64>;

pub type FerriteFilm32 = materials::FerriteFilm<f32>;
pub type BiasField32 = materials::BiasField<f32>;
pub type BandEdges32 = materials::BandEdges<f32>;
pub type DispersionPoint32 = dispersion::DispersionPoint<f32>;
pub type CavityMode32 = cavity::CavityMode<f32>;
pub type TransducerPair32 = transducer::TransducerPair<f32>;
pub type CouplingSpectrum32 = transducer::CouplingSpectrum<f32>;
pub type DeviceConfig32 = response::DeviceConfig<f32>;
pub type FrequencyResponse32 = response::FrequencyResponse<f32>;
pub type FilterMetrics32 = response::FilterMetrics<f32>;
