//! Adaptive coupling quadrature against a brute-force trapezoid rule.

use magnon_core::cavity::{CavityMode, ModeStatus};
use magnon_core::materials::FerriteFilm;
use magnon_core::transducer::{current_weight, gap_profile, mode_coupling, Shape, TransducerPair};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SAMPLES: usize = 1_000_000;

fn trapezoid(t: &TransducerPair<f64>, film: &FerriteFilm<f64>, k_x: f64, m: u32) -> Complex<f64> {
    let h = film.width / SAMPLES as f64;
    let tan = t.tilt_deg.to_radians().tan();
    let f = |y: f64| {
        let w = current_weight(t, film, y).unwrap();
        let phase = k_x * (gap_profile(t, film, y).unwrap() - t.gap0 + y * tan);
        Complex::from_polar(w * (m as f64 * std::f64::consts::PI * y / film.width).sin(), phase)
    };
    let inner: Complex<f64> = (1..SAMPLES).map(|i| f(i as f64 * h)).sum();
    (inner + (f(0.0) + f(film.width)) * 0.5) * h
}

#[test]
fn quadrature_matches_trapezoid_on_random_geometries() {
    let film = FerriteFilm::<f64>::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..20 {
        let shape = Shape::ALL[rng.gen_range(0..4)];
        let t = TransducerPair {
            shape,
            base_width: rng.gen_range(5e-4..20e-4),
            hc_x: rng.gen_range(0.0..65e-4),
            hc_y: rng.gen_range(10e-4..200e-4),
            gap0: 140e-4,
            tilt_deg: if rng.gen_bool(0.5) { rng.gen_range(0.0..45.0) } else { 0.0 },
            extended_asymmetry: if shape == Shape::ExtendedCone { rng.gen_range(0.0..40e-4) } else { 0.0 },
        };
        let n = rng.gen_range(1..=10);
        let m = rng.gen_range(1..=7);
        let k_x = n as f64 * std::f64::consts::PI / film.length;
        let mode = CavityMode {
            n,
            m,
            k_x,
            k_y: m as f64 * std::f64::consts::PI / film.width,
            f: Some(9e9),
            status: ModeStatus::Solved,
        };
        let c = mode_coupling(&t, &film, &[mode]).unwrap();
        let adaptive = c.raw(n, m);
        let brute = trapezoid(&t, &film, k_x, m);
        // relative to the normalization integral, the scale the tolerance is defined on
        let err = (adaptive - brute).norm() / c.weight_integral;
        assert!(err < 1e-8, "case {case}: {t:?} p{n}w{m}: {adaptive} vs {brute} ({err:e})");
    }
}
