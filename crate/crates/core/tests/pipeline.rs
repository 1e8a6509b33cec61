use magnon_core::dispersion::Engine;
use magnon_core::io::{self, ConfigDocument};
use magnon_core::materials::{resonance_bounds, BiasField};
use magnon_core::response::{
    electrode_impedance, extract_metrics, field_sweep, frequency_grid, mismatch_factor, mode_spectrum,
    optimize_apodization, passband_family, synthesize_from, synthesize_response, DeviceConfig, GridRange,
};
use magnon_core::response::sweep::SCORE_TIE_DB;
use magnon_core::transducer::Shape;
use magnon_core::{DeviceConfig64, ErrorClass};
use proptest::prelude::*;

fn bias(h0: f64) -> BiasField<f64> {
    BiasField::new(h0).unwrap()
}

#[test]
fn config_file_to_touchstone_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("device.json");
    std::fs::write(&cfg_path, r#"{"transducer": {"shape": "straight"}, "device": {"cavities": 2}}"#).unwrap();
    let cfg = io::parse_device_config(&cfg_path).unwrap();
    assert_eq!(cfg.transducer.shape, Shape::Straight);

    let b = bias(2500.0);
    let grid = frequency_grid(resonance_bounds(&cfg.film, &b).unwrap(), 501).unwrap();
    let r = synthesize_response(&cfg, &b, &grid).unwrap();
    let ts = dir.path().join("out.s2p");
    io::export_touchstone(&r, cfg.port_impedance, &ts).unwrap();
    let (back, z0) = io::parse_touchstone(&std::fs::read_to_string(&ts).unwrap()).unwrap();
    assert_eq!(back, r);
    assert_eq!(z0, 50.0);
}

#[test]
fn missing_config_file_is_an_io_error() {
    let err = io::parse_device_config(std::path::Path::new("/no/such/config.json")).unwrap_err();
    assert_eq!(err.class(), ErrorClass::Io);
}

#[test]
fn resolved_config_document_is_stable() {
    let doc = ConfigDocument::from_config(&DeviceConfig64::default());
    let text = serde_json::to_string(&doc).unwrap();
    assert_eq!(io::parse_device_config_str(&text).unwrap(), DeviceConfig64::default());
}

#[test]
fn sweep_over_the_measured_field_set() {
    let rows = field_sweep(&DeviceConfig64::default(), &[1500.0, 2500.0, 3500.0, 4500.0], 4001).unwrap();
    let centers: Vec<f64> = rows.iter().map(|r| r.outcome.as_ref().unwrap().f_center).collect();
    assert!(centers.windows(2).all(|w| w[1] > w[0]));
    for row in &rows {
        assert!(row.edges.unwrap().contains(row.outcome.as_ref().unwrap().f_center));
    }
}

#[test]
fn optimizer_over_measured_ranges_beats_straight_spur_level() {
    let cfg = DeviceConfig64::default();
    let b = bias(7500.0);
    let xs = GridRange { start: 40e-4, stop: 70e-4, step: 5e-4 }.values().unwrap();
    let ys = GridRange { start: 60e-4, stop: 140e-4, step: 20e-4 }.values().unwrap();
    let opt = optimize_apodization(&cfg, &b, &xs, &ys, 4001).unwrap();
    assert_eq!(opt.table.len(), 35);
    let max = opt.table.iter().filter_map(|r| r.score).fold(f64::MIN, f64::max);
    assert!(opt.best_score >= max - SCORE_TIE_DB);

    // The straight electrode is the hc_x = 0 corner of the same family.
    let straight = optimize_apodization(&cfg, &b, &[0.0], &[100e-4], 4001).unwrap();
    assert!(opt.best_score >= straight.best_score - SCORE_TIE_DB);
}

#[test]
fn paper_engine_pipeline_runs() {
    let mut cfg = DeviceConfig64::default();
    cfg.solver.engine = Engine::Paper;
    let b = bias(2500.0);
    let spectrum = mode_spectrum(&cfg, &b).unwrap();
    assert_eq!(spectrum.solved().count(), 70);
    let grid = frequency_grid(spectrum.edges, 2001).unwrap();
    let r = synthesize_from(&cfg, &b, &spectrum, &grid).unwrap();
    let m = extract_metrics(&r, &passband_family(&spectrum.modes), spectrum.edges).unwrap();
    assert!(spectrum.edges.contains(m.f_center));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn synthesized_responses_are_passive(
        h0 in 800.0f64..6000.0,
        shape in 0usize..4,
        hc_x in 0.0f64..60e-4,
        hc_y in 0.0f64..200e-4,
        tilt in 0.0f64..60.0,
        cavities in 1u32..=2,
        r in 0.5f64..400.0,
        l in 0.0f64..3e-9,
        q in 50.0f64..3000.0,
    ) {
        let mut cfg = DeviceConfig { cavities, electrode_r: r, electrode_l: l, ..DeviceConfig::default() };
        cfg.film.q_loaded = q;
        cfg.transducer.shape = Shape::ALL[shape];
        cfg.transducer.hc_x = hc_x;
        cfg.transducer.hc_y = hc_y;
        cfg.transducer.tilt_deg = tilt;
        let b = bias(h0);
        let grid = frequency_grid(resonance_bounds(&cfg.film, &b).unwrap(), 801).unwrap();
        let resp = synthesize_response(&cfg, &b, &grid).unwrap();
        for (s21, s11) in resp.s21.iter().zip(&resp.s11) {
            prop_assert!(s21.norm_sqr() + s11.norm_sqr() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn dual_cavity_improves_match_for_lossy_electrodes(r in 100.5f64..2000.0, l in 0.0f64..5e-9, f in 1e9f64..30e9) {
        let single = DeviceConfig { electrode_r: r, electrode_l: l, ..DeviceConfig64::default() };
        let dual = DeviceConfig { cavities: 2, ..single };
        let (z1, z2) = (electrode_impedance(&single, f), electrode_impedance(&dual, f));
        prop_assert_eq!(z2 * 2.0, z1);
        prop_assert!(mismatch_factor(z2, 50.0).unwrap() > mismatch_factor(z1, 50.0).unwrap());
    }
}

