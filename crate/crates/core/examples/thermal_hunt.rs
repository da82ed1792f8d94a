//! Finds generated hotspots with the NIR threshold/ratio detector.
use dyntarget::analysis::{thermal_anomalies, Thresholds};
use dyntarget::scene::{generate_thermal_scene, ThermalSceneParams};

fn main() {
    let params = ThermalSceneParams {
        width: 128,
        height: 96,
        n_hotspots: 4,
        ..ThermalSceneParams::default()
    };
    let scene = generate_thermal_scene(3, &params).unwrap();
    let t = Thresholds::default();
    let found = thermal_anomalies(&scene.raster, t.t_hot, t.t_ratio).unwrap();
    for h in &scene.hotspots {
        println!("truth    #{} at ({}, {}) peak {:.3}", h.id, h.row, h.col, h.peak);
    }
    for d in &found {
        println!("detected at ({}, {}) score {:.3}", d.row, d.col, d.score);
    }
}
