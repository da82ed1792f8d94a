//! Mixed-pixel scene: NNLS unmixing, spectral angle and matched filter.
use dyntarget::analysis::{matched_filter, score_map, unmix, SpectralAngleScorer};
use dyntarget::scene::{generate_spectral_scene, EndmemberLibrary};

fn main() {
    let lib = EndmemberLibrary::new(
        vec!["vegetation".into(), "soil".into(), "water".into()],
        vec![
            vec![0.05, 0.09, 0.04, 0.50],
            vec![0.30, 0.25, 0.20, 0.35],
            vec![0.03, 0.05, 0.08, 0.02],
        ],
    )
    .unwrap();
    let (w, h) = (32, 32);
    let abundances: Vec<Vec<f64>> = (0..w * h)
        .map(|i| {
            let v = (i % w) as f64 / (w - 1) as f64;
            let s = (i / w) as f64 / (h - 1) as f64;
            let water = (1.0 - v - s).max(0.0);
            let sum = v + s + water;
            vec![v / sum, s / sum, water / sum]
        })
        .collect();
    let scene = generate_spectral_scene(5, w, h, &lib, &abundances, 0.001).unwrap();

    let px = scene.raster.pixel(10, 20);
    let u = unmix(&px, &lib).unwrap();
    println!("pixel (10, 20) truth {:?}", abundances[10 * w + 20]);
    println!("unmixed            {:?}  residual {:.2e}", u.abundances, u.residual);

    let vegetation = lib.spectra()[0].clone();
    let sam = score_map(&scene.raster, &SpectralAngleScorer::new(vegetation.clone()).unwrap());
    let mf = matched_filter(&scene.raster, &vegetation, None).unwrap();
    println!(
        "SAM at (0, 31) {:.4} rad, at (31, 0) {:.4} rad",
        sam.get(0, 31),
        sam.get(31, 0)
    );
    println!(
        "matched filter at (0, 31) {:.3}, at (31, 0) {:.3}",
        mf.get(0, 31),
        mf.get(31, 0)
    );
}
