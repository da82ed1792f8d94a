//! Generates a cloud scene, masks it, and reports per-tile cloud fractions.
use dyntarget::analysis::{cloud_mask, stretch, Thresholds};
use dyntarget::scene::{generate_cloud_field, render_cloud_scene, GroundSpectrum};

fn main() {
    let field = generate_cloud_field(11, 320, 64, 0.5, 64.0).unwrap();
    let scene = render_cloud_scene(&field, GroundSpectrum::default());
    let t = Thresholds::default();
    let mask = cloud_mask(&stretch(&scene, 1.0, 99.0).unwrap(), t.t_bright, t.t_sat).unwrap();
    println!(
        "true cloud fraction {:.3}, detected {:.3}",
        field.cloud_fraction(),
        mask.cloud_fraction
    );
    for tile in 0..5 {
        let (c0, c1) = (tile * 64, (tile + 1) * 64);
        let truth = (0..64)
            .flat_map(|r| (c0..c1).map(move |c| (r, c)))
            .filter(|&(r, c)| field.is_cloudy(r, c))
            .count() as f64
            / (64.0 * 64.0);
        println!(
            "tile {tile}: truth {truth:.3}  mask {:.3}",
            mask.fraction_in_columns(c0, c1)
        );
    }
}
