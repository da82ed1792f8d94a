//! Lead time across the 40-50 degree lookahead band, spherical vs flat Earth.
use dyntarget::geometry::{flat_earth_lead_time, footprint_at, lead_time, OrbitConfig};

fn main() {
    let orbit = OrbitConfig::default();
    println!("usable look angle limit: {:.3} deg", orbit.max_look_angle_deg());
    for angle in [40.0, 42.5, 45.0, 47.5, 50.0] {
        let g = lead_time(&orbit, angle).expect("angle inside the horizon");
        let flat = flat_earth_lead_time(&orbit, angle).expect("valid angle");
        println!(
            "{angle:>5.1} deg  lead {:>6.2} s  ground {:>6.1} km  flat-earth {:>6.2} s",
            g.lead_time_s, g.ground_distance_km, flat
        );
    }
    let fp = footprint_at(&orbit, 45.0, 0.0, 2.0).unwrap();
    println!(
        "2 deg FOV at 45 deg look: {:.1} km along x {:.1} km across",
        fp.along_track_extent_km, fp.across_track_extent_km
    );
}
