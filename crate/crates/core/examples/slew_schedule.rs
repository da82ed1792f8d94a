//! Serial vs early-slew cycle timelines at a 45 degree lookahead.
use dyntarget::executor::{plan_cycle, slew_time, PhaseBudget, SpacecraftAgility};
use dyntarget::geometry::{lead_time, OrbitConfig};
use dyntarget::targeting::PointingCommand;

fn main() {
    let geom = lead_time(&OrbitConfig::default(), 45.0).unwrap();
    let agility = SpacecraftAgility::default();
    println!(
        "slew 45 deg: {:.2} s, 5 deg: {:.2} s",
        slew_time(45.0, &agility),
        slew_time(5.0, &agility)
    );
    let command = PointingCommand {
        tile_index: Some(3),
        across_track_deg: 6.0,
        along_track_slew_deg: 45.0,
        fallback: false,
    };
    for overlap in [false, true] {
        let s = plan_cycle(&geom, &PhaseBudget::default(), &agility, &command, overlap, 5.0);
        println!(
            "\noverlap={overlap}: critical path {:.2} s, deadline {:.2} s, feasible {}",
            s.critical_path_s, s.deadline_s, s.feasible
        );
        for p in &s.phases {
            println!(
                "  {:<14} {:>7.2} -> {:>7.2}",
                format!("{:?}", p.phase),
                p.start_s,
                p.end_s
            );
        }
    }
}
