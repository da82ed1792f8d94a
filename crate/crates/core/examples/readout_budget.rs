//! Transfer time of a full frame against decimated readouts.
use dyntarget::executor::{plan_cycle, PhaseBudget, SpacecraftAgility};
use dyntarget::geometry::{lead_time, OrbitConfig};
use dyntarget::sensor::{decimated_pixels, readout_time, ReadoutModel};
use dyntarget::targeting::PointingCommand;

fn main() {
    let model = ReadoutModel::default();
    let geom = lead_time(&OrbitConfig::default(), 45.0).unwrap();
    let command = PointingCommand::nadir_fallback(45.0);
    for k in [1u64, 2, 4, 8] {
        let px = decimated_pixels(4096, 4096, k);
        let transfer_s = readout_time(px, 4, &model);
        let budgets = PhaseBudget {
            transfer_s,
            ..PhaseBudget::default()
        };
        let serial = plan_cycle(&geom, &budgets, &SpacecraftAgility::default(), &command, false, 5.0);
        println!(
            "decimation {k}: {px:>9} px  transfer {transfer_s:>7.3} s  serial cycle {:>6.2} s  feasible {}",
            serial.critical_path_s, serial.feasible
        );
    }
}
