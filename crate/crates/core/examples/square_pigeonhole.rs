//! Weak values, forced values and the pigeonhole conflict on the 3-qubit square.

use contextua::ksverify::{catalog_by_name, BasisMode, ProjectorKsSet};
use contextua::ppsengine::{detect_pigeonhole, propagate, weak_value_report, PpsPair};

fn main() -> contextua::Result<()> {
    let set = ProjectorKsSet::from_observable_set(&catalog_by_name("square3")?, BasisMode::WithHybrids)?;
    let pps = PpsPair::parse("+XII,+IXI,+IIX", "+YII,+IYI,+IIY")?;

    let report = weak_value_report(&set, &pps)?;
    for (i, b) in report.bases.iter().enumerate() {
        let row: Vec<String> = b.weak_values.iter().map(|w| format!("{:5.2}", w.re + 0.0)).collect();
        println!("basis {:2}: {}", i + 1, row.join(" "));
    }

    let assignment = propagate(&set, &pps)?;
    let ph = detect_pigeonhole(&assignment, &set);
    println!("forced ones: {:?}", assignment.forced_ones());
    println!("conflict bases: {:?}", assignment.conflict_indices());
    println!("pigeonhole: {}, max conflict projector: {:?}", ph.pigeonhole, ph.max_conflict_projector);
    Ok(())
}
