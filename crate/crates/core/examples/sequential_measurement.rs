//! Exact branch enumeration for sequences of parity measurements.

use contextua::oracle::{sequential_measure, DenseState, MeasurementStep};
use contextua::ppsengine::PpsPair;

fn main() -> contextua::Result<()> {
    let pps = PpsPair::parse("+XII,+IXI,+IIX", "+YII,+IYI,+IIY")?;
    let pre = DenseState::from_slice(&pps.pre)?;
    let post = DenseState::from_slice(&pps.post)?;

    for steps in [vec!["ZZI"], vec!["ZZI", "ZIZ"], vec!["XXI", "ZZI", "YYI"]] {
        let seq: Vec<MeasurementStep> = steps.iter().map(|s| s.parse().map(MeasurementStep::Parity)).collect::<Result<_, _>>()?;
        let record = sequential_measure(&pre, &post, &seq)?;
        println!("{}", steps.join(" then "));
        for b in &record.branches {
            let outcomes: Vec<String> = b.steps.iter().map(|s| format!("{}={:+}", s.label, s.outcome)).collect();
            println!("  {:<24} joint {:.5}  conditional {:.3}", outcomes.join(" "), b.joint_probability, b.conditional_probability);
        }
        println!("  certain: {:?}", record.certain_outcomes());
    }
    Ok(())
}
