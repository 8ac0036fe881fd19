//! Searching for a pre/post selection that would let Alice win the Mean King game.

use contextua::ksverify::{catalog_by_name, BasisMode, ProjectorKsSet};
use contextua::meanking::{king_witness_set, povm_integrality_set, search_pps, yu_oh_projectors, SearchStrategy, KING_TOL};
use contextua::ppsengine::PpsPair;

fn main() -> contextua::Result<()> {
    let square = ProjectorKsSet::from_observable_set(&catalog_by_name("square3")?, BasisMode::WithHybrids)?;
    let pps = PpsPair::parse("+XII,+IXI,+IIX", "+YII,+IYI,+IIY")?;
    println!("standard PPS: {}", king_witness_set(&square, &pps, KING_TOL)?);

    let report = search_pps(&square.projectors, SearchStrategy::ExhaustiveStabilizer, usize::MAX)?;
    println!("{} stabilizer pairs, best deviation {:.3}, all failed: {}", report.evaluated, report.best_deviation, report.all_failed);

    let yu_oh = yu_oh_projectors();
    let povm = povm_integrality_set(&yu_oh)?;
    if let Some(c) = povm.multiple {
        println!("Yu-Oh rays sum to {c:.4} I, certificate: {}", povm.certifies_impossibility());
    }
    Ok(())
}
