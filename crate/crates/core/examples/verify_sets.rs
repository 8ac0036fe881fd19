//! Parity and exhaustive Kochen-Specker verification of catalog sets.

use contextua::ksverify::{catalog_by_name, verify_observable_ks, verify_projector_ks, BasisMode, ProjectorKsSet, VerifyMode};

fn main() -> contextua::Result<()> {
    for name in ["square3", "square2", "ghz_star", "wheel4", "wheel5", "wheel7"] {
        let set = catalog_by_name(name)?;
        let cert = verify_observable_ks(&set)?;
        println!("{name:>9}: {} ({} negative contexts)", cert.verdict, set.negative_contexts());
    }

    let square = ProjectorKsSet::from_observable_set(&catalog_by_name("square3")?, BasisMode::WithHybrids)?;
    let cert = verify_projector_ks(&square, VerifyMode::Exhaustive)?;
    println!("square3 projectors ({} / {}): {}", square.projectors.len(), square.bases.len(), cert.verdict);
    Ok(())
}
