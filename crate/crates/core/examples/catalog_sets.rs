//! Catalog sets and their JSON form.

use contextua::ksverify::{catalog_by_name, complete_substabilizers};

fn main() -> contextua::Result<()> {
    for name in ["square3", "square2", "ghz_star", "wheel5", "classical_id(4,1)"] {
        let set = catalog_by_name(name)?;
        println!("{name}: {} qubits, {} observables, {} contexts", set.n_qubits, set.observables.len(), set.contexts.len());
    }
    let star = complete_substabilizers(&catalog_by_name("ghz_star")?);
    println!("ghz_star completed: {} observables, {} contexts", star.observables.len(), star.contexts.len());
    let json = serde_json::to_string(&catalog_by_name("square2")?).expect("serializable");
    println!("{json}");
    Ok(())
}
