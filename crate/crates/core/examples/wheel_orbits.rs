//! Symbolic orbit solutions for Wheels and the Arch, with dense cross-checks.

use contextua::orbit::{analyze, arch_structure, dense_pattern_weak_values, wheel_closed_forms, wheel_structure};

fn main() -> contextua::Result<()> {
    for n in 3..=7 {
        let structure = wheel_structure(n)?;
        let analysis = analyze(&structure)?;
        let dense = dense_pattern_weak_values(&structure, &analysis.graph)?;
        match &analysis.solution {
            Ok(sol) => {
                let gap = sol.values.iter().zip(&dense).map(|(s, d)| (d - s).norm()).fold(0.0, f64::max);
                println!(
                    "wheel{n}: w = {}, negatives = {}, anomaly = {}, dense gap {gap:.1e}",
                    sol.magnitude,
                    sol.negative,
                    sol.cumulative_anomaly()
                );
            }
            Err(e) => println!("wheel{n}: {e}"),
        }
        if let Ok(forms) = wheel_closed_forms(n) {
            println!("        closed form: {forms}");
        }
        println!("        zero orbits: {}", analysis.zero_orbits.len());
    }

    let arch = analyze(&arch_structure())?;
    if let Some(sp) = arch.sign_product {
        println!("arch: linked {} contexts {}", sp.linked, sp.contexts);
    }
    Ok(())
}
