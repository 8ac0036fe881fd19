//! Products, commutation and identity-product signs of Pauli strings.

use contextua::pauli::{commutation_sign, id_sign, multiply, PauliObservable};

fn main() -> contextua::Result<()> {
    let x: PauliObservable = "XXI".parse()?;
    let z: PauliObservable = "ZIZ".parse()?;
    let y: PauliObservable = "YYI".parse()?;

    println!("{x} * {z} = {}", multiply(&x, &z)?);
    println!("{x} vs {z}: {}", commutation_sign(&x, &z)?);
    println!("{x} vs {y}: {}", commutation_sign(&x, &y)?);

    // The middle column of the square multiplies to -I.
    let column: Vec<PauliObservable> = ["XXI", "YYI", "ZZI"].iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    println!("sign of XXI*YYI*ZZI: {}", id_sign(&column)?);
    Ok(())
}
