//! A product-state pigeonhole on a single positive identity product.

use std::f64::consts::FRAC_PI_2;

use contextua::ppsengine::nonks_pigeonhole;

fn main() -> contextua::Result<()> {
    for n in [1, 3, 5] {
        let r = nonks_pigeonhole(4, n, FRAC_PI_2)?;
        println!("n = {n}: Z_w = {:.4}, conflict = {}", r.z_weak_values[0], r.conflict);
        println!("       |C|_w = {:.4} (closed form {:.4})", r.max_conflict_weak_value, r.closed_form);
    }
    Ok(())
}
