// A bundle written out explicitly in the text format, checked against the builtin one.

use sptmbqc::algebra::{parse_bundle, spin1_bundle};

const TEXT: &str = "
n = 3
m = 2
labels = e z x y
# pi rotations about z and x in the basis (+1, 0, -1)
u.z = -1,0,0; 0,1,0; 0,0,-1
u.x = 0,0,-1; 0,-1,0; -1,0,0
u0.z = 1,0; 0,1
u0.x = 0,1; 1,0
vr0.z = 1,0; 0,-1
vr0.x = 0,1; 1,0
vl.z = 1,0; 0,-1
vl.x = 0,1; 1,0
# entries are re or re:im; without these, y would be fixed from vl.x vl.z = -sigma^y
vr0.y = 0,0:-1; 0:1,0
vl.y = 0,0:-1; 0:1,0
s.z = 1,0,0; 0,0,0; 0,0,-1
s.x = 0,0.7071067811865476,0; 0.7071067811865476,0,0.7071067811865476; 0,0.7071067811865476,0
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let parsed = parse_bundle("custom.bundle", TEXT)?;
    let builtin = spin1_bundle(3)?;
    println!("parsed:  {:?}", parsed.describe());
    println!("builtin: {:?}", builtin.describe());
    let mut worst: f64 = 0.0;
    for g in builtin.elements() {
        let du = (parsed.u(g) - builtin.u(g)).norm();
        let dvl = (parsed.vl(g) - builtin.vl(g)).norm();
        println!("  {}: |du| = {du:.1e}, |dvl| = {dvl:.1e}", builtin.label(g));
        worst = worst.max(du).max(dvl);
    }
    if worst > 1e-12 {
        return Err(format!("bundles differ by {worst:.1e}").into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
