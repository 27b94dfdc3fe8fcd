//! The bundled finite stand-ins for Galois groups and their representations.

use ucg::field::Field;
use ucg::galois::fixtures;

fn main() {
    let f = Field::cyclo(4);
    for name in fixtures::NAMES {
        let (m, rho) = fixtures::load(name, &f).unwrap();
        println!(
            "{name:<7} |G| = {:>2}, |G0| = {:>2}, c~ = {}, dim = {}, semisimple = {}",
            m.order(),
            m.gamma0().len(),
            m.c_tilde(),
            rho.dim(),
            rho.is_semisimple().unwrap()
        );
    }
}
