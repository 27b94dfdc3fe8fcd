//! Schur signs of the fixtures and the two polarisations of r + r.

use ucg::field::Field;
use ucg::galois::fixtures;
use ucg::polarisation::{distinct_warning_pair, schur_sign};

fn main() {
    let f = Field::cyclo(4);
    for name in ["d4", "q8z2"] {
        let (m, rho) = fixtures::load(name, &f).unwrap();
        let (sign, _) = schur_sign(&rho, &vec![f.one(); m.order()]).unwrap();
        println!("{name}: sign {sign:+}");
    }
    let (m, rho) = fixtures::load("q8z2", &f).unwrap();
    let (p, q) = distinct_warning_pair(&rho, &vec![f.one(); m.order()]).unwrap();
    println!("r + r: signs {:?} and {:?}", p.sign(), q.sign());
}
