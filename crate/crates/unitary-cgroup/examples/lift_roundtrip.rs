//! Polarised representation -> CU-valued representation -> back.

use ucg::field::Field;
use ucg::galois::{fixtures, CharacterTable};
use ucg::lifting::{descend, lift, normalize_c_image, sign_from_image};
use ucg::polarisation::polarise_irreducible;

fn main() {
    let f = Field::cyclo(8);
    let (m, rho) = fixtures::load("d4", &f).unwrap();
    let p = polarise_irreducible(&rho, &vec![f.one(); m.order()]).unwrap();
    let eps = CharacterTable::sign(&m, &f);
    let r = lift(&p, &eps).unwrap();
    println!("sign(P) = {:?}, -mu_c^2 = {}", p.sign(), sign_from_image(&r));
    let (q, chi) = descend(&r).unwrap();
    println!("round trip exact: {}", q == p && chi == eps);
    let (normal, _) = normalize_c_image(&r).unwrap();
    let c = normal.image(m.c_tilde());
    println!("normalised R(c~): a = {}, mu^2 = {}", c.a, c.b);
}
