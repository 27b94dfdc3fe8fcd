//! The pseudocharacter of a lift and its FFS axioms.

use ucg::field::Field;
use ucg::galois::{fixtures, CharacterTable};
use ucg::lifting::lift;
use ucg::polarisation::polarise_irreducible;
use ucg::pseudochar::{check_ffs, pseudochar_of_rep, FfsBudget, InvariantFn};

fn main() {
    let f = Field::fp(17).unwrap();
    let (m, rho) = fixtures::load("d4", &f).unwrap();
    let p = polarise_irreducible(&rho, &vec![f.one(); m.order()]).unwrap();
    let r = lift(&p, &CharacterTable::sign(&m, &f)).unwrap();
    let theta = pseudochar_of_rep(&r);
    let tr = InvariantFn::s(1, r.n());
    let traces: Vec<String> = m.gamma0().iter().map(|&g| theta.value(&tr, &[g]).unwrap().to_string()).collect();
    println!("s1 on Gamma0: {}", traces.join(" "));
    let report = check_ffs(&theta, &FfsBudget::default());
    println!("{} instances, maps {}/{}, folds {}/{}, ok = {}", report.instances, report.maps_covered, report.maps_total, report.folds_covered, report.folds_total, report.ok());
}
