//! Reductions of a pseudocharacter mod 5, 25 and 125 agree.

use ucg::field::Field;
use ucg::galois::{fixtures, CharacterTable};
use ucg::lifting::lift;
use ucg::polarisation::polarise_irreducible;
use ucg::pseudochar::ladic_limit_demo;

fn main() {
    let f = Field::cyclo(4);
    let (m, rho) = fixtures::load("d4", &f).unwrap();
    let p = polarise_irreducible(&rho, &vec![f.one(); m.order()]).unwrap();
    let r = lift(&p, &CharacterTable::sign(&m, &f)).unwrap();
    let r = r.map_field(&Field::ladic(5, 3).unwrap()).unwrap();
    let (mut tables, report) = ladic_limit_demo(&r, &[1, 2, 3], 2, 2);
    println!("{} entries, violations {}, reassembly exact {}", report.entries, report.violations.len(), report.reassembly_exact);
    // corrupt one precision-2 entry
    tables.tables[1][0] = tables.tables[1][0].add(&Field::ladic(5, 2).unwrap().one());
    println!("after corruption: ok = {}", tables.report().ok());
}
