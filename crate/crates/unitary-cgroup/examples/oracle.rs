//! Matching conjugate lifts and separating non-conjugate ones.

use std::collections::BTreeMap;

use ucg::field::{Elem, Field};
use ucg::galois::{fixtures, CharacterTable, GaloisModel, Rep};
use ucg::lifting::{lift, CuRep};
use ucg::matrix::Matrix;
use ucg::polarisation::{polarise_semisimple, Summand};
use ucg::pseudochar::{distinguish_or_match, OracleCaps, OracleVerdict};

fn pair_lift(m: &std::sync::Arc<GaloisModel>, f: &Field, psi: &[Elem]) -> CuRep {
    let images: BTreeMap<usize, Matrix> = m.gamma0().into_iter().map(|g| (g, Matrix::scalar(f, 1, &psi[g]))).collect();
    let s = Rep::new(m, images).unwrap();
    let p = polarise_semisimple(&[Summand::Pair(s)], &vec![f.one(); m.order()], None).unwrap();
    lift(&p, &CharacterTable::sign(m, f)).unwrap()
}

fn main() {
    let f = Field::fp(13).unwrap();
    let (m, _) = fixtures::load("z4z4z2", &f).unwrap();
    let chars = CharacterTable::enumerate(&m, &f, true);
    let r1 = pair_lift(&m, &f, &chars[1]);
    let h = r1.group().from_raw(&Matrix::from_ints(&f, &[&[1, 2], &[3, 4]]), &f.from_int(5), false).unwrap();
    let caps = OracleCaps::default();
    match distinguish_or_match(&r1, &r1.conjugate(&h).unwrap(), &caps) {
        OracleVerdict::Match(k) => println!("conjugate copy: Match, verified {}", r1.conjugate(&k).unwrap() == r1.conjugate(&h).unwrap()),
        v => println!("conjugate copy: {v:?}"),
    }
    let r2 = pair_lift(&m, &f, &chars[2]);
    match distinguish_or_match(&r1, &r2, &caps) {
        OracleVerdict::Distinguished { f, tuple, v1, v2 } => println!("other character: {f} at {tuple:?} is {v1} vs {v2}"),
        v => println!("other character: {v:?}"),
    }
}
