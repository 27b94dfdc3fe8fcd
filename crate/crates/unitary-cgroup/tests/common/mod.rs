#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use ucg::field::{Elem, Field};
use ucg::galois::{fixtures, CharacterTable, Rep};
use ucg::matrix::Matrix;
use ucg::cgroup::{CuElement, CuGroup};
use ucg::lifting::{lift, CuRep};
use ucg::polarisation::{extend_character, polarise_irreducible, polarise_semisimple, PolarisedRep, Summand};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn random_elem(f: &Field, r: &mut ChaCha8Rng) -> Elem {
    match f.size() {
        Some(q) => f.from_int(r.gen_range(0..q as i64)),
        None => f.from_int(r.gen_range(-3..=3)),
    }
}

pub fn random_invertible(f: &Field, n: usize, r: &mut ChaCha8Rng) -> Matrix {
    loop {
        let m = Matrix::from_fn(f, n, n, |_, _| random_elem(f, r));
        if m.is_invertible() {
            return m;
        }
    }
}

fn character_rep(model: &std::sync::Arc<ucg::galois::GaloisModel>, f: &Field, psi: &[Elem]) -> Rep {
    let images: BTreeMap<usize, Matrix> = model.gamma0().into_iter().map(|g| (g, Matrix::scalar(f, 1, &psi[g]))).collect();
    Rep::new(model, images).unwrap()
}

/// A random polarised bundle on a fixture group, twisted, changed by a random
/// basis and paired with a compatible lifting character.
pub fn random_polarised(f: &Field, r: &mut ChaCha8Rng) -> Option<(PolarisedRep, CharacterTable)> {
    let name = *["d4", "q8z2"].choose(r).unwrap();
    random_polarised_on(name, f, r)
}

pub fn random_polarised_on(name: &str, f: &Field, r: &mut ChaCha8Rng) -> Option<(PolarisedRep, CharacterTable)> {
    let (model, rho) = fixtures::load(name, f).unwrap();
    let ones = vec![f.one(); model.order()];
    let chars = CharacterTable::enumerate(&model, f, true);
    let mut summands = vec![Summand::SelfDual(rho.clone())];
    if r.gen_bool(0.4) {
        summands.push(Summand::SelfDual(rho.clone()));
    }
    if r.gen_bool(0.5) {
        summands.push(Summand::Pair(character_rep(&model, f, chars.choose(r).unwrap())));
    }
    let p = polarise_semisimple(&summands, &ones, None).ok()?;
    // twist by psi: chi becomes chi psi psi^c
    let psi = chars.choose(r).unwrap();
    let chi0: Vec<Elem> = model.elements().map(|g| p.chi.value(g).mul(&psi[g]).mul(&psi[model.conj_c(g)])).collect();
    let chi = extend_character(&model, &chi0, p.chi.value(model.c_tilde())).ok()?;
    let s = random_invertible(f, p.rep.dim(), r);
    let p = PolarisedRep { rep: p.rep.twist_by(psi).conjugate_by(&s), chi, a: s.mul(&p.a).mul(&s.transpose()) };
    let n = p.rep.dim() as i64;
    let c = model.c_tilde();
    let lifts: Vec<CharacterTable> = CharacterTable::enumerate(&model, f, false)
        .into_iter()
        .filter(|v| v[c] == *p.chi.value(c) && model.gamma0().iter().all(|&g| v[g].pow(1 - n).unwrap() == *p.chi.value(g)))
        .map(|v| CharacterTable::new(&model, v).unwrap())
        .collect();
    let chi_lift = lifts.choose(r)?.clone();
    Some((p, chi_lift))
}

/// A random polarised bundle on z4z4z2, built from pairs of Gamma0
/// characters since the bundled rep is reducible.
pub fn random_pair_polarised(f: &Field, r: &mut ChaCha8Rng) -> Option<(PolarisedRep, CharacterTable)> {
    let (model, _) = fixtures::load("z4z4z2", f).unwrap();
    let ones = vec![f.one(); model.order()];
    let chars = CharacterTable::enumerate(&model, f, true);
    let summands: Vec<Summand> =
        (0..r.gen_range(1..=2)).map(|_| Summand::Pair(character_rep(&model, f, chars.choose(r).unwrap()))).collect();
    let p = polarise_semisimple(&summands, &ones, None).ok()?;
    let s = random_invertible(f, p.rep.dim(), r);
    let p = PolarisedRep { rep: p.rep.conjugate_by(&s), chi: p.chi.clone(), a: s.mul(&p.a).mul(&s.transpose()) };
    let c = model.c_tilde();
    let n = p.rep.dim() as i64;
    let lifts: Vec<CharacterTable> = CharacterTable::enumerate(&model, f, false)
        .into_iter()
        .filter(|v| v[c] == *p.chi.value(c) && model.gamma0().iter().all(|&g| v[g].pow(1 - n).unwrap() == *p.chi.value(g)))
        .map(|v| CharacterTable::new(&model, v).unwrap())
        .collect();
    Some((p, lifts.choose(r)?.clone()))
}

/// One lift per bundled fixture.
pub fn fixture_lifts(f: &Field) -> Vec<(&'static str, CuRep)> {
    let mut out = Vec::new();
    for name in ["d4", "q8z2"] {
        let (m, rho) = fixtures::load(name, f).unwrap();
        let p = polarise_irreducible(&rho, &vec![f.one(); m.order()]).unwrap();
        let c = m.c_tilde();
        let chi = CharacterTable::enumerate(&m, f, false)
            .into_iter()
            .find(|v| v[c] == *p.chi.value(c) && m.gamma0().iter().all(|&g| v[g].pow(-1).unwrap() == *p.chi.value(g)))
            .unwrap();
        out.push((name, lift(&p, &CharacterTable::new(&m, chi).unwrap()).unwrap()));
    }
    let (m, _) = fixtures::load("z4z4z2", f).unwrap();
    let chars = CharacterTable::enumerate(&m, f, true);
    let psi = chars.iter().find(|v| v.iter().any(|x| x.pow(2).unwrap() != f.one())).unwrap();
    let p = polarise_semisimple(&[Summand::Pair(character_rep(&m, f, psi))], &vec![f.one(); m.order()], None).unwrap();
    out.push(("z4z4z2", lift(&p, &CharacterTable::sign(&m, f)).unwrap()));
    out
}

pub fn random_cu_element(g: &CuGroup, coset: bool, r: &mut ChaCha8Rng) -> CuElement {
    let f = g.field();
    let b = loop {
        let b = random_elem(f, r);
        if !b.is_zero() {
            break b;
        }
    };
    CuElement { a: random_invertible(f, g.n(), r), b, coset }
}

/// Conjugation-invariant data of R computed without the invariant
/// machinery: d-values and characteristic polynomials on Gamma0.
pub fn class_signature(r: &CuRep) -> Vec<String> {
    r.model
        .elements()
        .map(|g| {
            let x = r.image(g);
            if x.coset {
                x.b.to_string()
            } else {
                let cp: Vec<String> = x.a.char_poly_coeffs().unwrap().iter().map(|e| e.to_string()).collect();
                format!("{} {}", x.b, cp.join(","))
            }
        })
        .collect()
}

/// Pool over F13 on one fixture group of (class id, rep): base reps with
/// pairwise distinct signatures plus conjugate copies under random
/// identity-component h.
pub fn oracle_pool(name: &str, size: usize, seed: u64) -> Vec<(usize, CuRep)> {
    let f = Field::fp(13).unwrap();
    let mut r = rng(seed);
    let mut bases: Vec<(Vec<String>, CuRep)> = Vec::new();
    let mut attempts = 0;
    while bases.len() < size / 2 && attempts < 4000 {
        attempts += 1;
        let made = if name == "z4z4z2" { random_pair_polarised(&f, &mut r) } else { random_polarised_on(name, &f, &mut r) };
        let Some((p, chi)) = made else { continue };
        if p.rep.dim() > 4 {
            continue;
        }
        let Ok(rep) = lift(&p, &chi) else { continue };
        let sig = class_signature(&rep);
        if bases.iter().any(|(s, _)| *s == sig) {
            continue;
        }
        bases.push((sig, rep));
    }
    let mut pool: Vec<(usize, CuRep)> = bases.iter().enumerate().map(|(i, (_, b))| (i, b.clone())).collect();
    let mut class = 0;
    while pool.len() < size {
        let k = class % bases.len();
        let h = random_cu_element(bases[k].1.group(), false, &mut r);
        pool.push((k, bases[k].1.conjugate(&h).unwrap()));
        class += 1;
    }
    pool
}
