mod common;

use ucg::field::Field;
use ucg::galois::{fixtures, CharacterTable};
use ucg::lifting::*;
use ucg::polarisation::{polarise_irreducible, validate_polarised};

fn d4_eps(f: &Field) -> (ucg::polarisation::PolarisedRep, CharacterTable) {
    let (m, rho) = fixtures::load("d4", f).unwrap();
    let p = polarise_irreducible(&rho, &vec![f.one(); m.order()]).unwrap();
    (p, CharacterTable::sign(&m, f))
}

#[test]
fn d4_lift_round_trip() {
    for f in [Field::cyclo(8), Field::fp(17).unwrap(), Field::fp(13).unwrap()] {
        let (p, eps) = d4_eps(&f);
        let r = lift(&p, &eps).unwrap();
        assert_eq!(sign_from_image(&r), f.one());
        let (q, chi_lift) = descend(&r).unwrap();
        assert_eq!(q, p);
        assert_eq!(chi_lift, eps);
    }
}

#[test]
fn wrong_character_is_rejected() {
    let f = Field::cyclo(8);
    let (p, _) = d4_eps(&f);
    let triv = CharacterTable::trivial(p.model(), &f);
    assert_eq!(lift(&p, &triv), Err(LiftError::SignMismatch));
}

#[test]
fn other_exponent_for_n_two() {
    // chi_lift trivial on Gamma0, so both exponents agree and both validate
    let f = Field::cyclo(8);
    let (p, eps) = d4_eps(&f);
    assert!(lift_with_branches(&p, &eps, LiftExponent::NMinusOne, &|_| false).is_ok());
}

#[test]
fn normalisation_reaches_canonical_image() {
    for f in [Field::cyclo(8), Field::fp(17).unwrap()] {
        let (p, eps) = d4_eps(&f);
        let r = lift(&p, &eps).unwrap();
        let (r2, h) = normalize_c_image(&r).unwrap();
        r2.validate().unwrap();
        let g = r.group();
        assert_eq!(*r2.image(p.model().c_tilde()), canonical_c_image(g).unwrap());
        // (Phi^-1, i) = (h, 1) (A Phi^-1, i) c (h^-1, 1) c^-1 c
        let lhs = g.mul(&g.mul(&h, r.image(p.model().c_tilde())), &g.inv(&h));
        assert_eq!(lhs, canonical_c_image(g).unwrap());
    }
}

#[test]
fn symplectic_fixture_has_negative_sign() {
    let f = Field::fp(17).unwrap();
    let (m, rho) = fixtures::load("q8z2", &f).unwrap();
    let p = polarise_irreducible(&rho, &vec![f.one(); m.order()]).unwrap();
    let r = lift(&p, &CharacterTable::trivial(&m, &f)).unwrap();
    assert_eq!(sign_from_image(&r), f.from_int(-1));
    assert!(matches!(normalize_c_image(&r), Err(LiftError::NeedsPositiveSign)));
}

#[test]
fn random_round_trips_and_branches() {
    let f = Field::fp(17).unwrap();
    let mut rng = common::rng(7);
    let mut done = 0;
    for _ in 0..200 {
        let Some((p, chi_lift)) = common::random_polarised(&f, &mut rng) else { continue };
        validate_polarised(&p).unwrap();
        let r = lift(&p, &chi_lift).unwrap();
        let (q, back) = descend(&r).unwrap();
        assert_eq!(q, p);
        assert_eq!(back, chi_lift);
        let sign = p.chi.value(p.model().c_tilde()).neg();
        assert_eq!(sign_from_image(&r), sign);
        let mask: u64 = rand::Rng::gen(&mut rng);
        let flipped = lift_with_branches(&p, &chi_lift, LiftExponent::OneMinusN, &|g| mask >> (g % 64) & 1 == 1).unwrap();
        assert_eq!(flipped, r);
        done += 1;
        if done == 60 {
            break;
        }
    }
    assert_eq!(done, 60);
}
