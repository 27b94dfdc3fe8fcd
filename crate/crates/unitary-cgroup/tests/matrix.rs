use proptest::prelude::*;
use ucg::field::{Elem, Field};
use ucg::matrix::{
    intertwiner_space, phi_matrix, simultaneous_conjugator, symmetric_congruence, Conjugacy, Matrix,
};

fn q() -> Field {
    Field::Rational
}

fn ints(f: &Field, v: &[i64]) -> Vec<Elem> {
    v.iter().map(|&x| f.from_int(x)).collect()
}

#[test]
fn phi_small_cases() {
    let f = q();
    assert_eq!(phi_matrix(&f, 1), Matrix::from_ints(&f, &[&[1]]));
    assert_eq!(phi_matrix(&f, 2), Matrix::from_ints(&f, &[&[0, 1], &[-1, 0]]));
    assert_eq!(phi_matrix(&f, 3), Matrix::from_ints(&f, &[&[0, 0, 1], &[0, -1, 0], &[1, 0, 0]]));
}

#[test]
fn char_poly_examples() {
    let f = q();
    assert_eq!(Matrix::identity(&f, 2).char_poly_coeffs().unwrap(), ints(&f, &[2, 1]));
    assert_eq!(Matrix::diag(&f, &ints(&f, &[1, 2, 3])).char_poly_coeffs().unwrap(), ints(&f, &[6, 11, 6]));
    assert_eq!(phi_matrix(&f, 2).char_poly_coeffs().unwrap(), ints(&f, &[0, 1]));
    assert!(Matrix::zeros(&f, 2, 3).char_poly_coeffs().is_err());
}

#[test]
fn pfaffian_examples() {
    let f = q();
    let a = Matrix::from_ints(&f, &[&[0, 7], &[-7, 0]]);
    assert_eq!(a.pfaffian().unwrap(), f.from_int(7));
    // generic 4x4 against the three-term expansion
    let v = [2i64, 3, 5, 7, 11, 13];
    let mut m = Matrix::zeros(&f, 4, 4);
    let mut k = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            m.set(i, j, f.from_int(v[k]));
            m.set(j, i, f.from_int(-v[k]));
            k += 1;
        }
    }
    let (a12, a13, a14, a23, a24, a34) = (2, 3, 5, 7, 11, 13);
    assert_eq!(m.pfaffian().unwrap(), f.from_int(a12 * a34 - a13 * a24 + a14 * a23));
    assert!(Matrix::identity(&f, 2).pfaffian().is_err());
    assert!(Matrix::zeros(&f, 3, 3).pfaffian().is_err());
}

#[test]
fn intertwiner_examples() {
    let f = q();
    let i2 = Matrix::identity(&f, 2);
    assert_eq!(intertwiner_space(&[i2.clone()], &[i2.clone()]).unwrap().len(), 4);
    // the rotation of order 4 over Q(i) splits; over Q it is irreducible
    let r = Matrix::from_ints(&f, &[&[0, -1], &[1, 0]]);
    let s = Matrix::from_ints(&f, &[&[1, 0], &[0, -1]]);
    // D4 image generated by r and s is absolutely irreducible
    assert_eq!(intertwiner_space(&[r.clone(), s.clone()], &[r.clone(), s.clone()]).unwrap().len(), 1);
    // the trivial and sign characters are not isomorphic
    let one = Matrix::from_ints(&f, &[&[1]]);
    let sign = Matrix::from_ints(&f, &[&[-1]]);
    assert!(intertwiner_space(&[one], &[sign]).unwrap().is_empty());
}

#[test]
fn conjugator_examples() {
    let f = q();
    let x = Matrix::diag(&f, &ints(&f, &[1, 2]));
    assert_eq!(simultaneous_conjugator(&[x.clone()], &[x.clone()]).unwrap(), Conjugacy::Conjugate(Matrix::identity(&f, 2)));
    let y = Matrix::diag(&f, &ints(&f, &[2, 1]));
    match simultaneous_conjugator(&[x.clone()], &[y.clone()]).unwrap() {
        Conjugacy::Conjugate(a) => {
            assert_eq!(a.mul(&x).mul(&a.inverse().unwrap()), y);
            assert_eq!(a, Matrix::from_ints(&f, &[&[0, 1], &[1, 0]]));
        }
        other => panic!("{other:?}"),
    }
    let z = Matrix::diag(&f, &ints(&f, &[1, 3]));
    assert_eq!(simultaneous_conjugator(&[x], &[z]).unwrap(), Conjugacy::NonConjugate);
}

#[test]
fn conjugator_on_tiny_field_is_undetermined() {
    let f = Field::fp(2).unwrap();
    let x = Matrix::from_ints(&f, &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
    let y = Matrix::from_ints(&f, &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
    // the search grid for n = 3 needs four distinct values
    assert_eq!(simultaneous_conjugator(&[x], &[y]).unwrap(), Conjugacy::Undetermined);
}

#[test]
fn congruence_examples() {
    let f = q();
    let a = Matrix::diag(&f, &ints(&f, &[4, 9]));
    let h = symmetric_congruence(&a).unwrap();
    let half = f.from_int(1).div(&f.from_int(2)).unwrap();
    let third = f.from_int(1).div(&f.from_int(3)).unwrap();
    assert_eq!(h, Matrix::diag(&f, &[half, third]));

    let f8 = Field::cyclo(8);
    let w = Matrix::from_ints(&f8, &[&[0, 1], &[1, 0]]);
    let h = symmetric_congruence(&w).unwrap();
    assert!(h.mul(&w).mul(&h.transpose()).is_identity());

    assert!(symmetric_congruence(&Matrix::from_ints(&f, &[&[0, 1], &[-1, 0]])).is_err());
    assert!(symmetric_congruence(&Matrix::from_ints(&f, &[&[1, 1], &[1, 1]])).is_err());
    assert!(symmetric_congruence(&Matrix::diag(&f, &ints(&f, &[2, 1]))).is_err());
}

#[test]
fn congruence_pairs_nonsquares_over_f13() {
    let f = Field::fp(13).unwrap();
    // 2 is a non-square mod 13; diag(2, 2) still has square discriminant
    let a = Matrix::diag(&f, &ints(&f, &[2, 2, 4]));
    let h = symmetric_congruence(&a).unwrap();
    assert!(h.mul(&a).mul(&h.transpose()).is_identity());
    assert!(symmetric_congruence(&Matrix::diag(&f, &ints(&f, &[2, 1]))).is_err());
}

#[test]
fn json_round_trip() {
    let f = Field::cyclo(8);
    let m = phi_matrix(&f, 3).scale(&f.root_of_unity(8, 1).unwrap());
    let back = Matrix::from_json(&f, &m.to_json()).unwrap();
    assert_eq!(back, m);
}

/// Exhaustive conjugacy oracle over F_p for 2x2 matrices.
fn brute_conjugate(f: &Field, p: i64, x: &[Matrix], y: &[Matrix]) -> bool {
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    let m = Matrix::from_vec(f, 2, 2, ints(f, &[a, b, c, d]));
                    if let Some(mi) = m.inverse() {
                        if x.iter().zip(y).all(|(xi, yi)| m.mul(xi).mul(&mi) == *yi) {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

fn arb_q_matrix(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-4i64..=4, n * n).prop_map(move |v| Matrix::from_vec(&q(), n, n, ints(&q(), &v)))
}

fn arb_fp_matrix(p: i64) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(0..p, 4).prop_map(move |v| {
        let f = Field::fp(p as u64).unwrap();
        Matrix::from_vec(&f, 2, 2, ints(&f, &v))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn char_poly_conjugation_invariant(m in arb_q_matrix(3), g in arb_q_matrix(3)) {
        if let Some(gi) = g.inverse() {
            prop_assert_eq!(g.mul(&m).mul(&gi).char_poly_coeffs().unwrap(), m.char_poly_coeffs().unwrap());
        }
        let c = m.char_poly_coeffs().unwrap();
        prop_assert_eq!(&c[0], &m.trace());
        prop_assert_eq!(&c[2], &m.det().unwrap());
    }

    #[test]
    fn pfaffian_squares_to_det(m in arb_q_matrix(4), g in arb_q_matrix(4)) {
        let a = m.sub(&m.transpose());
        let pf = a.pfaffian().unwrap();
        prop_assert_eq!(pf.mul(&pf), a.det().unwrap());
        let b = g.mul(&a).mul(&g.transpose());
        prop_assert_eq!(b.pfaffian().unwrap(), g.det().unwrap().mul(&pf));
    }

    #[test]
    fn conjugator_agrees_with_exhaustive_search(p in prop::sample::select(vec![3i64, 5]), x1 in arb_fp_matrix(5), x2 in arb_fp_matrix(5), s in arb_fp_matrix(5)) {
        let f = Field::fp(p as u64).unwrap();
        let red = |m: &Matrix| Matrix::from_fn(&f, 2, 2, |i, j| f.from_int(m.get(i, j).to_string().split(':').nth(1).unwrap().parse::<i64>().unwrap()));
        let (x1, x2, s) = (red(&x1), red(&x2), red(&s));
        let xs = vec![x1.clone(), x2.clone()];
        // half of the time y is a genuine conjugate
        let ys = match s.inverse() {
            Some(si) => vec![s.mul(&x1).mul(&si), s.mul(&x2).mul(&si)],
            None => vec![x2.clone(), x1.clone()],
        };
        let expect = brute_conjugate(&f, p, &xs, &ys);
        match simultaneous_conjugator(&xs, &ys).unwrap() {
            Conjugacy::Conjugate(a) => {
                prop_assert!(expect);
                let ai = a.inverse().unwrap();
                prop_assert_eq!(a.mul(&x1).mul(&ai), ys[0].clone());
                prop_assert_eq!(a.mul(&x2).mul(&ai), ys[1].clone());
            }
            Conjugacy::NonConjugate => prop_assert!(!expect),
            Conjugacy::Undetermined => prop_assert!(false, "fields of size >= 3 decide 2x2 conjugacy"),
        }
    }

    #[test]
    fn congruence_identity_holds(v in prop::collection::vec(-3i64..=3, 6), d in prop::collection::vec(prop::sample::select(vec![1i64, -1, 2, -2]), 3)) {
        // L D L^t with entries of D square in Q(zeta_8)
        let f = Field::cyclo(8);
        let mut l = Matrix::identity(&f, 3);
        l.set(1, 0, f.from_int(v[0]));
        l.set(2, 0, f.from_int(v[1]));
        l.set(2, 1, f.from_int(v[2]));
        let a = l.mul(&Matrix::diag(&f, &ints(&f, &d))).mul(&l.transpose());
        let h = symmetric_congruence(&a).unwrap();
        prop_assert!(h.mul(&a).mul(&h.transpose()).is_identity());
    }

    #[test]
    fn congruence_over_f13(v in prop::collection::vec(0i64..13, 3), d in prop::collection::vec(1i64..13, 3)) {
        let f = Field::fp(13).unwrap();
        let mut l = Matrix::identity(&f, 3);
        l.set(1, 0, f.from_int(v[0]));
        l.set(2, 0, f.from_int(v[1]));
        l.set(2, 1, f.from_int(v[2]));
        let a = l.transpose().mul(&Matrix::diag(&f, &ints(&f, &d))).mul(&l);
        match symmetric_congruence(&a) {
            Ok(h) => prop_assert!(h.mul(&a).mul(&h.transpose()).is_identity()),
            // only a non-square discriminant may fail
            Err(_) => prop_assert!(ucg::field::field_sqrt(&a.det().unwrap()).is_err()),
        }
    }
}
