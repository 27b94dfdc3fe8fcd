use proptest::prelude::*;
use ucg::cgroup::*;
use ucg::field::Field;
use ucg::galois::{fixtures, CharacterTable};
use ucg::lifting::lift;
use ucg::matrix::Matrix;
use ucg::polarisation::polarise_irreducible;

fn f13() -> Field {
    Field::fp(13).unwrap()
}

fn mat(f: &Field, n: usize, v: &[i64]) -> Matrix {
    Matrix::from_fn(f, n, n, |i, j| f.from_int(v[i * n + j]))
}

fn invertible(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(0i64..13, n * n).prop_map(move |v| mat(&f13(), n, &v)).prop_filter("invertible", |m| m.is_invertible())
}

fn cu_elem(n: usize) -> impl Strategy<Value = CuElement> {
    (invertible(n), 1i64..13, any::<bool>()).prop_map(move |(g, mu, c)| CuGroup::new(&f13(), n).from_raw(&g, &f13().from_int(mu), c).unwrap())
}

fn cgu_elem(n: usize) -> impl Strategy<Value = CguElement> {
    (invertible(n), 1i64..13, 1i64..13, any::<bool>()).prop_map(move |(g, l, mu, c)| {
        let f = f13();
        CguGroup::new(&f, n, GuAction::Standard).element(&g, &f.from_int(l), &f.from_int(mu), c).unwrap()
    })
}

#[test]
fn from_raw_examples() {
    let q = Field::Rational;
    for n in [2, 3] {
        let g = CuGroup::new(&q, n);
        assert_eq!(g.from_raw(&Matrix::identity(&q, n), &q.one(), false).unwrap(), g.identity());
    }
    let g = CuGroup::new(&q, 2);
    let m = Matrix::from_ints(&q, &[&[1, 2], &[3, 5]]);
    let mu = q.from_int(3);
    assert_eq!(g.from_raw(&m, &mu, true).unwrap(), g.from_raw(&m.neg(), &mu.neg(), true).unwrap());
    let g = CuGroup::new(&q, 3);
    let m = Matrix::from_ints(&q, &[&[1, 2, 0], &[3, 5, 1], &[0, 0, 2]]);
    assert_eq!(g.from_raw(&m, &mu, false).unwrap(), g.from_raw(&m, &mu.neg(), false).unwrap());
    assert!(g.from_raw(&Matrix::zeros(&q, 3, 3), &mu, false).is_err());
    assert!(g.from_raw(&m, &q.zero(), false).is_err());
}

#[test]
fn transported_exponent_is_one_minus_n() {
    for n in 1..7 {
        assert_eq!(TransportedAction::derive(n).b_exponent, 1 - n as i64);
    }
}

#[test]
fn c_squared_for_n_two() {
    let q = Field::Rational;
    let g = CuGroup::new(&q, 2);
    assert_eq!(g.mul(&g.c(), &g.c()), g.identity());
}

#[test]
fn d_of_canonical_c_image() {
    let f = Field::cyclo(4);
    for n in [2, 3, 4] {
        let g = CuGroup::new(&f, n);
        let i = f.root_of_unity(4, 1).unwrap();
        let x = g.from_raw(g.phi_inv(), &i, true).unwrap();
        assert_eq!(g.d_map(&x), f.from_int(-1));
        assert_eq!(g.d_map(&g.identity()), f.one());
    }
}

#[test]
fn conjugation_rejects_c_coset() {
    let g = CuGroup::new(&Field::Rational, 2);
    assert_eq!(g.conjugate(&g.c(), &g.identity()), Err(CgroupError::NotIdentityComponent));
}

#[test]
fn lifted_fixture_is_a_subgroup() {
    let f = Field::cyclo(8);
    let (m, rho) = fixtures::load("d4", &f).unwrap();
    let p = polarise_irreducible(&rho, &vec![f.one(); m.order()]).unwrap();
    let r = lift(&p, &CharacterTable::sign(&m, &f)).unwrap();
    let g = r.group();
    let imgs = &r.images;
    for x in imgs {
        assert!(imgs.contains(&g.inv(x)));
        for y in imgs {
            assert!(imgs.contains(&g.mul(x, y)));
            for z in imgs {
                assert_eq!(g.mul(&g.mul(x, y), z), g.mul(x, &g.mul(y, z)));
            }
        }
    }
}

#[test]
fn json_round_trip() {
    let f = f13();
    let g = CuGroup::new(&f, 2);
    let x = g.from_raw(&mat(&f, 2, &[1, 2, 3, 4]), &f.from_int(5), true).unwrap();
    assert_eq!(CuElement::from_json(&f, &x.to_json()).unwrap(), x);
}

#[test]
fn gu_action_parses() {
    assert_eq!("no-twist".parse::<GuAction>().unwrap(), GuAction::NoTwist);
    assert_eq!("inverse-det".parse::<GuAction>().unwrap(), GuAction::InverseDet);
    assert!("sideways".parse::<GuAction>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cu_group_axioms(x in cu_elem(3), y in cu_elem(3), z in cu_elem(3), n2 in cu_elem(2)) {
        let g = CuGroup::new(&f13(), 3);
        prop_assert_eq!(g.mul(&g.mul(&x, &y), &z), g.mul(&x, &g.mul(&y, &z)));
        prop_assert_eq!(g.mul(&x, &g.inv(&x)), g.identity());
        prop_assert_eq!(g.mul(&g.inv(&x), &x), g.identity());
        prop_assert_eq!(g.mul(&x, &g.identity()), x.clone());
        prop_assert_eq!(g.d_map(&g.mul(&x, &y)), g.d_map(&x).mul(&g.d_map(&y)));
        let g2 = CuGroup::new(&f13(), 2);
        prop_assert_eq!(g2.mul(&g2.inv(&n2), &n2), g2.identity());
    }

    #[test]
    fn cu_canonical_form(g in invertible(2), mu in 1i64..13, s in 1i64..13, t in 1i64..13) {
        let f = f13();
        for n in [2usize, 3] {
            let grp = CuGroup::new(&f, n);
            let m = if n == 2 { g.clone() } else { Matrix::block_diag(&[&g, &Matrix::identity(&f, 1)]) };
            let x = grp.from_raw(&m, &f.from_int(mu), false).unwrap();
            let (s, t) = (f.from_int(s), f.from_int(t));
            let y = grp.from_raw(&m.scale(&s), &f.from_int(mu).mul(&t), false).unwrap();
            let sgn = if n % 2 == 0 { f.from_int(-1) } else { f.one() };
            let related = (s.is_one() && t.is_one()) || (s == sgn && t == f.from_int(-1));
            prop_assert_eq!(x == y, related);
            for (g2, mu2) in grp.raw_lifts(&x).into_iter().flatten() {
                prop_assert_eq!(grp.from_raw(&g2, &mu2, false).unwrap(), x.clone());
            }
        }
    }

    #[test]
    fn cu_conjugation(h in cu_elem(3), x in cu_elem(3)) {
        let g = CuGroup::new(&f13(), 3);
        let h = CuElement { coset: false, ..h };
        let y = g.conjugate(&h, &x).unwrap();
        prop_assert_eq!(g.d_map(&y), g.d_map(&x));
        prop_assert_eq!(y.coset, x.coset);
        prop_assert_eq!(g.conjugate(&g.identity(), &x).unwrap(), x.clone());
        // c-conjugation applied twice is conjugation by c^2
        let c = g.c();
        let cc = |z: &CuElement| g.mul(&g.mul(&c, z), &g.inv(&c));
        let c2 = g.mul(&c, &c);
        let h0 = CuElement { coset: false, ..x.clone() };
        prop_assert_eq!(cc(&cc(&h0)), g.conjugate(&c2, &h0).unwrap());
        // Y-form rule on the c-coset: Y -> beta^(n-1) k Y k^t
        if x.coset {
            let beta = h.b.clone();
            let expect = g.y_form(&x).mul(&h.a.transpose());
            let expect = h.a.mul(&expect).scale(&beta.pow(2).unwrap());
            prop_assert_eq!(g.y_form(&y), expect);
        }
    }

    #[test]
    fn cgu_group_axioms(x in cgu_elem(2), y in cgu_elem(2), z in cgu_elem(2)) {
        for action in [GuAction::Standard, GuAction::NoTwist, GuAction::InverseDet] {
            let g = CguGroup::new(&f13(), 2, action);
            prop_assert_eq!(g.mul(&g.mul(&x, &y), &z), g.mul(&x, &g.mul(&y, &z)));
            prop_assert_eq!(g.mul(&x, &g.inv(&x)), g.identity());
            prop_assert_eq!(g.mul(&g.identity(), &x), x.clone());
            let sq = g.mul(&x, &x);
            prop_assert!(!sq.coset);
        }
    }

    #[test]
    fn cgu_lambda_twist(x in cgu_elem(3), y in cgu_elem(3)) {
        let f = f13();
        let g = CguGroup::new(&f, 3, GuAction::Standard);
        let (x, y) = (CguElement { coset: false, ..x }, CguElement { coset: false, ..y });
        let p = g.mul(&x, &y);
        prop_assert_eq!(&p.lambda, &x.lambda.mul(&y.lambda));
        let cx = CguElement { coset: true, ..x.clone() };
        let q = g.mul(&cx, &y);
        prop_assert_eq!(q.lambda, x.lambda.mul(&y.g.det().unwrap()).mul(&y.lambda));
    }
}
