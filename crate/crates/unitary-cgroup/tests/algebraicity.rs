mod common;

use proptest::prelude::*;
use rand::Rng;
use ucg::algebraicity::*;
use ucg::cgroup::CuGroup;
use ucg::field::Field;
use ucg::matrix::{phi_matrix, Matrix};

fn p(s: &str) -> ArchParam {
    s.parse().unwrap()
}

#[test]
fn half_sums() {
    assert_eq!(half_sum_positive_roots(3), vec![2, 0, -2]);
    assert_eq!(half_sum_positive_roots(1), vec![0]);
    assert_eq!(half_sum_positive_roots(2), vec![1, -1]);
}

#[test]
fn twisting_dichotomy() {
    assert_eq!(twisting_element(3), Twisting::Exists(vec![1, 0, -1]));
    assert_eq!(twisting_element(1), Twisting::Exists(vec![0]));
    assert_eq!(twisting_element(2), Twisting::NoneExists { doubled_first: 1 });
    for n in 1..=20 {
        let rd = RootDatum::new(n);
        match twisting_element(n) {
            Twisting::Exists(t) => {
                assert!(n % 2 == 1);
                for c in rd.simple_coroots() {
                    assert_eq!(RootDatum::pairing(&t, &c), 1);
                }
                assert_eq!(rd.galois(&t), t);
            }
            Twisting::NoneExists { doubled_first } => {
                assert!(n % 2 == 0);
                assert_eq!(doubled_first % 2, 1);
            }
        }
    }
}

#[test]
fn root_datum_basics() {
    let rd = RootDatum::new(4);
    let x = vec![3, -1, 0, 2];
    assert_eq!(rd.galois(&rd.galois(&x)), x);
    assert_eq!(rd.simple_roots().len(), 3);
}

#[test]
fn cocharacter_branches() {
    let f = Field::cyclo(8);
    for n in [2, 3] {
        let g = CuGroup::new(&f, n);
        assert_eq!(twisting_cocharacter(&g, &f.one(), true).unwrap(), g.identity());
        let m1 = f.from_int(-1);
        assert_eq!(twisting_cocharacter(&g, &m1, true).unwrap(), twisting_cocharacter(&g, &m1, false).unwrap());
        let roots: Vec<_> = (0..4).map(|k| f.root_of_unity(4, k).unwrap()).collect();
        for z1 in &roots {
            for z2 in &roots {
                let lhs = g.mul(&twisting_cocharacter(&g, z1, true).unwrap(), &twisting_cocharacter(&g, z2, false).unwrap());
                assert_eq!(lhs, twisting_cocharacter(&g, &z1.mul(z2), true).unwrap());
            }
        }
    }
    let g = CuGroup::new(&Field::Rational, 2);
    assert!(twisting_cocharacter(&g, &Field::Rational.from_int(-1), true).is_err());
}

#[test]
fn classification_examples() {
    assert_eq!(classify_algebraicity(&p("1/2,-1/2")), Algebraicity::C);
    assert_eq!(classify_algebraicity(&p("1,0")), Algebraicity::L);
    assert_eq!(classify_algebraicity(&p("1,0,-1")), Algebraicity::Both);
    assert_eq!(classify_algebraicity(&p("1/2,0")), Algebraicity::Neither);
    assert!("1/3".parse::<ArchParam>().is_err());
}

#[test]
fn symmetry_and_shape_examples() {
    assert!(!pairing_symmetry_options(&p("1/2,-1/2")).antisymmetric_possible);
    assert!(pairing_symmetry_options(&p("1/2,1/2,-1/2,-1/2")).antisymmetric_possible);
    assert!(!pairing_symmetry_options(&p("0")).antisymmetric_possible);
    assert!(is_nondegenerate_lds_shape(&p("1/2,1/2,-1/2")));
    assert!(!is_nondegenerate_lds_shape(&p("0,0,0")));
    assert!(is_nondegenerate_lds_shape(&p("3/2,1/2,-1/2,-3/2")));
}

#[test]
fn weil_examples() {
    let f = Field::fp(13).unwrap();
    let w = WeilParamR::new(p("1/2,-1/2"), Matrix::identity(&f, 2), 12).unwrap();
    let chk = weil_square_check(&w, Algebraicity::C);
    assert!(chk.consistent);
    assert_eq!(chk.forced, ForcedSymmetry::Symmetric);
    // Phi_2 does not commute with r(z), so it is built without the sampling check
    let w = WeilParamR { param: p("1/2,-1/2"), a: phi_matrix(&f, 2) };
    assert!(!weil_square_check(&w, Algebraicity::C).consistent);
    assert!(WeilParamR::new(p("1/2,-1/2"), phi_matrix(&f, 2), 12).is_err());
    let w = WeilParamR::new(p("1,0,-1"), Matrix::identity(&f, 3), 12).unwrap();
    assert!(weil_square_check(&w, Algebraicity::L).consistent);
}

fn all_params(n: usize, values: &[i64]) -> Vec<ArchParam> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v: Vec<i64>| values.iter().map(move |&x| [v.clone(), vec![x]].concat())).collect();
    }
    out.into_iter().map(|d| ArchParam::from_halves(&d)).collect()
}

/// Enumerates block-supported matrices with the given symmetry over F5.
fn brute_force_exists(param: &ArchParam, antisym: bool) -> bool {
    let f = Field::fp(5).unwrap();
    let n = param.n();
    let d = &param.doubled;
    let slots: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| if antisym { i < j } else { i <= j }).filter(|&(i, j)| d[i] == d[j]).collect();
    let range: i64 = if antisym { 5 } else { 2 };
    let total = (range as u64).pow(slots.len() as u32);
    (0..total).any(|mut code| {
        let mut m = Matrix::zeros(&f, n, n);
        for &(i, j) in &slots {
            let v = f.from_int((code % range as u64) as i64);
            code /= range as u64;
            m.set(i, j, v.clone());
            m.set(j, i, if antisym { v.neg() } else { v });
        }
        m.is_invertible()
    })
}

#[test]
fn symmetry_options_match_brute_force() {
    for n in 1..=4 {
        for param in all_params(n, &[-1, 0, 1]) {
            let opt = pairing_symmetry_options(&param);
            assert_eq!(opt.symmetric_possible, brute_force_exists(&param, false), "{param:?}");
            assert_eq!(opt.antisymmetric_possible, brute_force_exists(&param, true), "{param:?}");
        }
    }
}

#[test]
fn mult_two_remark() {
    for n in 1..=4 {
        for param in all_params(n, &[-3, -2, -1, 0, 1, 2, 3]) {
            let alg = classify_algebraicity(&param);
            let some_single = param.multiplicities().values().any(|&m| m == 1);
            if is_nondegenerate_lds_shape(&param) && alg != Algebraicity::Neither && some_single {
                assert!(!pairing_symmetry_options(&param).antisymmetric_possible);
            }
        }
    }
}

#[test]
fn square_check_forces_symmetry_on_random_a() {
    let f = Field::fp(13).unwrap();
    let mut rng = common::rng(11);
    let mut hits = [0usize; 2];
    for _ in 0..2000 {
        let n = rng.gen_range(1..=4);
        let alg_c = rng.gen_bool(0.5);
        let shift = if alg_c { (n as i64 - 1).rem_euclid(2) } else { 0 };
        let doubled: Vec<i64> = (0..n).map(|_| 2 * rng.gen_range(-1..=1) + shift).collect();
        let param = ArchParam::from_halves(&doubled);
        let alg = classify_algebraicity(&param);
        let b = Matrix::from_fn(&f, n, n, |i, j| if doubled[i] == doubled[j] { common::random_elem(&f, &mut rng) } else { f.zero() });
        let a = match rng.gen_range(0..3) {
            0 => b.clone(),
            1 => b.add(&b.transpose()),
            _ => b.sub(&b.transpose()),
        };
        let Ok(w) = WeilParamR::new(param, a.clone(), 12) else { continue };
        let chk = weil_square_check(&w, alg);
        let expected = if alg_c { ForcedSymmetry::Symmetric } else { ForcedSymmetry::SignedBy(if n % 2 == 1 { 1 } else { -1 }) };
        if alg != Algebraicity::Both {
            assert_eq!(chk.forced, expected);
        }
        assert_eq!(chk.consistent, satisfies(&a, chk.forced), "{a} {doubled:?}");
        hits[chk.consistent as usize] += 1;
    }
    assert!(hits[0] > 50 && hits[1] > 50, "{hits:?}");
}

proptest! {
    #[test]
    fn both_iff_odd(n in 1usize..8, base in prop::collection::vec(-5i64..5, 8), c in any::<bool>()) {
        let shift = if c { (n as i64 - 1).rem_euclid(2) } else { 0 };
        let param = ArchParam::from_halves(&base[..n].iter().map(|x| 2 * x + shift).collect::<Vec<_>>());
        let alg = classify_algebraicity(&param);
        prop_assert_eq!(alg == Algebraicity::Both, n % 2 == 1);
        prop_assert!(alg != Algebraicity::Neither);
    }
}
