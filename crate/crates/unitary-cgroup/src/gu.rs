//! Locally conjugate, globally non-conjugate CGU-valued representations of
//! (Z/4)^2, and the Pfaffian polarisation that tells them apart.

use std::sync::Arc;

use crate::cgroup::{CgroupError, CguElement, CguGroup, GuAction};
use crate::field::{field_sqrt, Elem, Field};
use crate::galois::GaloisModel;
use crate::matrix::{generic_invertible, grid_values, intertwiner_space, phi_matrix, simplex_tuples, Matrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GuError {
    #[error("n = {0} is not a positive multiple of 4")]
    NotMultipleOfFour(usize),
    #[error("{which} is not a homomorphism at ({a}, {b})")]
    NotHomomorphism { which: &'static str, a: usize, b: usize },
    #[error("{which} sends {element} to the wrong coset")]
    WrongCoset { which: &'static str, element: usize },
    #[error("field {0} lacks a primitive {1}-th root of unity")]
    MissingRoot(String, usize),
    #[error("pfaffian polarisation needs square matrices of one even size")]
    BadPolarisationInput,
    #[error("arity-one invariant {0} differs")]
    Arity1Disagree(String),
    #[error(transparent)]
    Cgroup(#[from] CgroupError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// How the 2x2 block matrix with blocks A, B is laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockLayout {
    /// diag(A, B)
    #[default]
    Diagonal,
    /// [[0, A], [B, 0]]
    AntiDiagonal,
}

/// (Z/4)^2 indexed x + 4y, with Gamma0 = {x + y even} and c~ = (1, 0).
pub fn z4_squared_model() -> Arc<GaloisModel> {
    let idx = |x: usize, y: usize| (x % 4) + 4 * (y % 4);
    let mult = (0..16).map(|a| (0..16).map(|b| idx(a % 4 + b % 4, a / 4 + b / 4)).collect()).collect();
    let g0 = (0..16).map(|a| (a % 4 + a / 4) % 2 == 0).collect();
    Arc::new(GaloisModel::new(mult, g0, 1).expect("valid model"))
}

pub fn label(a: usize) -> (usize, usize) {
    (a % 4, a / 4)
}

#[derive(Debug, Clone)]
pub struct GuWitnessPair {
    pub n: usize,
    pub m: usize,
    pub group: CguGroup,
    pub model: Arc<GaloisModel>,
    pub r1: Vec<CguElement>,
    pub r2: Vec<CguElement>,
}

fn four(layout: BlockLayout, a: &Matrix, b: &Matrix) -> Matrix {
    match layout {
        BlockLayout::Diagonal => Matrix::block_diag(&[a, b]),
        BlockLayout::AntiDiagonal => {
            let z = Matrix::zeros(a.field(), a.rows(), a.cols());
            Matrix::from_blocks(&z, a, b, &z)
        }
    }
}

/// Validates R: (Z/4)^2 -> CGU on all 256 products.
pub fn validate_images(group: &CguGroup, model: &GaloisModel, images: &[CguElement], which: &'static str) -> Result<(), GuError> {
    for a in model.elements() {
        if images[a].coset == model.in_gamma0(a) {
            return Err(GuError::WrongCoset { which, element: a });
        }
        for b in model.elements() {
            if group.mul(&images[a], &images[b]) != images[model.mul(a, b)] {
                return Err(GuError::NotHomomorphism { which, a, b });
            }
        }
    }
    Ok(())
}

/// Images R(x, y) = R(1,0)^x R(0,1)^y of a pair of generator images.
pub fn images_from_generators(group: &CguGroup, e10: &CguElement, e01: &CguElement) -> Vec<CguElement> {
    (0..16)
        .map(|a| {
            let (x, y) = label(a);
            group.mul(&group.pow(e10, x), &group.pow(e01, y))
        })
        .collect()
}

pub fn build_witness_pair_with(n: usize, field: &Field, layout: BlockLayout, action: GuAction) -> Result<GuWitnessPair, GuError> {
    if n == 0 || n % 4 != 0 {
        return Err(GuError::NotMultipleOfFour(n));
    }
    let m = n / 2;
    let zeta = field.root_of_unity(n as u64, 1).ok_or_else(|| GuError::MissingRoot(field.describe(), n))?;
    let group = CguGroup::new(field, n, action);
    let (id, phi_m, phi_n) = (Matrix::identity(field, m), phi_matrix(field, m), phi_matrix(field, n));
    let one = field.one();
    let gen = |a: &Matrix, b: &Matrix, s: &Elem| group.element(&four(layout, a, b).mul(&phi_n).scale(s), &one, &one, true);
    let model = z4_squared_model();
    let r1 = images_from_generators(&group, &gen(&phi_m, &id, &one)?, &gen(&id, &phi_m, &one)?);
    let r2 = images_from_generators(&group, &gen(&phi_m, &id, &zeta)?, &gen(&id, &phi_m, &zeta)?);
    validate_images(&group, &model, &r1, "R1")?;
    validate_images(&group, &model, &r2, "R2")?;
    Ok(GuWitnessPair { n, m, group, model, r1, r2 })
}

/// The pair over Q(zeta_4n) with the block-diagonal layout and the
/// standard action.
pub fn build_witness_pair(n: usize) -> Result<GuWitnessPair, GuError> {
    build_witness_pair_with(n, &Field::cyclo(4 * n as u32), BlockLayout::Diagonal, GuAction::Standard)
}

impl GuWitnessPair {
    pub fn field(&self) -> &Field {
        self.group.field()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let imgs = |r: &[CguElement]| r.iter().map(|x| x.to_json()).collect::<Vec<_>>();
        serde_json::json!({"n": self.n, "field": self.field().describe(), "r1": imgs(&self.r1), "r2": imgs(&self.r2)})
    }
}

// ---------------------------------------------------------------- conjugacy

fn matrix_part(group: &CguGroup, x: &CguElement) -> Matrix {
    if x.coset {
        group.y_form(x)
    } else {
        x.g.clone()
    }
}

/// Linear conditions on k for h = (k, *, *) with h x h^-1 = y: k g = s g' k
/// on the identity coset (s the sign relating the mu-coordinates), and
/// k W = W' k with W = Y Y^-t on the c-coset.
fn linear_pairs(group: &CguGroup, xs: &[&CguElement], ys: &[&CguElement]) -> Option<(Vec<Matrix>, Vec<Matrix>)> {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (x, y) in xs.iter().zip(ys) {
        if x.coset != y.coset {
            return None;
        }
        let (mx, my) = (matrix_part(group, x), matrix_part(group, y));
        if x.coset {
            let w = |m: &Matrix| m.mul(&m.inverse().expect("invertible").transpose());
            left.push(w(&my));
            right.push(w(&mx));
        } else {
            let s = if x.mu == y.mu { my } else if x.mu == y.mu.neg() { my.neg() } else { return None };
            left.push(s);
            right.push(mx);
        }
    }
    Some((left, right))
}

/// A reflection u with u Y u^t = Y and det u = -1, from a vector in the
/// radical of the antisymmetric part of Y.
fn reflection_for(y: &Matrix) -> Option<Matrix> {
    let f = y.field().clone();
    let n = y.rows();
    let half = f.from_int(2).inv()?;
    let sym = y.add(&y.transpose()).scale(&half);
    let anti = y.sub(&y.transpose());
    let rows: Vec<Vec<Elem>> = (0..n).map(|i| (0..n).map(|j| anti.get(i, j).clone()).collect()).collect();
    for v in crate::matrix::kernel(&f, &rows, n) {
        let col = Matrix::from_vec(&f, n, 1, v);
        let q = col.transpose().mul(&sym).mul(&col).get(0, 0).clone();
        if q.is_zero() {
            continue;
        }
        let two_over_q = f.from_int(2).div(&q)?;
        let u = Matrix::identity(&f, n).sub(&col.mul(&col.transpose()).mul(&sym).scale(&two_over_q));
        if u.mul(y).mul(&u.transpose()) == *y && u.det().ok()? == f.from_int(-1) {
            return Some(u);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CguSearch {
    Found(CguElement),
    /// the linear stage is zero or the quadratic stage exhausted a finite field
    None { linear_dim: usize, exhaustive: bool },
}

/// Searches h = (k, 1, 1) with h x_i h^-1 = y_i for all i.
pub fn cgu_conjugator(group: &CguGroup, xs: &[&CguElement], ys: &[&CguElement], grid_degree: usize) -> CguSearch {
    let field = group.field().clone();
    let n = group.n();
    let Some((left, right)) = linear_pairs(group, xs, ys) else {
        return CguSearch::None { linear_dim: 0, exhaustive: true };
    };
    let basis = intertwiner_space(&left, &right).unwrap_or_default();
    let linear_dim = basis.len();
    if basis.is_empty() {
        return CguSearch::None { linear_dim, exhaustive: true };
    }
    let one = field.one();
    let verify = |k: &Matrix| -> Option<CguElement> {
        let h = group.element(k, &one, &one, false).ok()?;
        xs.iter().zip(ys).all(|(x, y)| group.conjugate(&h, x).ok().as_ref() == Some(*y)).then_some(h)
    };
    let c_pair = xs.iter().zip(ys).find(|(x, _)| x.coset);
    let reflection = c_pair.and_then(|(x, _)| reflection_for(&group.y_form(x)));
    let attempt = |k: &Matrix| -> Option<CguElement> {
        if !k.is_invertible() {
            return None;
        }
        let mut scaled = vec![k.clone()];
        if let Some((x, y)) = c_pair {
            // k Y k^t = s Y' fixes k up to sqrt(1/s), and the sign of the central quotient
            let z = k.mul(&group.y_form(x)).mul(&k.transpose());
            let yy = group.y_form(y);
            let (i, j) = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| !yy.get(i, j).is_zero())?;
            let s = z.get(i, j).div(yy.get(i, j))?;
            if z != yy.scale(&s) {
                return None;
            }
            scaled.clear();
            for target in [s.inv()?, s.inv()?.neg()] {
                if let Ok(t) = field_sqrt(&target) {
                    scaled.push(k.scale(&t));
                    scaled.push(k.scale(&t.neg()));
                }
            }
        }
        for k in scaled {
            if let Some(h) = verify(&k) {
                return Some(h);
            }
            if let Some(u) = &reflection {
                if let Some(h) = verify(&k.mul(u)) {
                    return Some(h);
                }
            }
        }
        None
    };
    // proportional forms are matched by a scalar, up to the reflection
    if let Some(h) = attempt(&Matrix::identity(&field, n)) {
        return CguSearch::Found(h);
    }
    if let Ok(Some(k)) = generic_invertible(&basis, n) {
        if let Some(h) = attempt(&k) {
            return CguSearch::Found(h);
        }
    }
    for b in &basis {
        if let Some(h) = attempt(b) {
            return CguSearch::Found(h);
        }
    }
    let vals = grid_values(&field, grid_degree + 1);
    let mut found = None;
    simplex_tuples(basis.len(), grid_degree, &mut |t| {
        let k = basis.iter().zip(t).fold(Matrix::zeros(&field, n, n), |acc, (b, &c)| if c == 0 { acc } else { acc.add(&b.scale(&vals[c])) });
        found = attempt(&k);
        found.is_some()
    });
    match found {
        Some(h) => CguSearch::Found(h),
        None => CguSearch::None { linear_dim, exhaustive: false },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalWitness {
    pub element: (usize, usize),
    pub coset: bool,
    pub linear_dim: usize,
    /// det of a generic member of the linear stage is a nonzero polynomial
    pub generic_det_nonzero: bool,
    pub witness: Option<CguElement>,
}

/// Per-element conjugacy R1(a) ~ R2(a) for all 16 elements.
pub fn check_local_conjugacy(p: &GuWitnessPair) -> Vec<LocalWitness> {
    let g = &p.group;
    p.model
        .elements()
        .map(|a| {
            let (x, y) = (&p.r1[a], &p.r2[a]);
            let basis = linear_pairs(g, &[x], &[y]).map(|(l, r)| intertwiner_space(&l, &r).unwrap_or_default()).unwrap_or_default();
            let generic_det_nonzero = !basis.is_empty() && matches!(generic_invertible(&basis, p.n), Ok(Some(_)));
            let witness = match cgu_conjugator(g, &[x], &[y], 2) {
                CguSearch::Found(h) => Some(h),
                CguSearch::None { .. } => None,
            };
            LocalWitness { element: label(a), coset: x.coset, linear_dim: basis.len(), generic_det_nonzero, witness }
        })
        .collect()
}

// ---------------------------------------------------------------- invariants

/// Full polarisation of pf(A - A^t) on 2r x 2r matrices in k arguments,
/// by inclusion-exclusion. With k = r it is the symmetric multilinear form
/// with P(A, ..., A) = r! pf(A - A^t); other k give zero on the diagonal.
pub fn pfaffian_polarization(args: &[Matrix]) -> Result<Elem, GuError> {
    let first = args.first().ok_or(GuError::BadPolarisationInput)?;
    let size = first.rows();
    if size % 2 == 1 || args.iter().any(|a| a.rows() != size || a.cols() != size) {
        return Err(GuError::BadPolarisationInput);
    }
    let field = first.field().clone();
    let k = args.len();
    let skews: Vec<Matrix> = args.iter().map(|a| a.sub(&a.transpose())).collect();
    let mut total = field.zero();
    for mask in 1u32..(1 << k) {
        let sum = (0..k).filter(|i| mask >> i & 1 == 1).fold(Matrix::zeros(&field, size, size), |acc, i| acc.add(&skews[i]));
        let pf = sum.pfaffian()?;
        let sign = (k - mask.count_ones() as usize) % 2 == 1;
        total = if sign { total.sub(&pf) } else { total.add(&pf) };
    }
    Ok(total)
}

/// Y mu^(1-n), which is unchanged by the central element.
fn y_tilde(g: &CguGroup, x: &CguElement) -> Matrix {
    let n = g.n() as i64;
    matrix_part(g, x).scale(&x.mu.pow(1 - n).expect("unit"))
}

/// Arity-one CGU invariants: s_i(g mu^(1-n)), lambda^(+-1), mu^(+-2) on the
/// identity coset; s_i(W), mu^(+-2), lambda^2 det(Y~) and lambda pf(Y~ - Y~^t)
/// on the c-coset.
pub fn cgu_arity1_values(g: &CguGroup, x: &CguElement) -> Vec<(String, Elem)> {
    let mut out = Vec::new();
    let mu2 = x.mu.mul(&x.mu);
    out.push(("mu^2".into(), mu2.clone()));
    out.push(("mu^-2".into(), mu2.inv().expect("unit")));
    let yt = y_tilde(g, x);
    if x.coset {
        let w = yt.mul(&yt.inverse().expect("invertible").transpose());
        for (i, c) in w.char_poly_coeffs().expect("square").into_iter().enumerate() {
            out.push((format!("s{}(Y Y^-t)", i + 1), c));
        }
        out.push(("lambda^2 det(Y)".into(), x.lambda.mul(&x.lambda).mul(&yt.det().expect("square"))));
        if g.n() % 2 == 0 {
            out.push(("lambda pf(Y - Y^t)".into(), x.lambda.mul(&yt.sub(&yt.transpose()).pfaffian().expect("even"))));
        }
    } else {
        for (i, c) in yt.char_poly_coeffs().expect("square").into_iter().enumerate() {
            out.push((format!("s{}(g)", i + 1), c));
        }
        out.push(("lambda".into(), x.lambda.clone()));
        out.push(("lambda^-1".into(), x.lambda.inv().expect("unit")));
    }
    out
}

/// A conjugation-invariant function on tuples of CGU elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CguInvariant {
    /// s_i(Y~_a Y~_b^-1) on a pair of c-coset elements
    RatioTrace(usize),
    /// s_i(Y~_a Y~_b^-t) on a pair of c-coset elements
    TwistTrace(usize),
    /// s_i(g~_a W_b) for an identity-coset a and a c-coset b
    MixedTrace(usize),
    /// lambda_1 P(Y~_1, ..., Y~_(n/2)) on c-coset elements
    PfaffianPolar,
}

impl std::fmt::Display for CguInvariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CguInvariant::RatioTrace(i) => write!(f, "s{i}(Y1 Y2^-1)"),
            CguInvariant::TwistTrace(i) => write!(f, "s{i}(Y1 Y2^-t)"),
            CguInvariant::MixedTrace(i) => write!(f, "s{i}(g1 Y2 Y2^-t)"),
            CguInvariant::PfaffianPolar => write!(f, "lambda1 P(Y1, ..., Yr)"),
        }
    }
}

/// Evaluates an invariant; None when the cosets do not fit.
pub fn eval_cgu_invariant(g: &CguGroup, f: &CguInvariant, xs: &[&CguElement]) -> Option<Elem> {
    let yt: Vec<Matrix> = xs.iter().map(|x| y_tilde(g, x)).collect();
    let coef = |m: Matrix, i: usize| m.char_poly_coeffs().ok().map(|c| c[i - 1].clone());
    match f {
        CguInvariant::RatioTrace(i) if xs.len() == 2 && xs[0].coset && xs[1].coset => coef(yt[0].mul(&yt[1].inverse()?), *i),
        CguInvariant::TwistTrace(i) if xs.len() == 2 && xs[0].coset && xs[1].coset => coef(yt[0].mul(&yt[1].inverse()?.transpose()), *i),
        CguInvariant::MixedTrace(i) if xs.len() == 2 && !xs[0].coset && xs[1].coset => {
            coef(yt[0].mul(&yt[1]).mul(&yt[1].inverse()?.transpose()), *i)
        }
        CguInvariant::PfaffianPolar if xs.len() * 2 == g.n() && xs.iter().all(|x| x.coset) => {
            Some(xs[0].lambda.mul(&pfaffian_polarization(&yt).ok()?))
        }
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separator {
    pub invariant: CguInvariant,
    pub tuple: Vec<(usize, usize)>,
    pub v1: Elem,
    pub v2: Elem,
}

impl Separator {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"invariant": self.invariant.to_string(), "tuple": self.tuple, "v1": self.v1.to_string(), "v2": self.v2.to_string()})
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparatorSearch {
    Found(Separator),
    NotFound { evaluations: usize },
}

/// Multisets of size k from 0..m, in lexicographic order.
fn multisets(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in multisets(m, k - 1) {
        let lo = rest.last().copied().unwrap_or(0);
        for x in lo..m {
            let mut v = rest.clone();
            v.push(x);
            out.push(v);
        }
    }
    out
}

/// Checks arity-one agreement, then searches word invariants in arity two
/// and the Pfaffian polarisation in arity n/2 for a separator.
pub fn find_separator(
    group: &CguGroup,
    model: &GaloisModel,
    r1: &[CguElement],
    r2: &[CguElement],
    budget: usize,
) -> Result<SeparatorSearch, GuError> {
    for a in model.elements() {
        for ((name, v1), (_, v2)) in cgu_arity1_values(group, &r1[a]).into_iter().zip(cgu_arity1_values(group, &r2[a])) {
            if v1 != v2 {
                return Err(GuError::Arity1Disagree(format!("{name} at {:?}", label(a))));
            }
        }
    }
    let n = group.n();
    let mut spent = 0usize;
    let mut tuples: Vec<(CguInvariant, Vec<usize>)> = Vec::new();
    for i in 1..=n {
        for f in [CguInvariant::RatioTrace(i), CguInvariant::TwistTrace(i), CguInvariant::MixedTrace(i)] {
            for a in model.elements() {
                for b in model.elements() {
                    tuples.push((f.clone(), vec![a, b]));
                }
            }
        }
    }
    let odd: Vec<usize> = model.elements().filter(|&a| !model.in_gamma0(a)).collect();
    if n % 2 == 0 {
        for ms in multisets(odd.len(), n / 2) {
            tuples.push((CguInvariant::PfaffianPolar, ms.iter().map(|&i| odd[i]).collect()));
        }
    }
    for (f, t) in tuples {
        let x1: Vec<&CguElement> = t.iter().map(|&a| &r1[a]).collect();
        let Some(v1) = eval_cgu_invariant(group, &f, &x1) else { continue };
        spent += 1;
        if spent > budget {
            return Ok(SeparatorSearch::NotFound { evaluations: spent - 1 });
        }
        let x2: Vec<&CguElement> = t.iter().map(|&a| &r2[a]).collect();
        let v2 = eval_cgu_invariant(group, &f, &x2).expect("same cosets");
        if v1 != v2 {
            return Ok(SeparatorSearch::Found(Separator { invariant: f, tuple: t.iter().map(|&a| label(a)).collect(), v1, v2 }));
        }
    }
    Ok(SeparatorSearch::NotFound { evaluations: spent })
}

pub fn find_distinguishing_invariant(p: &GuWitnessPair, budget: usize) -> Result<SeparatorSearch, GuError> {
    find_separator(&p.group, &p.model, &p.r1, &p.r2, budget)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GlobalVerdict {
    Conjugate(CguElement),
    /// certified by an invariant taking different values
    NonConjugate { linear_dim: usize, separator: Separator },
    Undetermined { linear_dim: usize },
}

/// Simultaneous conjugacy of two representations on the same model.
pub fn global_conjugacy(group: &CguGroup, model: &GaloisModel, r1: &[CguElement], r2: &[CguElement]) -> GlobalVerdict {
    let xs: Vec<&CguElement> = r1.iter().collect();
    let ys: Vec<&CguElement> = r2.iter().collect();
    let linear_dim = match cgu_conjugator(group, &xs, &ys, 3) {
        CguSearch::Found(h) => return GlobalVerdict::Conjugate(h),
        CguSearch::None { linear_dim, .. } => linear_dim,
    };
    match find_separator(group, model, r1, r2, usize::MAX) {
        Ok(SeparatorSearch::Found(separator)) => GlobalVerdict::NonConjugate { linear_dim, separator },
        _ => GlobalVerdict::Undetermined { linear_dim },
    }
}

pub fn check_global_conjugacy(p: &GuWitnessPair) -> GlobalVerdict {
    global_conjugacy(&p.group, &p.model, &p.r1, &p.r2)
}
