//! Polarised representations and their signs.

use std::sync::Arc;

use crate::field::Elem;
use crate::galois::{CharacterTable, GaloisError, GaloisModel, Rep};
use crate::matrix::{generic_invertible, intertwiner_space, Matrix, MatrixError, Rref};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolarisationError {
    #[error("rho^c is not isomorphic to rho^v chi (no intertwiner)")]
    NotSelfDual,
    #[error("intertwiner space has dimension {0} and mixed symmetry")]
    NotIrreducible(usize),
    #[error("no extension of chi with chi(c~) = {0} exists in the field")]
    NoExtension(i64),
    #[error("self-dual summands have different signs")]
    MixedSigns,
    #[error("not a summand")]
    NotASummand,
    #[error("restricted pairing on the summand is degenerate")]
    Degenerate,
    #[error("expected Schur sign {expected}, found {found}")]
    WrongSign { expected: i64, found: i64 },
    #[error("no invertible pairing found")]
    NoPairing,
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// (rho, chi, A) with pairing <x, y> = x^t A^-1 y.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarisedRep {
    pub rep: Rep,
    pub chi: CharacterTable,
    pub a: Matrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub element: Option<usize>,
    pub detail: String,
}

impl PolarisedRep {
    pub fn model(&self) -> &Arc<GaloisModel> {
        self.rep.model()
    }

    /// -chi(c~), as +1 or -1; None if chi(c~) is not a sign.
    pub fn sign(&self) -> Option<i64> {
        sign_of(&self.chi.value(self.model().c_tilde()).neg())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let chi: serde_json::Map<String, serde_json::Value> = self
            .model()
            .elements()
            .map(|g| (g.to_string(), serde_json::Value::String(self.chi.value(g).to_string())))
            .collect();
        serde_json::json!({"rep": self.rep.to_json(), "chi": chi, "A": self.a.to_json()})
    }
}

/// +1 / -1 for the field elements 1 / -1.
pub fn sign_of(x: &Elem) -> Option<i64> {
    if x.is_one() {
        Some(1)
    } else if x.neg().is_one() {
        Some(-1)
    } else {
        None
    }
}

/// Checks A = -chi(c~) A^t and rho^c(g) = A rho^v(g) A^-1 chi(g) on all of Gamma0,
/// reporting the lowest failing element.
pub fn validate_polarised(p: &PolarisedRep) -> Result<(), Violation> {
    let model = p.model();
    let c = p.chi.value(model.c_tilde());
    if p.a.rows() != p.rep.dim() || !p.a.is_invertible() {
        return Err(Violation { element: None, detail: "A must be invertible of size dim rho".into() });
    }
    if p.a != p.a.transpose().scale(&c.neg()) {
        return Err(Violation { element: None, detail: format!("A != -chi(c~) A^t with chi(c~) = {c}") });
    }
    let ai = p.a.inverse().unwrap();
    for g in model.gamma0() {
        let lhs = p.rep.image(model.conj_c(g));
        let dual = p.rep.image(g).inverse().expect("invertible").transpose();
        let rhs = p.a.mul(&dual).mul(&ai).scale(p.chi.value(g));
        if *lhs != rhs {
            return Err(Violation { element: Some(g), detail: format!("rho^c != A rho^v A^-1 chi at element {g}") });
        }
    }
    Ok(())
}

fn twisted_dual_images(rho: &Rep, chi0: &[Elem]) -> (Vec<Matrix>, Vec<Matrix>) {
    let model = rho.model();
    let conj = rho.conjugate_rep();
    let dual = rho.dual_rep();
    let g0 = model.gamma0();
    let x = g0.iter().map(|&g| conj.image(g).clone()).collect();
    let y = g0.iter().map(|&g| dual.image(g).scale(&chi0[g])).collect();
    (x, y)
}

/// Sign of a basis of symmetric or antisymmetric matrices; None if mixed.
fn uniform_sign(basis: &[Matrix]) -> Option<i64> {
    let mut lam = None;
    for b in basis {
        let s = if b.is_symmetric() {
            1
        } else if b.is_antisymmetric() {
            -1
        } else {
            return None;
        };
        if *lam.get_or_insert(s) != s {
            return None;
        }
    }
    lam
}

/// The Schur intertwiner A with rho^c = A rho^v A^-1 chi and its sign A^t = lambda A.
///
/// When rho is absolutely irreducible the intertwiner space is a line. When it
/// is larger but every element has the same symmetry type (rho irreducible over
/// the base but split over the coefficients), that common sign is returned.
pub fn schur_sign(rho: &Rep, chi0: &[Elem]) -> Result<(i64, Matrix), PolarisationError> {
    let (x, y) = twisted_dual_images(rho, chi0);
    let basis = intertwiner_space(&x, &y)?;
    if basis.is_empty() {
        return Err(PolarisationError::NotSelfDual);
    }
    let lam = uniform_sign(&basis).ok_or(PolarisationError::NotIrreducible(basis.len()))?;
    let a = match basis.iter().find(|b| b.is_invertible()) {
        Some(b) => b.clone(),
        None => generic_invertible(&basis, rho.dim()).ok().flatten().ok_or(PolarisationError::NotSelfDual)?,
    };
    Ok((lam, a))
}

/// Extends a Gamma0 character by the value v at c~.
pub fn extend_character(model: &Arc<GaloisModel>, chi0: &[Elem], v: &Elem) -> Result<CharacterTable, PolarisationError> {
    let values = model
        .elements()
        .map(|g| {
            let (a, off) = model.split(g);
            if off {
                v.mul(&chi0[a])
            } else {
                chi0[a].clone()
            }
        })
        .collect();
    CharacterTable::new(model, values).map_err(PolarisationError::from)
}

pub fn polarise_irreducible(rho: &Rep, chi0: &[Elem]) -> Result<PolarisedRep, PolarisationError> {
    let (lam, a) = schur_sign(rho, chi0)?;
    let field = rho.field().clone();
    let chi = extend_character(rho.model(), chi0, &field.from_int(-lam)).map_err(|_| PolarisationError::NoExtension(-lam))?;
    Ok(PolarisedRep { rep: rho.clone(), chi, a })
}

#[derive(Debug, Clone)]
pub enum Summand {
    /// A conjugate self-dual summand.
    SelfDual(Rep),
    /// s, contributing s + (s^c)^v chi.
    Pair(Rep),
}

/// Invertible A on s + (s^c)^v chi with zero diagonal blocks and A^t = lambda A.
fn pair_block(s: &Rep, chi0: &[Elem], lam: i64) -> Result<(Rep, Matrix), PolarisationError> {
    let t = s.conjugate_rep().dual_rep().twist_by(chi0);
    let sum = s.direct_sum(&t);
    let (x, y) = twisted_dual_images(&sum, chi0);
    let basis = intertwiner_space(&x, &y)?;
    let d = s.dim();
    let n = 2 * d;
    let field = s.field().clone();
    // impose the block pattern and the symmetry on the span of the basis
    let k = basis.len();
    let mut sys = Rref::new(&field, k);
    let lam_e = field.from_int(lam);
    for i in 0..n {
        for j in 0..n {
            let same_block = (i < d) == (j < d);
            let eq: Vec<Elem> = basis
                .iter()
                .map(|b| if same_block { b.get(i, j).clone() } else { b.get(i, j).sub(&lam_e.mul(b.get(j, i))) })
                .collect();
            sys.push(eq);
        }
    }
    let combos: Vec<Matrix> = sys
        .kernel()
        .into_iter()
        .map(|coeffs| coeffs.iter().zip(&basis).fold(Matrix::zeros(&field, n, n), |acc, (c, b)| acc.add(&b.scale(c))))
        .collect();
    if combos.is_empty() {
        return Err(PolarisationError::NoPairing);
    }
    let a = match combos.iter().find(|m| m.is_invertible()) {
        Some(m) => m.clone(),
        None => generic_invertible(&combos, n).ok().flatten().ok_or(PolarisationError::NoPairing)?,
    };
    Ok((sum, a))
}

/// Block-diagonal polarisation of a sum of self-dual summands and pairs.
/// `lambda` fixes the sign when only pairs are present (default +1).
pub fn polarise_semisimple(summands: &[Summand], chi0: &[Elem], lambda: Option<i64>) -> Result<PolarisedRep, PolarisationError> {
    let mut lam = None;
    let mut parts: Vec<(Rep, Option<Matrix>)> = Vec::new();
    for s in summands {
        if let Summand::SelfDual(r) = s {
            let (l, a) = schur_sign(r, chi0)?;
            if *lam.get_or_insert(l) != l {
                return Err(PolarisationError::MixedSigns);
            }
            parts.push((r.clone(), Some(a)));
        } else if let Summand::Pair(r) = s {
            parts.push((r.clone(), None));
        }
    }
    let lam = match (lam, lambda) {
        (Some(l), Some(x)) if l != x => return Err(PolarisationError::MixedSigns),
        (Some(l), _) => l,
        (None, x) => x.unwrap_or(1),
    };
    let mut reps = Vec::new();
    let mut blocks = Vec::new();
    for (r, a) in parts {
        match a {
            Some(a) => {
                reps.push(r);
                blocks.push(a);
            }
            None => {
                let (sum, a) = pair_block(&r, chi0, lam)?;
                reps.push(sum);
                blocks.push(a);
            }
        }
    }
    let rep = reps[1..].iter().fold(reps[0].clone(), |acc, r| acc.direct_sum(r));
    let refs: Vec<&Matrix> = blocks.iter().collect();
    let a = Matrix::block_diag(&refs);
    let field = rep.field().clone();
    let chi = extend_character(rep.model(), chi0, &field.from_int(-lam)).map_err(|_| PolarisationError::NoExtension(-lam))?;
    Ok(PolarisedRep { rep, chi, a })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MultOne {
    Sign(i64),
    NotApplicable { multiplicity: usize },
}

/// The sign of the pairing restricted to the unique copy of r inside P.
///
/// E spans Hom(r, rho); the restriction is B = E^t A^-1 E and B = lambda B^t.
pub fn multiplicity_one_sign(p: &PolarisedRep, r: &Rep) -> Result<MultOne, PolarisationError> {
    let g0 = p.model().gamma0();
    let x: Vec<Matrix> = g0.iter().map(|&g| p.rep.image(g).clone()).collect();
    let y: Vec<Matrix> = g0.iter().map(|&g| r.image(g).clone()).collect();
    let hom = intertwiner_space(&x, &y)?;
    match hom.len() {
        0 => return Err(PolarisationError::NotASummand),
        1 => {}
        m => return Ok(MultOne::NotApplicable { multiplicity: m }),
    }
    let e = &hom[0];
    let b = e.transpose().mul(&p.a.inverse().ok_or(MatrixError::Singular)?).mul(e);
    if !b.is_invertible() {
        return Err(PolarisationError::Degenerate);
    }
    if b.is_symmetric() {
        Ok(MultOne::Sign(1))
    } else if b.is_antisymmetric() {
        Ok(MultOne::Sign(-1))
    } else {
        Err(PolarisationError::Degenerate)
    }
}

/// The two polarisations of r + r for a symplectic r: diag(B, B) of sign -1
/// and [[0, -B], [B, 0]] of sign +1.
pub fn distinct_warning_pair(r: &Rep, chi0: &[Elem]) -> Result<(PolarisedRep, PolarisedRep), PolarisationError> {
    let (lam, b) = schur_sign(r, chi0)?;
    if lam != -1 {
        return Err(PolarisationError::WrongSign { expected: -1, found: lam });
    }
    let field = r.field().clone();
    let rep = r.direct_sum(r);
    let z = Matrix::zeros(&field, b.rows(), b.cols());
    let a1 = Matrix::block_diag(&[&b, &b]);
    let a2 = Matrix::from_blocks(&z, &b.neg(), &b, &z);
    let chi1 = extend_character(r.model(), chi0, &field.one()).map_err(|_| PolarisationError::NoExtension(1))?;
    let chi2 = extend_character(r.model(), chi0, &field.from_int(-1)).map_err(|_| PolarisationError::NoExtension(-1))?;
    Ok((PolarisedRep { rep: rep.clone(), chi: chi1, a: a1 }, PolarisedRep { rep, chi: chi2, a: a2 }))
}
