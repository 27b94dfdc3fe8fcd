//! Polarised representations versus C-group valued representations.

use std::sync::Arc;

use crate::cgroup::{CgroupError, CuElement, CuGroup};
use crate::field::{field_sqrt, Elem, Field, FieldError};
use crate::galois::{CharacterTable, GaloisModel};
use crate::matrix::{symmetric_congruence, Matrix, MatrixError};
use crate::polarisation::{extend_character, PolarisationError, PolarisedRep};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiftError {
    #[error("polarisation character is not chi_lift^{exponent} at element {element}")]
    CharacterMismatch { exponent: i64, element: usize },
    #[error("sign of P is not -chi_lift(c~)")]
    SignMismatch,
    #[error("not a homomorphism at ({0}, {1})")]
    NotHomomorphism(usize, usize),
    #[error("image of {0} lies in the wrong coset")]
    WrongCoset(usize),
    #[error("normalisation needs sign +1")]
    NeedsPositiveSign,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Cgroup(#[from] CgroupError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Polarisation(#[from] PolarisationError),
}

/// Exponent e in the relation P.chi = chi_lift^e on Gamma0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LiftExponent {
    #[default]
    OneMinusN,
    NMinusOne,
}

impl LiftExponent {
    pub fn value(self, n: usize) -> i64 {
        match self {
            LiftExponent::OneMinusN => 1 - n as i64,
            LiftExponent::NMinusOne => n as i64 - 1,
        }
    }
}

/// A homomorphism Gamma -> CU, stored on every element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuRep {
    pub model: Arc<GaloisModel>,
    pub group: Arc<CuGroupHandle>,
    pub images: Vec<CuElement>,
}

/// Shared group data, compared by size and field only.
#[derive(Debug)]
pub struct CuGroupHandle(pub CuGroup);

impl PartialEq for CuGroupHandle {
    fn eq(&self, o: &CuGroupHandle) -> bool {
        self.0.n() == o.0.n() && self.0.field() == o.0.field()
    }
}
impl Eq for CuGroupHandle {}

impl CuRep {
    pub fn new(model: &Arc<GaloisModel>, group: CuGroup, images: Vec<CuElement>) -> Result<CuRep, LiftError> {
        let r = CuRep { model: model.clone(), group: Arc::new(CuGroupHandle(group)), images };
        r.validate()?;
        Ok(r)
    }

    pub fn group(&self) -> &CuGroup {
        &self.group.0
    }

    pub fn n(&self) -> usize {
        self.group().n()
    }

    pub fn image(&self, g: usize) -> &CuElement {
        &self.images[g]
    }

    /// Exhaustive homomorphism and coset check.
    pub fn validate(&self) -> Result<(), LiftError> {
        let m = &self.model;
        for g in m.elements() {
            if self.images[g].coset == m.in_gamma0(g) {
                return Err(LiftError::WrongCoset(g));
            }
        }
        for a in m.elements() {
            for b in m.elements() {
                if self.group().mul(&self.images[a], &self.images[b]) != self.images[m.mul(a, b)] {
                    return Err(LiftError::NotHomomorphism(a, b));
                }
            }
        }
        Ok(())
    }

    /// h R h^-1 for h in the identity component.
    pub fn conjugate(&self, h: &CuElement) -> Result<CuRep, LiftError> {
        let images = self.images.iter().map(|x| self.group().conjugate(h, x)).collect::<Result<_, _>>()?;
        Ok(CuRep { model: self.model.clone(), group: self.group.clone(), images })
    }

    pub fn d_values(&self) -> Vec<Elem> {
        self.images.iter().map(|x| self.group().d_map(x)).collect()
    }

    /// Transports R along the map Z[zeta_N] -> target of [`Field::map_cyclo`].
    pub fn map_field(&self, target: &Field) -> Result<CuRep, LiftError> {
        let group = CuGroup::new(target, self.n());
        let mut images = Vec::with_capacity(self.images.len());
        for x in &self.images {
            let data = x.a.entries().iter().map(|e| target.map_cyclo(e)).collect::<Result<Vec<_>, _>>()?;
            let a = Matrix::from_vec(target, x.a.rows(), x.a.cols(), data);
            images.push(CuElement { a, b: target.map_cyclo(&x.b)?, coset: x.coset });
        }
        CuRep::new(&self.model, group, images)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(self.images.iter().enumerate().map(|(g, x)| (g.to_string(), x.to_json())).collect())
    }
}

fn check_characters(p: &PolarisedRep, chi_lift: &CharacterTable, exponent: LiftExponent) -> Result<(), LiftError> {
    let n = p.rep.dim();
    let e = exponent.value(n);
    for g in p.model().gamma0() {
        if *p.chi.value(g) != chi_lift.value(g).pow(e).expect("unit") {
            return Err(LiftError::CharacterMismatch { exponent: e, element: g });
        }
    }
    let c = p.model().c_tilde();
    if p.chi.value(c) != chi_lift.value(c) {
        return Err(LiftError::SignMismatch);
    }
    Ok(())
}

/// Builds R from the raw formulas
/// R(d) = (rho(d) chi(d)^((n-1)/2), chi(d)^(1/2)) and
/// R(c~) = (A chi(c~)^((n-1)/2) Phi^-1, chi(c~)^(1/2)) c,
/// with the canonical square root negated wherever `flip(g)` holds.
pub fn lift_with_branches(
    p: &PolarisedRep,
    chi_lift: &CharacterTable,
    exponent: LiftExponent,
    flip: &dyn Fn(usize) -> bool,
) -> Result<CuRep, LiftError> {
    check_characters(p, chi_lift, exponent)?;
    let model = p.model();
    let n = p.rep.dim();
    let field = p.rep.field().clone();
    let group = CuGroup::new(&field, n);
    let root = |g: usize| -> Result<Elem, LiftError> {
        let s = field_sqrt(chi_lift.value(g))?;
        Ok(if flip(g) { s.neg() } else { s })
    };
    let mut images: Vec<Option<CuElement>> = vec![None; model.order()];
    for d in model.gamma0() {
        let s = root(d)?;
        let g = p.rep.image(d).scale(&s.pow(n as i64 - 1).unwrap());
        images[d] = Some(group.from_raw(&g, &s, false)?);
    }
    let c = model.c_tilde();
    let s = root(c)?;
    let g = p.a.scale(&s.pow(n as i64 - 1).unwrap()).mul(group.phi_inv());
    let rc = group.from_raw(&g, &s, true)?;
    for x in model.elements() {
        let (a, off) = model.split(x);
        if off {
            images[x] = Some(group.mul(&rc, images[a].as_ref().unwrap()));
        }
    }
    let images = images.into_iter().map(Option::unwrap).collect();
    CuRep::new(model, group, images)
}

/// The lift with canonical square-root branches.
pub fn lift(p: &PolarisedRep, chi_lift: &CharacterTable) -> Result<CuRep, LiftError> {
    lift_with_branches(p, chi_lift, LiftExponent::OneMinusN, &|_| false)
}

/// Inverse of [`lift`]: rho from the matrix coordinate, chi_lift = d o R and
/// A = a(c~) Phi.
pub fn descend(r: &CuRep) -> Result<(PolarisedRep, CharacterTable), LiftError> {
    let model = &r.model;
    let g = r.group();
    let n = r.n();
    let chi_lift = CharacterTable::new(model, r.d_values()).map_err(PolarisationError::from)?;
    let images = model.gamma0().into_iter().map(|d| (d, r.image(d).a.clone())).collect();
    let rep = crate::galois::Rep::new(model, images).map_err(PolarisationError::from)?;
    let c = model.c_tilde();
    let a = r.image(c).a.mul(g.phi());
    let chi0: Vec<Elem> = model.elements().map(|x| chi_lift.value(x).pow(1 - n as i64).unwrap()).collect();
    let chi = extend_character(model, &chi0, chi_lift.value(c))?;
    Ok((PolarisedRep { rep, chi, a }, chi_lift))
}

/// -mu_c^2 for the raw coordinates (., mu_c) of R(c~).
pub fn sign_from_image(r: &CuRep) -> Elem {
    r.image(r.model.c_tilde()).b.neg()
}

/// Conjugates R by (h, 1) with h A h^t = I so that R(c~) becomes (Phi^-1, i) c.
pub fn normalize_c_image(r: &CuRep) -> Result<(CuRep, CuElement), LiftError> {
    let g = r.group();
    let n = r.n();
    let field = g.field().clone();
    let rc = r.image(r.model.c_tilde());
    if !rc.b.neg().is_one() {
        return Err(LiftError::NeedsPositiveSign);
    }
    let i = field_sqrt(&rc.b)?;
    // raw matrix part of R(c~) for mu = i, times Phi
    let a_raw = rc.a.scale(&i.pow(n as i64 - 1).unwrap()).mul(g.phi());
    let h = symmetric_congruence(&a_raw)?;
    let h_elem = g.from_raw(&h, &field.one(), false)?;
    let out = r.conjugate(&h_elem)?;
    Ok((out, h_elem))
}

/// (Phi^-1, i) c.
pub fn canonical_c_image(g: &CuGroup) -> Result<CuElement, LiftError> {
    let i = field_sqrt(&g.field().from_int(-1))?;
    Ok(g.from_raw(g.phi_inv(), &i, true)?)
}
