//! Concrete L- and C-groups of unitary groups as (matrix, scalars, coset) data.
//!
//! `CU` elements are stored in the canonical coordinates (a, b) = (g mu^(1-n), mu^2)
//! of the quotient of GL_n x GL_1 by ((-I)^(n-1), -1). `CGU` elements are stored
//! raw with a canonical choice between the two lifts.

use crate::field::{field_sqrt, Elem, Field, FieldError};
use crate::matrix::{phi_matrix, Matrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CgroupError {
    #[error("matrix part is singular")]
    Singular,
    #[error("scalar part is zero")]
    ZeroScalar,
    #[error("size or field mismatch")]
    Mismatch,
    #[error("conjugating element must lie in the identity component")]
    NotIdentityComponent,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

// ---------------------------------------------------------------- L-group

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LuElement {
    pub g: Matrix,
    pub coset: bool,
}

/// GL_n x| {1, c} with c.g = Phi g^-t Phi^-1.
#[derive(Debug, Clone)]
pub struct LuGroup {
    n: usize,
    phi: Matrix,
    phi_inv: Matrix,
}

impl LuGroup {
    pub fn new(field: &Field, n: usize) -> LuGroup {
        let phi = phi_matrix(field, n);
        let phi_inv = phi.inverse().expect("Phi is invertible");
        LuGroup { n, phi, phi_inv }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn act(&self, g: &Matrix) -> Matrix {
        self.phi.mul(&g.inverse().expect("invertible").transpose()).mul(&self.phi_inv)
    }

    pub fn mul(&self, x: &LuElement, y: &LuElement) -> LuElement {
        let gy = if x.coset { self.act(&y.g) } else { y.g.clone() };
        LuElement { g: x.g.mul(&gy), coset: x.coset ^ y.coset }
    }
}

// ---------------------------------------------------------------- C-group of U

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuElement {
    pub a: Matrix,
    pub b: Elem,
    pub coset: bool,
}

impl CuElement {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"a": self.a.to_json(), "b": self.b.to_string(), "coset": self.coset as u8})
    }

    pub fn from_json(field: &Field, v: &serde_json::Value) -> Result<CuElement, CgroupError> {
        let a = Matrix::from_json(field, &v["a"])?;
        let b = field.parse_elem(v["b"].as_str().ok_or(CgroupError::Mismatch)?)?;
        let coset = v["coset"].as_u64().ok_or(CgroupError::Mismatch)? == 1;
        Ok(CuElement { a, b, coset })
    }
}

/// The Galois action in canonical coordinates:
/// c.(a, b) = (Phi a^(a_exp, transposed) Phi^-1 * b^b_exp, b).
/// Derived by pushing the defining action through the coordinate change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransportedAction {
    pub inverse_transpose: bool,
    pub b_exponent: i64,
}

impl TransportedAction {
    /// Transports c.(g, mu) = (Phi g^-t Phi^-1, mu) through (g, mu) -> (g mu^(1-n), mu^2)
    /// on a test element over Q and reads off the exponent of b.
    pub fn derive(n: usize) -> TransportedAction {
        let q = Field::Rational;
        let phi = phi_matrix(&q, n);
        let phi_inv = phi.inverse().unwrap();
        let mu = q.from_int(2);
        // a generic unipotent g keeps the matrix part honest
        let g = Matrix::from_fn(&q, n, n, |i, j| if i == j { q.one() } else if j == i + 1 { q.from_int(3) } else { q.zero() });
        let theta = |g: &Matrix, mu: &Elem| (g.scale(&mu.pow(1 - n as i64).unwrap()), mu.mul(mu));
        let (a, b) = theta(&g, &mu);
        let acted_raw = phi.mul(&g.inverse().unwrap().transpose()).mul(&phi_inv);
        let (a2, b2) = theta(&acted_raw, &mu);
        assert_eq!(b2, b, "the action fixes mu");
        let base = phi.mul(&a.inverse().unwrap().transpose()).mul(&phi_inv);
        let span = 4 * n as i64 + 4;
        let b_exponent = (-span..=span)
            .find(|&k| base.scale(&b.pow(k).unwrap()) == a2)
            .expect("scalar discrepancy is a power of b");
        TransportedAction { inverse_transpose: true, b_exponent }
    }
}

#[derive(Debug, Clone)]
pub struct CuGroup {
    n: usize,
    field: Field,
    phi: Matrix,
    phi_inv: Matrix,
    action: TransportedAction,
}

impl CuGroup {
    pub fn new(field: &Field, n: usize) -> CuGroup {
        let phi = phi_matrix(field, n);
        let phi_inv = phi.inverse().expect("Phi is invertible");
        CuGroup { n, field: field.clone(), phi, phi_inv, action: TransportedAction::derive(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn phi(&self) -> &Matrix {
        &self.phi
    }
    pub fn phi_inv(&self) -> &Matrix {
        &self.phi_inv
    }
    pub fn action(&self) -> TransportedAction {
        self.action
    }

    /// Canonical coordinates of the class of (g, mu).
    pub fn from_raw(&self, g: &Matrix, mu: &Elem, coset: bool) -> Result<CuElement, CgroupError> {
        if g.rows() != self.n || g.cols() != self.n {
            return Err(CgroupError::Mismatch);
        }
        if !g.is_invertible() {
            return Err(CgroupError::Singular);
        }
        let mu_inv = mu.inv().ok_or(CgroupError::ZeroScalar)?;
        let a = g.scale(&mu_inv.pow(self.n as i64 - 1).unwrap());
        Ok(CuElement { a, b: mu.mul(mu), coset })
    }

    /// The raw lifts (g, mu) of x, when b has square roots in the field.
    pub fn raw_lifts(&self, x: &CuElement) -> Result<[(Matrix, Elem); 2], CgroupError> {
        let mu = field_sqrt(&x.b)?;
        let g = x.a.scale(&mu.pow(self.n as i64 - 1).unwrap());
        let sign = if self.n % 2 == 0 { self.field.from_int(-1) } else { self.field.one() };
        Ok([(g.clone(), mu.clone()), (g.scale(&sign), mu.neg())])
    }

    pub fn identity(&self) -> CuElement {
        CuElement { a: Matrix::identity(&self.field, self.n), b: self.field.one(), coset: false }
    }

    /// (I, 1)c
    pub fn c(&self) -> CuElement {
        CuElement { coset: true, ..self.identity() }
    }

    pub fn act(&self, a: &Matrix, b: &Elem) -> (Matrix, Elem) {
        let ai = a.inverse().expect("invertible");
        let core = if self.action.inverse_transpose { ai.transpose() } else { ai };
        let s = b.pow(self.action.b_exponent).expect("unit");
        (self.phi.mul(&core).mul(&self.phi_inv).scale(&s), b.clone())
    }

    pub fn mul(&self, x: &CuElement, y: &CuElement) -> CuElement {
        let (ay, by) = if x.coset { self.act(&y.a, &y.b) } else { (y.a.clone(), y.b.clone()) };
        CuElement { a: x.a.mul(&ay), b: x.b.mul(&by), coset: x.coset ^ y.coset }
    }

    pub fn inv(&self, x: &CuElement) -> CuElement {
        let ai = x.a.inverse().expect("invertible");
        let bi = x.b.inv().expect("unit");
        if x.coset {
            let (a, b) = self.act(&ai, &bi);
            CuElement { a, b, coset: true }
        } else {
            CuElement { a: ai, b: bi, coset: false }
        }
    }

    pub fn pow(&self, x: &CuElement, k: usize) -> CuElement {
        (0..k).fold(self.identity(), |acc, _| self.mul(&acc, x))
    }

    pub fn d_map(&self, x: &CuElement) -> Elem {
        x.b.clone()
    }

    /// h x h^-1 for h in the identity component.
    pub fn conjugate(&self, h: &CuElement, x: &CuElement) -> Result<CuElement, CgroupError> {
        if h.coset {
            return Err(CgroupError::NotIdentityComponent);
        }
        Ok(self.mul(&self.mul(h, x), &self.inv(h)))
    }

    /// The c-coset part in the form Y = a Phi, on which identity-component
    /// conjugation by (k, beta) acts as Y -> beta^(n-1) k Y k^t.
    pub fn y_form(&self, x: &CuElement) -> Matrix {
        x.a.mul(&self.phi)
    }
}

// ---------------------------------------------------------------- C-group of GU

/// How c acts on the GL_1 factor lambda.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GuAction {
    /// (g, l, m) -> (Phi g^-t Phi^-1, det(g) l, m)
    #[default]
    Standard,
    /// lambda untouched
    NoTwist,
    /// (g, l, m) -> (Phi g^-t Phi^-1, det(g)^-1 l, m)
    InverseDet,
}

impl std::str::FromStr for GuAction {
    type Err = String;
    fn from_str(s: &str) -> Result<GuAction, String> {
        match s {
            "standard" => Ok(GuAction::Standard),
            "no-twist" => Ok(GuAction::NoTwist),
            "inverse-det" => Ok(GuAction::InverseDet),
            _ => Err(format!("unknown action '{s}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CguElement {
    pub g: Matrix,
    pub lambda: Elem,
    pub mu: Elem,
    pub coset: bool,
}

impl CguElement {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "g": self.g.to_json(),
            "lambda": self.lambda.to_string(),
            "mu": self.mu.to_string(),
            "coset": self.coset as u8,
        })
    }
}

/// ((GL_n x GL_1 x GL_1) / ((-I)^(n-1), 1, -1)) x| {1, c}.
#[derive(Debug, Clone)]
pub struct CguGroup {
    n: usize,
    field: Field,
    phi: Matrix,
    phi_inv: Matrix,
    action: GuAction,
}

impl CguGroup {
    pub fn new(field: &Field, n: usize, action: GuAction) -> CguGroup {
        let phi = phi_matrix(field, n);
        let phi_inv = phi.inverse().expect("Phi is invertible");
        CguGroup { n, field: field.clone(), phi, phi_inv, action }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn phi(&self) -> &Matrix {
        &self.phi
    }
    pub fn phi_inv(&self) -> &Matrix {
        &self.phi_inv
    }
    pub fn action(&self) -> GuAction {
        self.action
    }

    /// Picks the lift whose mu serializes lexicographically smaller.
    pub fn canonical(&self, g: Matrix, lambda: Elem, mu: Elem, coset: bool) -> CguElement {
        let other = mu.neg();
        if other.to_string() < mu.to_string() {
            let g = if self.n % 2 == 0 { g.neg() } else { g };
            CguElement { g, lambda, mu: other, coset }
        } else {
            CguElement { g, lambda, mu, coset }
        }
    }

    pub fn element(&self, g: &Matrix, lambda: &Elem, mu: &Elem, coset: bool) -> Result<CguElement, CgroupError> {
        if g.rows() != self.n || g.cols() != self.n {
            return Err(CgroupError::Mismatch);
        }
        if !g.is_invertible() {
            return Err(CgroupError::Singular);
        }
        if lambda.is_zero() || mu.is_zero() {
            return Err(CgroupError::ZeroScalar);
        }
        Ok(self.canonical(g.clone(), lambda.clone(), mu.clone(), coset))
    }

    pub fn identity(&self) -> CguElement {
        let f = &self.field;
        self.canonical(Matrix::identity(f, self.n), f.one(), f.one(), false)
    }

    pub fn act(&self, g: &Matrix, lambda: &Elem, mu: &Elem) -> (Matrix, Elem, Elem) {
        let gi = g.inverse().expect("invertible");
        let det = g.det().expect("square");
        let l = match self.action {
            GuAction::Standard => det.mul(lambda),
            GuAction::NoTwist => lambda.clone(),
            GuAction::InverseDet => lambda.div(&det).expect("unit"),
        };
        (self.phi.mul(&gi.transpose()).mul(&self.phi_inv), l, mu.clone())
    }

    pub fn mul(&self, x: &CguElement, y: &CguElement) -> CguElement {
        let (g, l, m) = if x.coset { self.act(&y.g, &y.lambda, &y.mu) } else { (y.g.clone(), y.lambda.clone(), y.mu.clone()) };
        self.canonical(x.g.mul(&g), x.lambda.mul(&l), x.mu.mul(&m), x.coset ^ y.coset)
    }

    pub fn inv(&self, x: &CguElement) -> CguElement {
        let gi = x.g.inverse().expect("invertible");
        let li = x.lambda.inv().expect("unit");
        let mi = x.mu.inv().expect("unit");
        if x.coset {
            let (g, l, m) = self.act(&gi, &li, &mi);
            self.canonical(g, l, m, true)
        } else {
            self.canonical(gi, li, mi, false)
        }
    }

    pub fn pow(&self, x: &CguElement, k: usize) -> CguElement {
        (0..k).fold(self.identity(), |acc, _| self.mul(&acc, x))
    }

    pub fn conjugate(&self, h: &CguElement, x: &CguElement) -> Result<CguElement, CgroupError> {
        if h.coset {
            return Err(CgroupError::NotIdentityComponent);
        }
        Ok(self.mul(&self.mul(h, x), &self.inv(h)))
    }

    /// Y = g Phi for c-coset elements.
    pub fn y_form(&self, x: &CguElement) -> Matrix {
        x.g.mul(&self.phi)
    }
}
