//! Root datum of U(a, b), twisting elements and archimedean parameters.
//!
//! Half-integers are stored doubled throughout.

use std::collections::BTreeMap;

use crate::cgroup::{CgroupError, CuElement, CuGroup};
use crate::field::{field_sqrt, Elem};
use crate::matrix::Matrix;

/// X* = Z^n with simple roots E_i - E_(i+1), the standard cocharacters and
/// c acting by (a_1, ..., a_n) -> (-a_n, ..., -a_1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootDatum {
    pub n: usize,
}

impl RootDatum {
    pub fn new(n: usize) -> RootDatum {
        assert!(n >= 1);
        RootDatum { n }
    }

    pub fn simple_roots(&self) -> Vec<Vec<i64>> {
        (0..self.n.saturating_sub(1))
            .map(|i| (0..self.n).map(|j| if j == i { 1 } else if j == i + 1 { -1 } else { 0 }).collect())
            .collect()
    }

    /// Same vectors, read in X_*.
    pub fn simple_coroots(&self) -> Vec<Vec<i64>> {
        self.simple_roots()
    }

    pub fn pairing(x: &[i64], y: &[i64]) -> i64 {
        x.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    pub fn galois(&self, x: &[i64]) -> Vec<i64> {
        x.iter().rev().map(|v| -v).collect()
    }
}

/// Doubled half-sum of positive roots: (n-1, n-3, ..., 1-n).
pub fn half_sum_positive_roots(n: usize) -> Vec<i64> {
    (1..=n as i64).map(|i| n as i64 + 1 - 2 * i).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Twisting {
    /// An integral Galois-stable theta with <theta, coroot> = 1.
    Exists(Vec<i64>),
    /// The constraints force theta_1 = doubled_first / 2, which is not an integer.
    NoneExists { doubled_first: i64 },
}

/// theta - theta shifted = 1 along coroots gives theta = (t, t-1, ..., t-n+1);
/// Galois stability then forces 2t = n - 1.
pub fn twisting_element(n: usize) -> Twisting {
    let doubled_first = n as i64 - 1;
    if doubled_first % 2 != 0 {
        return Twisting::NoneExists { doubled_first };
    }
    let t = doubled_first / 2;
    Twisting::Exists((0..n as i64).map(|i| t - i).collect())
}

/// The class of (diag(z^((n-1)/2), ..., z^((1-n)/2)), z^(1/2)) for the chosen
/// branch of the square root. Both branches give the same element.
pub fn twisting_cocharacter(g: &CuGroup, z: &Elem, positive_branch: bool) -> Result<CuElement, CgroupError> {
    let s = field_sqrt(z)?;
    let s = if positive_branch { s } else { s.neg() };
    let d: Vec<Elem> = half_sum_positive_roots(g.n()).iter().map(|&e| s.pow(e).expect("unit")).collect();
    g.from_raw(&Matrix::diag(g.field(), &d), &s, false)
}

/// Exponents a_i of an archimedean parameter, doubled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchParam {
    pub doubled: Vec<i64>,
}

impl ArchParam {
    pub fn n(&self) -> usize {
        self.doubled.len()
    }

    pub fn from_halves(doubled: &[i64]) -> ArchParam {
        ArchParam { doubled: doubled.to_vec() }
    }

    pub fn multiplicities(&self) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for &a in &self.doubled {
            *m.entry(a).or_insert(0) += 1;
        }
        m
    }
}

impl std::str::FromStr for ArchParam {
    type Err = String;
    /// "a1,a2,..." with halves written "p/2".
    fn from_str(s: &str) -> Result<ArchParam, String> {
        let mut doubled = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let v = match part.split_once('/') {
                Some((p, "2")) => p.trim().parse::<i64>().map_err(|e| e.to_string())?,
                Some(_) => return Err(format!("'{part}' is not a half-integer")),
                None => 2 * part.parse::<i64>().map_err(|e| e.to_string())?,
            };
            doubled.push(v);
        }
        if doubled.is_empty() {
            return Err("empty parameter".into());
        }
        Ok(ArchParam { doubled })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algebraicity {
    L,
    C,
    Both,
    Neither,
}

pub fn classify_algebraicity(p: &ArchParam) -> Algebraicity {
    let n = p.n() as i64;
    let l = p.doubled.iter().all(|a| a.rem_euclid(2) == 0);
    let c = p.doubled.iter().all(|a| (a - (n - 1)).rem_euclid(2) == 0);
    match (l, c) {
        (true, true) => Algebraicity::Both,
        (true, false) => Algebraicity::L,
        (false, true) => Algebraicity::C,
        (false, false) => Algebraicity::Neither,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetryOptions {
    pub symmetric_possible: bool,
    pub antisymmetric_possible: bool,
}

/// A commuting with r(z) is supported on the blocks of equal exponents; an
/// invertible antisymmetric block needs even size.
pub fn pairing_symmetry_options(p: &ArchParam) -> SymmetryOptions {
    SymmetryOptions { symmetric_possible: true, antisymmetric_possible: p.multiplicities().values().all(|m| m % 2 == 0) }
}

pub fn is_nondegenerate_lds_shape(p: &ArchParam) -> bool {
    p.multiplicities().values().all(|&m| m <= 2)
}

/// r(z) = diag((z / zbar)^(a_i)) restricted to roots of unity, together with
/// r(j) = (A Phi^-1) c.
#[derive(Debug, Clone)]
pub struct WeilParamR {
    pub param: ArchParam,
    pub a: Matrix,
}

impl WeilParamR {
    /// Checks j z j^-1 = zbar at every N-th root of unity of the field.
    pub fn new(param: ArchParam, a: Matrix, samples: u64) -> Result<WeilParamR, String> {
        if a.rows() != param.n() || !a.is_invertible() {
            return Err("A must be invertible of size n".into());
        }
        let w = WeilParamR { param, a };
        for k in 0..samples as i64 {
            let z = match w.a.field().root_of_unity(samples, k) {
                Some(z) => z,
                None => return Err(format!("field lacks {samples}-th roots of unity")),
            };
            let rz = w.r_of(&z);
            // (A Phi^-1) c . r(z) . ((A Phi^-1) c)^-1 = A r(z)^-1 A^-1 in the L-group
            let lhs = w.a.mul(&rz.inverse().unwrap()).mul(&w.a.inverse().unwrap());
            let zbar = z.inv().unwrap();
            if lhs != w.r_of(&zbar) {
                return Err(format!("j z j^-1 != zbar at z = zeta^{k}"));
            }
        }
        Ok(w)
    }

    /// On the unit circle (z / zbar)^(a_i) = z^(2 a_i).
    pub fn r_of(&self, z: &Elem) -> Matrix {
        let d: Vec<Elem> = self.param.doubled.iter().map(|&e| z.pow(e).expect("unit")).collect();
        Matrix::diag(self.a.field(), &d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcedSymmetry {
    /// A = A^t
    Symmetric,
    /// A = (-1)^(n-1) A^t
    SignedBy(i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeilCheck {
    pub consistent: bool,
    pub forced: ForcedSymmetry,
    pub detail: String,
}

/// Compares r(j^2) = A A^-t (-1)^(n-1) with r(-1) = diag((-1)^(2 a_i)).
pub fn weil_square_check(w: &WeilParamR, alg: Algebraicity) -> WeilCheck {
    let n = w.param.n();
    let f = w.a.field().clone();
    let sign = if n % 2 == 1 { f.one() } else { f.from_int(-1) };
    let lhs = w.a.mul(&w.a.inverse().expect("invertible").transpose()).scale(&sign);
    let d: Vec<Elem> = w.param.doubled.iter().map(|&e| if e.rem_euclid(2) == 0 { f.one() } else { f.from_int(-1) }).collect();
    let rhs = Matrix::diag(&f, &d);
    let consistent = lhs == rhs;
    let forced = match alg {
        Algebraicity::C | Algebraicity::Both => ForcedSymmetry::Symmetric,
        _ => ForcedSymmetry::SignedBy(if n % 2 == 1 { 1 } else { -1 }),
    };
    let detail = if consistent { "r(j)^2 = r(-1)".to_string() } else { format!("A A^-t (-1)^(n-1) = {lhs} but r(-1) = {rhs}") };
    WeilCheck { consistent, forced, detail }
}

/// Whether A meets the symmetry type.
pub fn satisfies(a: &Matrix, forced: ForcedSymmetry) -> bool {
    match forced {
        ForcedSymmetry::Symmetric => a.is_symmetric(),
        ForcedSymmetry::SignedBy(1) => a.is_symmetric(),
        ForcedSymmetry::SignedBy(_) => a.is_antisymmetric(),
    }
}
