//! Finite stand-ins for a Galois group with an index-two subgroup.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use crate::field::{Elem, Field};
use crate::matrix::{Matrix, MatrixError};

pub const MAX_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GaloisError {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid representation: {0}")]
    InvalidRep(String),
    #[error("invalid character: {0}")]
    InvalidCharacter(String),
    #[error("characteristic {p} divides the order {order}")]
    NotMaschke { p: u64, order: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("json: {0}")]
    Json(String),
}

/// A finite group Gamma with index-two subgroup Gamma0 and a chosen c~ outside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisModel {
    order: usize,
    mult: Vec<Vec<usize>>,
    in_gamma0: Vec<bool>,
    c_tilde: usize,
    identity: usize,
    inverse: Vec<usize>,
}

#[derive(Deserialize)]
struct GroupFile {
    order: usize,
    mult: Vec<Vec<usize>>,
    gamma0: serde_json::Value,
    c_tilde: usize,
}

impl GaloisModel {
    pub fn new(mult: Vec<Vec<usize>>, in_gamma0: Vec<bool>, c_tilde: usize) -> Result<GaloisModel, GaloisError> {
        let bad = |m: String| GaloisError::InvalidGroup(m);
        let order = mult.len();
        if order == 0 || order > MAX_ORDER {
            return Err(bad(format!("order {order} outside 1..={MAX_ORDER}")));
        }
        if mult.iter().any(|r| r.len() != order || r.iter().any(|&x| x >= order)) {
            return Err(bad("table is not a square table of element indices".into()));
        }
        if in_gamma0.len() != order {
            return Err(bad("gamma0 membership has wrong length".into()));
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if mult[mult[a][b]][c] != mult[a][mult[b][c]] {
                        return Err(bad(format!("associativity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| mult[e][x] == x && mult[x][e] == x))
            .ok_or_else(|| bad("no identity".into()))?;
        let mut inverse = vec![0; order];
        for x in 0..order {
            inverse[x] = (0..order)
                .find(|&y| mult[x][y] == identity && mult[y][x] == identity)
                .ok_or_else(|| bad(format!("element {x} has no inverse")))?;
        }
        let g0: Vec<usize> = (0..order).filter(|&x| in_gamma0[x]).collect();
        if 2 * g0.len() != order {
            return Err(bad("gamma0 does not have index 2".into()));
        }
        if !in_gamma0[identity] || g0.iter().any(|&a| g0.iter().any(|&b| !in_gamma0[mult[a][b]])) {
            return Err(bad("gamma0 is not a subgroup".into()));
        }
        if c_tilde >= order || in_gamma0[c_tilde] {
            return Err(bad("c_tilde must lie outside gamma0".into()));
        }
        for a in 0..order {
            for b in 0..order {
                if in_gamma0[mult[a][b]] != (in_gamma0[a] == in_gamma0[b]) {
                    return Err(bad("coset map is not a homomorphism".into()));
                }
            }
        }
        Ok(GaloisModel { order, mult, in_gamma0, c_tilde, identity, inverse })
    }

    pub fn from_json(text: &str) -> Result<GaloisModel, GaloisError> {
        let f: GroupFile = serde_json::from_str(text).map_err(|e| GaloisError::Json(e.to_string()))?;
        if f.order != f.mult.len() {
            return Err(GaloisError::InvalidGroup("order disagrees with table".into()));
        }
        let in_gamma0 = match &f.gamma0 {
            serde_json::Value::Array(items) if items.iter().all(|v| v.is_boolean()) => {
                items.iter().map(|v| v.as_bool().unwrap()).collect()
            }
            serde_json::Value::Array(items) => {
                let mut m = vec![false; f.order];
                for v in items {
                    let i = v.as_u64().ok_or_else(|| GaloisError::Json("gamma0 entries".into()))? as usize;
                    if i >= f.order {
                        return Err(GaloisError::InvalidGroup("gamma0 index out of range".into()));
                    }
                    m[i] = true;
                }
                m
            }
            _ => return Err(GaloisError::Json("gamma0 must be an array".into())),
        };
        GaloisModel::new(f.mult, in_gamma0, f.c_tilde)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "order": self.order,
            "mult": self.mult,
            "gamma0": self.gamma0(),
            "c_tilde": self.c_tilde,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }
    pub fn identity(&self) -> usize {
        self.identity
    }
    pub fn c_tilde(&self) -> usize {
        self.c_tilde
    }
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }
    pub fn in_gamma0(&self, a: usize) -> bool {
        self.in_gamma0[a]
    }
    pub fn gamma0(&self) -> Vec<usize> {
        (0..self.order).filter(|&x| self.in_gamma0[x]).collect()
    }
    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// c~ g c~^-1
    pub fn conj_c(&self, g: usize) -> usize {
        self.mul(self.mul(self.c_tilde, g), self.inverse[self.c_tilde])
    }

    pub fn pow(&self, g: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, g))
    }

    pub fn element_order(&self, g: usize) -> usize {
        (1..=self.order).find(|&k| self.pow(g, k) == self.identity).unwrap()
    }

    pub fn exponent(&self) -> usize {
        self.elements().map(|g| self.element_order(g)).fold(1, num_integer::lcm)
    }

    /// A generating set chosen greedily by index.
    pub fn generators_of(&self, subset: &[usize]) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![self.identity];
        for &g in subset {
            if span.contains(&g) {
                continue;
            }
            gens.push(g);
            span = self.closure(&gens);
        }
        gens
    }

    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[self.identity] = true;
        let mut out = vec![self.identity];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// Reduces the coset of g: (a, b) with g = c~^b * a, a in Gamma0.
    pub fn split(&self, g: usize) -> (usize, bool) {
        if self.in_gamma0[g] {
            (g, false)
        } else {
            (self.mul(self.inverse[self.c_tilde], g), true)
        }
    }
}

fn parse_matrix_map(field: &Field, text: &str) -> Result<BTreeMap<usize, Matrix>, GaloisError> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| GaloisError::Json(e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| GaloisError::Json("expected an object".into()))?;
    let mut out = BTreeMap::new();
    for (k, m) in obj {
        let idx: usize = k.parse().map_err(|_| GaloisError::Json(format!("bad key {k}")))?;
        out.insert(idx, Matrix::from_json(field, m)?);
    }
    Ok(out)
}

/// A representation of Gamma0, stored on every element of Gamma0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rep {
    model: Arc<GaloisModel>,
    dim: usize,
    images: Vec<Option<Matrix>>,
}

impl Rep {
    pub fn new(model: &Arc<GaloisModel>, images: BTreeMap<usize, Matrix>) -> Result<Rep, GaloisError> {
        let bad = |m: String| GaloisError::InvalidRep(m);
        let mut imgs = vec![None; model.order()];
        for (k, m) in images {
            if k >= model.order() || !model.in_gamma0(k) {
                return Err(bad(format!("element {k} is not in gamma0")));
            }
            imgs[k] = Some(m);
        }
        let g0 = model.gamma0();
        if g0.iter().any(|&g| imgs[g].is_none()) {
            return Err(bad("missing images".into()));
        }
        let dim = imgs[model.identity()].as_ref().unwrap().rows();
        let rep = Rep { model: model.clone(), dim, images: imgs };
        rep.validate()?;
        Ok(rep)
    }

    /// Closes generator images into a full table; the result is validated.
    pub fn from_generators(model: &Arc<GaloisModel>, gens: &[(usize, Matrix)]) -> Result<Rep, GaloisError> {
        let field = gens[0].1.field().clone();
        let dim = gens[0].1.rows();
        let mut images: Vec<Option<Matrix>> = vec![None; model.order()];
        images[model.identity()] = Some(Matrix::identity(&field, dim));
        let mut queue = vec![model.identity()];
        while let Some(x) = queue.pop() {
            for (g, m) in gens {
                let y = model.mul(x, *g);
                let img = images[x].as_ref().unwrap().mul(m);
                match &images[y] {
                    None => {
                        images[y] = Some(img);
                        queue.push(y);
                    }
                    Some(prev) if *prev != img => {
                        return Err(GaloisError::InvalidRep(format!("generator images violate a relation at {y}")))
                    }
                    _ => {}
                }
            }
        }
        let map = images.into_iter().enumerate().filter_map(|(k, m)| m.map(|m| (k, m))).collect();
        Rep::new(model, map)
    }

    pub fn from_json(model: &Arc<GaloisModel>, field: &Field, text: &str) -> Result<Rep, GaloisError> {
        Rep::new(model, parse_matrix_map(field, text)?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        for g in self.model.gamma0() {
            obj.insert(g.to_string(), self.image(g).to_json());
        }
        serde_json::Value::Object(obj)
    }

    fn validate(&self) -> Result<(), GaloisError> {
        let g0 = self.model.gamma0();
        for &g in &g0 {
            let m = self.image(g);
            if m.rows() != self.dim || m.cols() != self.dim {
                return Err(GaloisError::InvalidRep(format!("image of {g} has wrong shape")));
            }
        }
        if !self.image(self.model.identity()).is_identity() {
            return Err(GaloisError::InvalidRep("identity does not map to I".into()));
        }
        for &a in &g0 {
            for &b in &g0 {
                if self.image(a).mul(self.image(b)) != *self.image(self.model.mul(a, b)) {
                    return Err(GaloisError::InvalidRep(format!("not multiplicative at ({a},{b})")));
                }
            }
        }
        Ok(())
    }

    pub fn model(&self) -> &Arc<GaloisModel> {
        &self.model
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn field(&self) -> &Field {
        self.image(self.model.identity()).field()
    }

    /// Image of a Gamma0 element.
    pub fn image(&self, g: usize) -> &Matrix {
        self.images[g].as_ref().expect("element of gamma0")
    }

    pub fn images(&self) -> Vec<Matrix> {
        self.model.gamma0().into_iter().map(|g| self.image(g).clone()).collect()
    }

    fn map_images(&self, f: impl Fn(usize, &Matrix) -> Matrix) -> Rep {
        let images = self
            .images
            .iter()
            .enumerate()
            .map(|(g, m)| m.as_ref().map(|m| f(g, m)))
            .collect::<Vec<_>>();
        let dim = images[self.model.identity()].as_ref().unwrap().rows();
        Rep { model: self.model.clone(), dim, images }
    }

    /// g -> rho(c~ g c~^-1)
    pub fn conjugate_rep(&self) -> Rep {
        self.map_images(|g, _| self.image(self.model.conj_c(g)).clone())
    }

    /// g -> rho(g)^-t
    pub fn dual_rep(&self) -> Rep {
        self.map_images(|_, m| m.inverse().expect("invertible image").transpose())
    }

    pub fn twist(&self, chi: &CharacterTable) -> Rep {
        self.twist_by(chi.values())
    }

    /// Twist by values indexed by element; only Gamma0 entries are read.
    pub fn twist_by(&self, chi0: &[Elem]) -> Rep {
        self.map_images(|g, m| m.scale(&chi0[g]))
    }

    /// S rho S^-1
    pub fn conjugate_by(&self, s: &Matrix) -> Rep {
        let si = s.inverse().expect("invertible change of basis");
        self.map_images(|_, m| s.mul(m).mul(&si))
    }

    pub fn direct_sum(&self, o: &Rep) -> Rep {
        self.map_images(|g, m| Matrix::block_diag(&[m, o.image(g)]))
    }

    pub fn trivial(model: &Arc<GaloisModel>, field: &Field, dim: usize) -> Rep {
        let images = (0..model.order())
            .map(|g| model.in_gamma0(g).then(|| Matrix::identity(field, dim)))
            .collect();
        Rep { model: model.clone(), dim, images }
    }

    /// One-dimensional representation from a character restricted to Gamma0.
    pub fn from_character(chi: &CharacterTable) -> Rep {
        let model = chi.model.clone();
        let field = chi.field();
        let images = (0..model.order())
            .map(|g| model.in_gamma0(g).then(|| Matrix::scalar(&field, 1, chi.value(g))))
            .collect();
        Rep { model, dim: 1, images }
    }

    /// True in the Maschke regime; an error outside it.
    pub fn is_semisimple(&self) -> Result<bool, GaloisError> {
        let p = self.field().characteristic();
        let order = self.model.order() / 2;
        if p != 0 && order as u64 % p == 0 {
            return Err(GaloisError::NotMaschke { p, order });
        }
        Ok(true)
    }
}

/// A character of all of Gamma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    model: Arc<GaloisModel>,
    values: Vec<Elem>,
}

impl CharacterTable {
    pub fn new(model: &Arc<GaloisModel>, values: Vec<Elem>) -> Result<CharacterTable, GaloisError> {
        let bad = |m: String| GaloisError::InvalidCharacter(m);
        if values.len() != model.order() {
            return Err(bad("wrong number of values".into()));
        }
        if values.iter().any(|v| !v.is_unit()) {
            return Err(bad("values must be units".into()));
        }
        for a in model.elements() {
            for b in model.elements() {
                if values[a].mul(&values[b]) != values[model.mul(a, b)] {
                    return Err(bad(format!("not multiplicative at ({a},{b})")));
                }
            }
        }
        Ok(CharacterTable { model: model.clone(), values })
    }

    pub fn from_json(model: &Arc<GaloisModel>, field: &Field, text: &str) -> Result<CharacterTable, GaloisError> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| GaloisError::Json(e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| GaloisError::Json("expected an object".into()))?;
        let mut values = vec![field.one(); model.order()];
        for (k, x) in obj {
            let idx: usize = k.parse().map_err(|_| GaloisError::Json(format!("bad key {k}")))?;
            let s = x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string());
            if idx >= values.len() {
                return Err(GaloisError::Json(format!("key {idx} out of range")));
            }
            values[idx] = field.parse_elem(&s).map_err(MatrixError::from)?;
        }
        CharacterTable::new(model, values)
    }

    pub fn trivial(model: &Arc<GaloisModel>, field: &Field) -> CharacterTable {
        CharacterTable { model: model.clone(), values: vec![field.one(); model.order()] }
    }

    /// Trivial on Gamma0 and -1 off it; the surrogate for the cyclotomic character.
    pub fn sign(model: &Arc<GaloisModel>, field: &Field) -> CharacterTable {
        let values = model.elements().map(|g| if model.in_gamma0(g) { field.one() } else { field.from_int(-1) }).collect();
        CharacterTable { model: model.clone(), values }
    }

    pub fn model(&self) -> &Arc<GaloisModel> {
        &self.model
    }
    pub fn field(&self) -> Field {
        self.values[0].field()
    }
    pub fn value(&self, g: usize) -> &Elem {
        &self.values[g]
    }
    pub fn values(&self) -> &[Elem] {
        &self.values
    }

    pub fn mul(&self, o: &CharacterTable) -> CharacterTable {
        CharacterTable { model: self.model.clone(), values: self.values.iter().zip(&o.values).map(|(a, b)| a.mul(b)).collect() }
    }

    pub fn pow(&self, k: i64) -> CharacterTable {
        CharacterTable { model: self.model.clone(), values: self.values.iter().map(|v| v.pow(k).expect("unit")).collect() }
    }

    /// chi(c~ g c~^-1) = chi(g) on Gamma0.
    pub fn is_conjugation_stable(&self) -> bool {
        self.model.gamma0().into_iter().all(|g| self.values[self.model.conj_c(g)] == self.values[g])
    }

    /// All extensions to Gamma of a character given on Gamma0 (values off
    /// Gamma0 ignored), each determined by a choice of chi(c~).
    pub fn extensions(model: &Arc<GaloisModel>, restricted: &[Elem]) -> Vec<CharacterTable> {
        let c = model.c_tilde();
        let c2 = model.mul(c, c);
        let mut out = Vec::new();
        for x in crate::field::field_roots(&restricted[c2], 2) {
            let values: Vec<Elem> = model
                .elements()
                .map(|g| {
                    let (a, off) = model.split(g);
                    if off {
                        x.mul(&restricted[a])
                    } else {
                        restricted[a].clone()
                    }
                })
                .collect();
            if let Ok(t) = CharacterTable::new(model, values) {
                out.push(t);
            }
        }
        out.sort_by(|a, b| a.values[c].canonical_cmp(&b.values[c]));
        out
    }

    /// Every character of Gamma (or of Gamma0 when `gamma0_only`, with value 1
    /// placed off Gamma0) with values among the roots of unity of the field.
    pub fn enumerate(model: &Arc<GaloisModel>, field: &Field, gamma0_only: bool) -> Vec<Vec<Elem>> {
        let domain: Vec<usize> = if gamma0_only { model.gamma0() } else { model.elements().collect() };
        let gens = model.generators_of(&domain);
        let e = model.exponent() as u64;
        let roots: Vec<Elem> = (0..e as i64).filter_map(|k| field.root_of_unity(e, k)).collect();
        let roots = if roots.is_empty() {
            // fall back to the roots of unity actually present
            let mut r: Vec<Elem> = Vec::new();
            for d in 1..=e {
                if e % d == 0 {
                    for k in 0..d as i64 {
                        if let Some(z) = field.root_of_unity(d, k) {
                            if !r.contains(&z) {
                                r.push(z);
                            }
                        }
                    }
                }
            }
            r
        } else {
            roots
        };
        let mut out = Vec::new();
        let mut choice = vec![0usize; gens.len()];
        loop {
            let mut vals: Vec<Option<Elem>> = vec![None; model.order()];
            vals[model.identity()] = Some(field.one());
            let mut queue = vec![model.identity()];
            let mut ok = true;
            'close: while let Some(x) = queue.pop() {
                for (gi, &g) in gens.iter().enumerate() {
                    let y = model.mul(x, g);
                    let v = vals[x].as_ref().unwrap().mul(&roots[choice[gi]]);
                    match &vals[y] {
                        None => {
                            vals[y] = Some(v);
                            queue.push(y);
                        }
                        Some(p) if *p != v => {
                            ok = false;
                            break 'close;
                        }
                        _ => {}
                    }
                }
            }
            if ok {
                let full: Vec<Elem> = vals.into_iter().map(|v| v.unwrap_or_else(|| field.one())).collect();
                let mult_ok = domain.iter().all(|&a| domain.iter().all(|&b| full[a].mul(&full[b]) == full[model.mul(a, b)]));
                if mult_ok {
                    out.push(full);
                }
            }
            // odometer
            let mut k = 0;
            loop {
                if k == choice.len() {
                    return out;
                }
                choice[k] += 1;
                if choice[k] < roots.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }
}

/// Bundled fixture files.
pub mod fixtures {
    use std::sync::Arc;

    use super::{GaloisError, GaloisModel, Rep};
    use crate::field::Field;

    pub const D4: &str = include_str!("../fixtures/d4.json");
    pub const D4_REP: &str = include_str!("../fixtures/d4rep.json");
    pub const Q8Z2: &str = include_str!("../fixtures/q8z2.json");
    pub const Q8Z2_REP: &str = include_str!("../fixtures/q8z2rep.json");
    pub const Z4Z4Z2: &str = include_str!("../fixtures/z4z4z2.json");
    pub const Z4Z4Z2_REP: &str = include_str!("../fixtures/z4z4z2rep.json");

    pub const NAMES: [&str; 3] = ["d4", "q8z2", "z4z4z2"];

    /// (group json, rep json) by name.
    pub fn source(name: &str) -> Option<(&'static str, &'static str)> {
        match name {
            "d4" => Some((D4, D4_REP)),
            "q8z2" => Some((Q8Z2, Q8Z2_REP)),
            "z4z4z2" => Some((Z4Z4Z2, Z4Z4Z2_REP)),
            _ => None,
        }
    }

    /// Loads a bundled model and its representation into `field`.
    pub fn load(name: &str, field: &Field) -> Result<(Arc<GaloisModel>, Rep), GaloisError> {
        let (g, r) = source(name).ok_or_else(|| GaloisError::Json(format!("no fixture named {name}")))?;
        let model = Arc::new(GaloisModel::from_json(g)?);
        let rep = Rep::from_json(&model, field, r)?;
        Ok((model, rep))
    }
}
