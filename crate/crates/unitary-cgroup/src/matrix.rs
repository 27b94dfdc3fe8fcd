//! Dense exact matrices over a [`Field`].

use std::fmt;

use crate::field::{field_sqrt, Elem, Field, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not antisymmetric")]
    NotAntisymmetric,
    #[error("odd dimension {0}")]
    OddDimension(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn from_vec(field: &Field, rows: usize, cols: usize, data: Vec<Elem>) -> Matrix {
        assert_eq!(data.len(), rows * cols, "entry count");
        Matrix { rows, cols, field: field.clone(), data }
    }

    pub fn from_fn(field: &Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, field: field.clone(), data }
    }

    pub fn from_ints(field: &Field, rows: &[&[i64]]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Matrix::from_fn(field, r, c, |i, j| field.from_int(rows[i][j]))
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(field, rows, cols, |_, _| field.zero())
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        Matrix::scalar(field, n, &field.one())
    }

    pub fn scalar(field: &Field, n: usize, s: &Elem) -> Matrix {
        Matrix::from_fn(field, n, n, |i, j| if i == j { s.clone() } else { field.zero() })
    }

    pub fn diag(field: &Field, d: &[Elem]) -> Matrix {
        Matrix::from_fn(field, d.len(), d.len(), |i, j| if i == j { d[i].clone() } else { field.zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Elem] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, f: impl Fn(&Elem) -> Elem) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, field: self.field.clone(), data: self.data.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert!(self.rows == o.rows && self.cols == o.cols, "shape mismatch in add");
        Matrix { data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(), ..self.clone() }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert!(self.rows == o.rows && self.cols == o.cols, "shape mismatch in sub");
        Matrix { data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(), ..self.clone() }
    }

    pub fn neg(&self) -> Matrix {
        self.map(|x| x.neg())
    }

    pub fn scale(&self, s: &Elem) -> Matrix {
        self.map(|x| x.mul(s))
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "shape mismatch in mul");
        let mut data = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = self.field.zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b));
                }
                data.push(acc);
            }
        }
        Matrix { rows: self.rows, cols: o.cols, field: self.field.clone(), data }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() }))
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn is_antisymmetric(&self) -> bool {
        *self == self.transpose().neg()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn trace(&self) -> Elem {
        (0..self.rows.min(self.cols)).fold(self.field.zero(), |acc, i| acc.add(self.get(i, i)))
    }

    /// Block diagonal sum.
    pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
        let field = blocks[0].field.clone();
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(&field, r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Assembles [[a, b], [c, d]] from equally shaped blocks.
    pub fn from_blocks(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
        let (r, s) = (a.rows, a.cols);
        Matrix::from_fn(&a.field, 2 * r, 2 * s, |i, j| match (i < r, j < s) {
            (true, true) => a.get(i, j).clone(),
            (true, false) => b.get(i, j - s).clone(),
            (false, true) => c.get(i - r, j).clone(),
            (false, false) => d.get(i - r, j - s).clone(),
        })
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(&self.field, rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Inverse by Gauss-Jordan with unit pivots, so it also works over Z/l^M.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(&self.field, n);
        for col in 0..n {
            let piv = (col..n).find(|&r| a.get(r, col).is_unit())?;
            a.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            let p = a.get(col, col).inv()?;
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..n {
                if r != col && !a.get(r, col).is_zero() {
                    let f = a.get(r, col).clone();
                    a.axpy_row(r, col, &f);
                    inv.axpy_row(r, col, &f);
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    fn scale_row(&mut self, i: usize, s: &Elem) {
        for k in 0..self.cols {
            let v = self.get(i, k).mul(s);
            self.set(i, k, v);
        }
    }

    // row_i -= f * row_j
    fn axpy_row(&mut self, i: usize, j: usize, f: &Elem) {
        for k in 0..self.cols {
            let t = self.get(j, k);
            if t.is_zero() {
                continue;
            }
            let v = self.get(i, k).sub(&f.mul(t));
            self.set(i, k, v);
        }
    }

    pub fn det(&self) -> Result<Elem, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        if !self.field.is_field() {
            return Ok(self.char_poly_coeffs()?.pop().unwrap_or_else(|| self.field.one()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = self.field.one();
        for col in 0..n {
            let piv = match (col..n).find(|&r| !a.get(r, col).is_zero()) {
                Some(p) => p,
                None => return Ok(self.field.zero()),
            };
            if piv != col {
                a.swap_rows(col, piv);
                det = det.neg();
            }
            let p = a.get(col, col).clone();
            det = det.mul(&p);
            let pinv = p.inv().expect("nonzero pivot");
            for r in col + 1..n {
                if !a.get(r, col).is_zero() {
                    let f = a.get(r, col).mul(&pinv);
                    a.axpy_row(r, col, &f);
                }
            }
        }
        Ok(det)
    }

    pub fn is_invertible(&self) -> bool {
        self.det().map(|d| d.is_unit()).unwrap_or(false)
    }

    /// (s_1, ..., s_n) with char(t) = t^n - s_1 t^(n-1) + ... + (-1)^n s_n,
    /// by the division-free Berkowitz recursion.
    pub fn char_poly_coeffs(&self) -> Result<Vec<Elem>, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let f = &self.field;
        let n = self.rows;
        let mut v = vec![f.one()];
        for r in 0..n {
            let a = self.get(r, r);
            // t_k for k = 0..=r+1: 1, -a, -R C, -R M C, ...
            let mut t = vec![f.one(), a.neg()];
            let mut col: Vec<Elem> = (0..r).map(|i| self.get(i, r).clone()).collect();
            for _ in 0..r {
                let rc = (0..r).fold(f.zero(), |acc, j| acc.add(&self.get(r, j).mul(&col[j])));
                t.push(rc.neg());
                col = (0..r)
                    .map(|i| (0..r).fold(f.zero(), |acc, j| acc.add(&self.get(i, j).mul(&col[j]))))
                    .collect();
            }
            let mut nv = Vec::with_capacity(r + 2);
            for i in 0..r + 2 {
                let mut acc = f.zero();
                for (j, vj) in v.iter().enumerate() {
                    if i >= j && i - j < t.len() {
                        acc = acc.add(&t[i - j].mul(vj));
                    }
                }
                nv.push(acc);
            }
            v = nv;
        }
        Ok(v
            .into_iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| if k % 2 == 1 { c.neg() } else { c })
            .collect())
    }

    /// Pfaffian by expansion along the first row over perfect matchings.
    pub fn pfaffian(&self) -> Result<Elem, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        if self.rows % 2 == 1 {
            return Err(MatrixError::OddDimension(self.rows));
        }
        if !self.is_antisymmetric() {
            return Err(MatrixError::NotAntisymmetric);
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        Ok(self.pf_rec(&idx))
    }

    fn pf_rec(&self, idx: &[usize]) -> Elem {
        if idx.is_empty() {
            return self.field.one();
        }
        let mut acc = self.field.zero();
        let first = idx[0];
        for k in 1..idx.len() {
            let a = self.get(first, idx[k]);
            if a.is_zero() {
                continue;
            }
            let rest: Vec<usize> = idx[1..].iter().enumerate().filter(|&(j, _)| j + 1 != k).map(|(_, &x)| x).collect();
            let term = a.mul(&self.pf_rec(&rest));
            acc = if k % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            (0..self.rows)
                .map(|i| serde_json::Value::Array((0..self.cols).map(|j| serde_json::Value::String(self.get(i, j).to_string())).collect()))
                .collect(),
        )
    }

    /// Reads a nested array of entry strings, mapping portable entries into `field`.
    pub fn from_json(field: &Field, v: &serde_json::Value) -> Result<Matrix, MatrixError> {
        let bad = |m: &str| MatrixError::DimensionMismatch(m.to_string());
        let rows = v.as_array().ok_or_else(|| bad("matrix must be an array"))?;
        let mut data = Vec::new();
        let mut cols = None;
        for r in rows {
            let r = r.as_array().ok_or_else(|| bad("row must be an array"))?;
            if *cols.get_or_insert(r.len()) != r.len() {
                return Err(bad("ragged rows"));
            }
            for e in r {
                let s = match e {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Number(n) => n.to_string(),
                    _ => return Err(bad("entry must be a string")),
                };
                data.push(field.parse_elem(&s)?);
            }
        }
        Ok(Matrix::from_vec(field, rows.len(), cols.unwrap_or(0), data))
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// The anti-diagonal matrix with entry (i, j) = (-1)^(i+1) when i = n-j+1 (1-based).
pub fn phi_matrix(field: &Field, n: usize) -> Matrix {
    Matrix::from_fn(field, n, n, |i, j| {
        if i + j == n - 1 {
            // 0-based i corresponds to 1-based i+1, so the sign is (-1)^i
            if i % 2 == 0 {
                field.one()
            } else {
                field.from_int(-1)
            }
        } else {
            field.zero()
        }
    })
}

// ---------------------------------------------------------------- linear systems

/// Incrementally maintained reduced row echelon form of a homogeneous system.
pub struct Rref {
    field: Field,
    nvars: usize,
    rows: Vec<(usize, Vec<Elem>)>,
}

impl Rref {
    pub fn new(field: &Field, nvars: usize) -> Rref {
        Rref { field: field.clone(), nvars, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds an equation; returns true when it raised the rank.
    pub fn push(&mut self, mut eq: Vec<Elem>) -> bool {
        assert_eq!(eq.len(), self.nvars);
        for (p, row) in &self.rows {
            if eq[*p].is_zero() {
                continue;
            }
            let f = eq[*p].clone();
            for (k, r) in row.iter().enumerate() {
                if !r.is_zero() {
                    eq[k] = eq[k].sub(&f.mul(r));
                }
            }
        }
        let piv = match eq.iter().position(|x| !x.is_zero()) {
            Some(p) => p,
            None => return false,
        };
        let inv = eq[piv].inv().expect("field coefficients");
        for x in eq.iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
        for (_, row) in self.rows.iter_mut() {
            if row[piv].is_zero() {
                continue;
            }
            let f = row[piv].clone();
            for k in 0..eq.len() {
                if !eq[k].is_zero() {
                    row[k] = row[k].sub(&f.mul(&eq[k]));
                }
            }
        }
        self.rows.push((piv, eq));
        true
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.nvars
    }

    /// Kernel basis ordered by ascending free column.
    pub fn kernel(&self) -> Vec<Vec<Elem>> {
        let pivots: Vec<usize> = self.rows.iter().map(|(p, _)| *p).collect();
        let mut out = Vec::new();
        for free in 0..self.nvars {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![self.field.zero(); self.nvars];
            v[free] = self.field.one();
            for (p, row) in &self.rows {
                v[*p] = row[free].neg();
            }
            out.push(v);
        }
        out
    }
}

/// Kernel of a matrix given as rows, over a field.
pub fn kernel(field: &Field, rows: &[Vec<Elem>], nvars: usize) -> Vec<Vec<Elem>> {
    let mut r = Rref::new(field, nvars);
    for row in rows {
        if r.is_full() {
            break;
        }
        r.push(row.clone());
    }
    r.kernel()
}

fn check_family(x: &[Matrix], y: &[Matrix]) -> Result<(), MatrixError> {
    if x.len() != y.len() {
        return Err(MatrixError::DimensionMismatch(format!("{} vs {} matrices", x.len(), y.len())));
    }
    for m in x.iter().chain(y) {
        if !m.is_square() {
            return Err(MatrixError::NotSquare(m.rows, m.cols));
        }
    }
    for w in x.windows(2).chain(y.windows(2)) {
        if w[0].rows != w[1].rows {
            return Err(MatrixError::DimensionMismatch("family sizes differ".into()));
        }
    }
    Ok(())
}

/// Basis of {A : A Y_i = X_i A for all i}. X_i and Y_i may have different
/// sizes, in which case A is rectangular.
pub fn intertwiner_space(x: &[Matrix], y: &[Matrix]) -> Result<Vec<Matrix>, MatrixError> {
    check_family(x, y)?;
    if x.is_empty() {
        return Err(MatrixError::DimensionMismatch("empty family".into()));
    }
    let field = x[0].field.clone();
    let (p, q) = (x[0].rows, y[0].rows);
    let nvars = p * q;
    let mut sys = Rref::new(&field, nvars);
    'outer: for (xi, yi) in x.iter().zip(y) {
        for r in 0..p {
            for s in 0..q {
                if sys.is_full() {
                    break 'outer;
                }
                let mut eq = vec![field.zero(); nvars];
                for k in 0..q {
                    let c = yi.get(k, s);
                    if !c.is_zero() {
                        eq[r * q + k] = eq[r * q + k].add(c);
                    }
                }
                for k in 0..p {
                    let c = xi.get(r, k);
                    if !c.is_zero() {
                        eq[k * q + s] = eq[k * q + s].sub(c);
                    }
                }
                sys.push(eq);
            }
        }
    }
    Ok(sys.kernel().into_iter().map(|v| Matrix::from_vec(&field, p, q, v)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conjugacy {
    Conjugate(Matrix),
    NonConjugate,
    Undetermined,
}

/// The first `count` values of 0, 1, -1, 2, -2, ...
pub fn grid_values(field: &Field, count: usize) -> Vec<Elem> {
    (0..count)
        .map(|k| {
            let v = ((k + 1) / 2) as i64;
            field.from_int(if k % 2 == 1 { v } else { -v })
        })
        .collect()
}

/// Visits index tuples of length d with entries summing to at most `budget`,
/// in lexicographic order, until `visit` returns true.
pub fn simplex_tuples(d: usize, budget: usize, visit: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(cur: &mut Vec<usize>, d: usize, left: usize, visit: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == d {
            return visit(cur);
        }
        for v in 0..=left {
            cur.push(v);
            let stop = rec(cur, d, left - v, visit);
            cur.pop();
            if stop {
                return true;
            }
        }
        false
    }
    rec(&mut Vec::with_capacity(d), d, budget, visit)
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Searches the combinations of `basis` at the points of a unisolvent grid
/// for total degree `degree` and returns the first invertible one.
/// `Ok(None)` certifies that det(sum t_i B_i) vanishes identically.
pub fn generic_invertible(basis: &[Matrix], degree: usize) -> Result<Option<Matrix>, ()> {
    let field = basis[0].field.clone();
    if let Some(size) = field.size() {
        if (size as u128) < degree as u128 + 1 {
            return Err(());
        }
    }
    let vals = grid_values(&field, degree + 1);
    // C(len + degree, degree) tuples; past a small budget, try dense probes first
    let lower_set = (1..=degree as u128).try_fold(1u128, |acc, k| acc.checked_mul(basis.len() as u128 + k).map(|v| v / k));
    let probes = if lower_set.is_some_and(|c| c <= 4096) { 0 } else { 4 };
    for shift in 0..probes {
        let m = basis.iter().enumerate().fold(Matrix::zeros(&field, basis[0].rows, basis[0].cols), |acc, (j, b)| {
            let k = 1 + (splitmix((j as u64) << 8 | shift) as usize) % degree.max(1);
            acc.add(&b.scale(&vals[k.min(vals.len() - 1)]))
        });
        if m.is_invertible() {
            return Ok(Some(m));
        }
    }
    let mut found = None;
    simplex_tuples(basis.len(), degree, &mut |t| {
        let mut m = Matrix::zeros(&field, basis[0].rows, basis[0].cols);
        for (b, &k) in basis.iter().zip(t) {
            if k != 0 {
                m = m.add(&b.scale(&vals[k]));
            }
        }
        if m.is_invertible() {
            found = Some(m);
            true
        } else {
            false
        }
    });
    Ok(found)
}

/// An invertible A with A X_i A^-1 = Y_i for all i.
///
/// det(sum t_j B_j) over a basis of the intertwiner space is homogeneous of
/// degree n, so it vanishes identically iff it vanishes on the lower set of
/// exponent tuples with total degree at most n.
pub fn simultaneous_conjugator(x: &[Matrix], y: &[Matrix]) -> Result<Conjugacy, MatrixError> {
    check_family(x, y)?;
    if x.is_empty() {
        return Err(MatrixError::DimensionMismatch("empty family".into()));
    }
    if x[0].rows != y[0].rows {
        return Ok(Conjugacy::NonConjugate);
    }
    let n = x[0].rows;
    if x == y {
        return Ok(Conjugacy::Conjugate(Matrix::identity(&x[0].field, n)));
    }
    let basis = intertwiner_space(y, x)?;
    if basis.is_empty() {
        return Ok(Conjugacy::NonConjugate);
    }
    Ok(match generic_invertible(&basis, n) {
        Ok(Some(a)) => Conjugacy::Conjugate(a),
        Ok(None) if x[0].field.is_field() => Conjugacy::NonConjugate,
        _ => Conjugacy::Undetermined,
    })
}

/// h with h A h^t = I, by congruence diagonalization and square-root scaling.
///
/// Over a finite field the non-square pivots are paired off through a
/// solution of a x^2 + b y^2 = 1; an odd number of them means the form is
/// not equivalent to the identity and NotPresent is returned.
pub fn symmetric_congruence(a: &Matrix) -> Result<Matrix, MatrixError> {
    if !a.is_square() {
        return Err(MatrixError::NotSquare(a.rows, a.cols));
    }
    if !a.is_symmetric() {
        return Err(MatrixError::NotSymmetric);
    }
    let field = a.field.clone();
    let n = a.rows;
    let mut m = a.clone();
    let mut h = Matrix::identity(&field, n);
    for k in 0..n {
        if m.get(k, k).is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !m.get(j, j).is_zero()) {
                m.swap_rows(k, j);
                m = m.transpose();
                m.swap_rows(k, j);
                h.swap_rows(k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !m.get(k, j).is_zero()) {
                // replace e_k by e_k + e_j: the new pivot is 2 m_kj
                let minus_one = field.from_int(-1);
                m.axpy_row(k, j, &minus_one);
                m = m.transpose();
                m.axpy_row(k, j, &minus_one);
                h.axpy_row(k, j, &minus_one);
            } else {
                return Err(MatrixError::Singular);
            }
            if m.get(k, k).is_zero() {
                return Err(MatrixError::Singular);
            }
        }
        let pinv = m.get(k, k).inv().ok_or(MatrixError::Singular)?;
        for i in k + 1..n {
            if m.get(i, k).is_zero() {
                continue;
            }
            let f = m.get(i, k).mul(&pinv);
            m.axpy_row(i, k, &f);
            h.axpy_row(i, k, &f);
            for r in 0..n {
                // mirror the column operation; m stays symmetric
                let v = m.get(i, r).clone();
                m.set(r, i, v);
            }
        }
    }
    let d: Vec<Elem> = (0..n).map(|i| m.get(i, i).clone()).collect();
    let mut pending: Option<usize> = None;
    for i in 0..n {
        match field_sqrt(&d[i]) {
            Ok(s) => {
                let inv = s.inv().ok_or(MatrixError::Singular)?;
                h.scale_row(i, &inv);
            }
            Err(e) => {
                if field.size().is_none() || !field.is_field() {
                    return Err(e.into());
                }
                match pending.take() {
                    None => pending = Some(i),
                    Some(j) => pair_nonsquares(&mut h, &d, j, i)?,
                }
            }
        }
    }
    if pending.is_some() {
        return Err(FieldError::NotPresent { hint: None }.into());
    }
    Ok(h)
}

// Rows j, i of h carry diagonal values a, b (both non-squares); rotate them
// onto a basis with Gram matrix I.
fn pair_nonsquares(h: &mut Matrix, d: &[Elem], j: usize, i: usize) -> Result<(), MatrixError> {
    let field = h.field.clone();
    let (a, b) = (&d[j], &d[i]);
    let size = field.size().unwrap() as i64;
    let mut sol = None;
    'search: for x in 0..size {
        let xe = field.from_int(x);
        let rest = field.one().sub(&a.mul(&xe.mul(&xe)));
        if let Some(y2) = rest.div(b) {
            if let Ok(y) = field_sqrt(&y2) {
                sol = Some((xe, y));
                break 'search;
            }
        }
    }
    let (x, y) = sol.ok_or(FieldError::NotPresent { hint: None })?;
    let s = field_sqrt(&a.mul(b)).map_err(MatrixError::from)?;
    let sinv = s.inv().ok_or(MatrixError::Singular)?;
    // u = (x, y), w = (b y, -a x)/sqrt(ab)
    let row_j: Vec<Elem> = (0..h.cols).map(|k| h.get(j, k).clone()).collect();
    let row_i: Vec<Elem> = (0..h.cols).map(|k| h.get(i, k).clone()).collect();
    let w1 = b.mul(&y).mul(&sinv);
    let w2 = a.mul(&x).neg().mul(&sinv);
    for k in 0..h.cols {
        h.set(j, k, x.mul(&row_j[k]).add(&y.mul(&row_i[k])));
        h.set(i, k, w1.mul(&row_j[k]).add(&w2.mul(&row_i[k])));
    }
    Ok(())
}
