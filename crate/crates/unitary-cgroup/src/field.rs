//! Exact coefficient arithmetic.
//!
//! One element type covers the rationals, cyclotomic fields in the power
//! basis, prime fields and the truncated rings Z/l^M. The structure an
//! element lives in is described by [`Field`], which is chosen once per run.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("square root not present{}", match .hint { Some(h) => format!(" (exists in conductor {h})"), None => String::new() })]
    NotPresent { hint: Option<u64> },
    #[error("conductor {from} does not divide {to}")]
    BadEmbedding { from: u64, to: u64 },
    #[error("precision {requested} exceeds {available}")]
    BadPrecision { requested: u32, available: u32 },
    #[error("cannot parse '{0}'")]
    Parse(String),
    #[error("{0}")]
    Unsupported(String),
}

/// Precomputed data for Q(zeta_N): the N-th cyclotomic polynomial and the
/// reductions of x^e for 0 <= e < N.
#[derive(Debug)]
pub struct CycloCtx {
    n: u32,
    phi: usize,
    poly: Vec<i64>,
    monomials: Vec<Vec<i64>>,
}

impl CycloCtx {
    fn new(n: u32) -> CycloCtx {
        assert!(n >= 1 && n <= 4096, "conductor out of range");
        let poly = cyclotomic_poly(n as usize);
        let phi = poly.len() - 1;
        let mut monomials = Vec::with_capacity(n as usize);
        let mut cur = vec![0i64; phi];
        if phi > 0 {
            cur[0] = 1;
        }
        for _ in 0..n {
            monomials.push(cur.clone());
            // multiply by x and reduce with the monic relation
            let top = cur[phi - 1];
            let mut next = vec![0i64; phi];
            for j in (1..phi).rev() {
                next[j] = cur[j - 1];
            }
            for j in 0..phi {
                next[j] -= top * poly[j];
            }
            cur = next;
        }
        CycloCtx { n, phi, poly, monomials }
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.phi
    }

    /// Integer coefficients of the cyclotomic polynomial, lowest degree first.
    pub fn modulus_poly(&self) -> &[i64] {
        &self.poly
    }
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

// exact division by a monic integer polynomial
fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dl = den.len();
    let ql = num.len() - dl + 1;
    let mut q = vec![0i64; ql];
    for i in (0..ql).rev() {
        let c = rem[i + dl - 1];
        q[i] = c;
        for j in 0..dl {
            rem[i + j] -= c * den[j];
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

pub fn cyclotomic_poly(n: usize) -> Vec<i64> {
    let mut num = vec![0i64; n + 1];
    num[0] = -1;
    num[n] = 1;
    let mut den = vec![1i64];
    for d in 1..n {
        if n % d == 0 {
            den = poly_mul(&den, &cyclotomic_poly(d));
        }
    }
    poly_div_exact(&num, &den)
}

/// The coefficient structure of a run.
#[derive(Clone, Debug)]
pub enum Field {
    Rational,
    Cyclo(Arc<CycloCtx>),
    Fp(u64),
    LAdic { l: u64, m: u32, modulus: u64 },
}

impl PartialEq for Field {
    fn eq(&self, other: &Field) -> bool {
        match (self, other) {
            (Field::Rational, Field::Rational) => true,
            (Field::Cyclo(a), Field::Cyclo(b)) => a.n == b.n,
            (Field::Fp(a), Field::Fp(b)) => a == b,
            (Field::LAdic { l: a, m: x, .. }, Field::LAdic { l: b, m: y, .. }) => a == b && x == y,
            _ => false,
        }
    }
}
impl Eq for Field {}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

fn modinv(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut nt) = (0i128, 1i128);
    let (mut r, mut nr) = (m as i128, (a % m) as i128);
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

fn lcm(a: u64, b: u64) -> u64 {
    a / a.gcd(&b) * b
}

fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let mut factors = Vec::new();
    let mut m = p - 1;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&q| powmod(g, (p - 1) / q, p) != 1))
        .expect("prime has a primitive root")
}

impl Field {
    pub fn cyclo(n: u32) -> Field {
        Field::Cyclo(Arc::new(CycloCtx::new(n)))
    }

    pub fn fp(p: u64) -> Result<Field, FieldError> {
        if !is_prime(p) || p >= (1u64 << 62) {
            return Err(FieldError::Unsupported(format!("{p} is not a usable prime")));
        }
        Ok(Field::Fp(p))
    }

    pub fn ladic(l: u64, m: u32) -> Result<Field, FieldError> {
        if !is_prime(l) || m == 0 {
            return Err(FieldError::Unsupported(format!("bad truncated ring {l}^{m}")));
        }
        let modulus = l
            .checked_pow(m)
            .filter(|&q| q < (1u64 << 62))
            .ok_or_else(|| FieldError::Unsupported("modulus too large".into()))?;
        Ok(Field::LAdic { l, m, modulus })
    }

    /// Parses the run configuration syntax `rational`, `cyclo:N`, `fp:p`, `ladic:l,M`.
    pub fn parse(spec: &str) -> Result<Field, FieldError> {
        let bad = || FieldError::Parse(spec.to_string());
        if spec == "rational" {
            return Ok(Field::Rational);
        }
        let (kind, rest) = spec.split_once(':').ok_or_else(bad)?;
        match kind {
            "cyclo" => {
                let n: u32 = rest.parse().map_err(|_| bad())?;
                if n == 0 || n > 4096 {
                    return Err(bad());
                }
                Ok(Field::cyclo(n))
            }
            "fp" => Field::fp(rest.parse().map_err(|_| bad())?),
            "ladic" => {
                let (l, m) = rest.split_once(',').ok_or_else(bad)?;
                Field::ladic(l.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?)
            }
            _ => Err(bad()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Field::Rational => "rational".into(),
            Field::Cyclo(c) => format!("cyclo:{}", c.n),
            Field::Fp(p) => format!("fp:{p}"),
            Field::LAdic { l, m, .. } => format!("ladic:{l},{m}"),
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, Field::LAdic { .. })
    }

    /// 0 for characteristic zero, p for F_p; for Z/l^M the residue characteristic.
    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rational | Field::Cyclo(_) => 0,
            Field::Fp(p) => *p,
            Field::LAdic { l, .. } => *l,
        }
    }

    /// Number of elements, or None when infinite.
    pub fn size(&self) -> Option<u64> {
        match self {
            Field::Fp(p) => Some(*p),
            Field::LAdic { modulus, .. } => Some(*modulus),
            _ => None,
        }
    }

    pub fn zero(&self) -> Elem {
        self.from_int(0)
    }

    pub fn one(&self) -> Elem {
        self.from_int(1)
    }

    pub fn from_int(&self, v: i64) -> Elem {
        self.from_rational(&Rational::from_integer(BigInt::from(v)))
            .expect("integers embed everywhere")
    }

    /// Image of a rational number; fails when the denominator is not invertible.
    pub fn from_rational(&self, q: &Rational) -> Option<Elem> {
        match self {
            Field::Rational => Some(Elem::Q(q.clone())),
            Field::Cyclo(ctx) => {
                let mut c = vec![Rational::zero(); ctx.phi];
                c[0] = q.clone();
                Some(Elem::Cyclo(CycloElem { ctx: ctx.clone(), c }))
            }
            Field::Fp(p) => {
                let num = reduce_bigint(q.numer(), *p);
                let den = reduce_bigint(q.denom(), *p);
                let inv = modinv(den, *p)?;
                Some(Elem::Fp(PrimeFieldElem { p: *p, v: mulmod(num, inv, *p) }))
            }
            Field::LAdic { l, m, modulus } => {
                let num = reduce_bigint(q.numer(), *modulus);
                let den = reduce_bigint(q.denom(), *modulus);
                let inv = modinv(den, *modulus)?;
                Some(Elem::LAdic(TruncatedLAdic { l: *l, m: *m, q: *modulus, v: mulmod(num, inv, *modulus) }))
            }
        }
    }

    /// A primitive N-th root of unity raised to the k-th power, when the
    /// structure contains one. Choices are canonical: zeta_M^(M/N) in Q(zeta_M),
    /// g^((p-1)/N) for the least primitive root g, Teichmuller lifts in Z/l^M.
    pub fn root_of_unity(&self, n: u64, k: i64) -> Option<Elem> {
        let e = k.rem_euclid(n as i64) as u64;
        match self {
            Field::Rational => match n {
                1 => Some(self.one()),
                2 => Some(if e == 0 { self.one() } else { self.from_int(-1) }),
                _ => None,
            },
            Field::Cyclo(ctx) => {
                let m = ctx.n as u64;
                let w = if m % 2 == 0 { m } else { 2 * m };
                if w % n != 0 {
                    return None;
                }
                Some(cyclo_root_power(ctx, ((w / n) * e) as usize))
            }
            Field::Fp(p) => {
                if (p - 1) % n != 0 {
                    return None;
                }
                let z = powmod(primitive_root(*p), (p - 1) / n, *p);
                Some(Elem::Fp(PrimeFieldElem { p: *p, v: powmod(z, e, *p) }))
            }
            Field::LAdic { l, m, modulus } => {
                if (l - 1) % n != 0 {
                    return None;
                }
                let g = primitive_root(*l);
                let teich = powmod(g, l.pow(m - 1), *modulus);
                let z = powmod(teich, (l - 1) / n, *modulus);
                Some(Elem::LAdic(TruncatedLAdic { l: *l, m: *m, q: *modulus, v: powmod(z, e, *modulus) }))
            }
        }
    }

    /// Maps an element of Z[zeta_N] (given as a cyclotomic element) into this
    /// structure by sending zeta_N to the canonical root of unity above.
    pub fn map_cyclo(&self, x: &Elem) -> Result<Elem, FieldError> {
        match x {
            Elem::Q(q) => self
                .from_rational(q)
                .ok_or_else(|| FieldError::Unsupported("denominator not invertible".into())),
            Elem::Cyclo(c) => {
                let n = c.ctx.n as u64;
                let mut acc = self.zero();
                for (j, cj) in c.c.iter().enumerate() {
                    if cj.is_zero() {
                        continue;
                    }
                    let z = self.root_of_unity(n, j as i64).ok_or_else(|| {
                        FieldError::Unsupported(format!("{} has no {n}-th roots of unity", self.describe()))
                    })?;
                    let coeff = self
                        .from_rational(cj)
                        .ok_or_else(|| FieldError::Unsupported("denominator not invertible".into()))?;
                    acc = acc.add(&coeff.mul(&z));
                }
                Ok(acc)
            }
            other if other.field() == *self => Ok(other.clone()),
            other => Err(FieldError::Unsupported(format!(
                "cannot map {} into {}",
                other.field().describe(),
                self.describe()
            ))),
        }
    }

    /// Parses an element written in any of the serialized forms and maps it
    /// into this structure (rationals and cyclotomic integers are portable).
    pub fn parse_elem(&self, s: &str) -> Result<Elem, FieldError> {
        let e: Elem = s.parse()?;
        self.map_cyclo(&e)
    }
}

fn reduce_bigint(x: &BigInt, m: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(m));
    r.to_u64().expect("reduced value fits")
}

fn cyclo_root_power(ctx: &Arc<CycloCtx>, e: usize) -> Elem {
    // zeta_W^e with W = N (N even) or 2N (N odd, using zeta_2N = -zeta_N^((N+1)/2))
    let n = ctx.n as usize;
    let (idx, neg) = if n % 2 == 0 {
        (e % n, false)
    } else {
        let e = e % (2 * n);
        if e % 2 == 0 {
            (e / 2, false)
        } else {
            ((e * (n + 1) / 2) % n, true)
        }
    };
    let mut c: Vec<Rational> = ctx.monomials[idx]
        .iter()
        .map(|&v| Rational::from_integer(BigInt::from(v)))
        .collect();
    if neg {
        for x in c.iter_mut() {
            *x = -x.clone();
        }
    }
    Elem::Cyclo(CycloElem { ctx: ctx.clone(), c })
}

/// Element of Q(zeta_N) in the power basis modulo the N-th cyclotomic polynomial.
#[derive(Clone, Debug)]
pub struct CycloElem {
    ctx: Arc<CycloCtx>,
    c: Vec<Rational>,
}

impl CycloElem {
    pub fn conductor(&self) -> u32 {
        self.ctx.n
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    fn is_rational(&self) -> bool {
        self.c.iter().skip(1).all(|x| x.is_zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeFieldElem {
    p: u64,
    v: u64,
}

impl PrimeFieldElem {
    pub fn modulus(&self) -> u64 {
        self.p
    }
    pub fn value(&self) -> u64 {
        self.v
    }
}

/// Element of Z/l^M; only units are invertible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedLAdic {
    l: u64,
    m: u32,
    q: u64,
    v: u64,
}

impl TruncatedLAdic {
    pub fn prime(&self) -> u64 {
        self.l
    }
    pub fn precision(&self) -> u32 {
        self.m
    }
    pub fn value(&self) -> u64 {
        self.v
    }
}

#[derive(Clone, Debug)]
pub enum Elem {
    Q(Rational),
    Cyclo(CycloElem),
    Fp(PrimeFieldElem),
    LAdic(TruncatedLAdic),
}

fn cyclo_mul(ctx: &CycloCtx, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let phi = ctx.phi;
    let n = ctx.n as usize;
    let mut prod = vec![Rational::zero(); 2 * phi - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            prod[i + j] += x * y;
        }
    }
    let mut out: Vec<Rational> = prod[..phi].to_vec();
    for (k, v) in prod.iter().enumerate().skip(phi) {
        if v.is_zero() {
            continue;
        }
        for (j, &r) in ctx.monomials[k % n].iter().enumerate() {
            if r != 0 {
                out[j] += v * Rational::from_integer(BigInt::from(r));
            }
        }
    }
    out
}

// Gaussian elimination over Q for a square system; None if singular.
fn solve_rational(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for j in col..n {
            a[col][j] = &a[col][j] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                }
                let t = &f * &b[col];
                b[r] -= t;
            }
        }
    }
    Some(b)
}

impl Elem {
    pub fn field(&self) -> Field {
        match self {
            Elem::Q(_) => Field::Rational,
            Elem::Cyclo(c) => Field::Cyclo(c.ctx.clone()),
            Elem::Fp(x) => Field::Fp(x.p),
            Elem::LAdic(x) => Field::LAdic { l: x.l, m: x.m, modulus: x.q },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Elem::Q(q) => q.is_zero(),
            Elem::Cyclo(c) => c.c.iter().all(|x| x.is_zero()),
            Elem::Fp(x) => x.v == 0,
            Elem::LAdic(x) => x.v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Elem::Q(q) => q.is_one(),
            Elem::Cyclo(c) => c.c[0].is_one() && c.is_rational(),
            Elem::Fp(x) => x.v == 1,
            Elem::LAdic(x) => x.v == 1 % x.q,
        }
    }

    /// Brings two elements into a common structure; rationals are promoted.
    fn coerce(a: &Elem, b: &Elem) -> (Elem, Elem) {
        match (a, b) {
            (Elem::Q(q), other) if !matches!(other, Elem::Q(_)) => (
                other.field().from_rational(q).expect("rational not representable"),
                b.clone(),
            ),
            (other, Elem::Q(q)) if !matches!(other, Elem::Q(_)) => (
                a.clone(),
                other.field().from_rational(q).expect("rational not representable"),
            ),
            _ => {
                assert!(a.field() == b.field(), "mixed fields {} and {}", a.field().describe(), b.field().describe());
                (a.clone(), b.clone())
            }
        }
    }

    fn needs_coerce(a: &Elem, b: &Elem) -> bool {
        !matches!(
            (a, b),
            (Elem::Q(_), Elem::Q(_)) | (Elem::Cyclo(_), Elem::Cyclo(_)) | (Elem::Fp(_), Elem::Fp(_)) | (Elem::LAdic(_), Elem::LAdic(_))
        )
    }

    pub fn add(&self, o: &Elem) -> Elem {
        if Elem::needs_coerce(self, o) {
            let (a, b) = Elem::coerce(self, o);
            return a.add(&b);
        }
        match (self, o) {
            (Elem::Q(a), Elem::Q(b)) => Elem::Q(a + b),
            (Elem::Cyclo(a), Elem::Cyclo(b)) => {
                assert_eq!(a.ctx.n, b.ctx.n, "mixed conductors");
                Elem::Cyclo(CycloElem { ctx: a.ctx.clone(), c: a.c.iter().zip(&b.c).map(|(x, y)| x + y).collect() })
            }
            (Elem::Fp(a), Elem::Fp(b)) => {
                assert_eq!(a.p, b.p, "mixed primes");
                Elem::Fp(PrimeFieldElem { p: a.p, v: (a.v + b.v) % a.p })
            }
            (Elem::LAdic(a), Elem::LAdic(b)) => {
                assert_eq!(a.q, b.q, "mixed precisions");
                Elem::LAdic(TruncatedLAdic { v: (a.v + b.v) % a.q, ..*a })
            }
            _ => unreachable!(),
        }
    }

    pub fn neg(&self) -> Elem {
        match self {
            Elem::Q(a) => Elem::Q(-a),
            Elem::Cyclo(a) => Elem::Cyclo(CycloElem { ctx: a.ctx.clone(), c: a.c.iter().map(|x| -x).collect() }),
            Elem::Fp(a) => Elem::Fp(PrimeFieldElem { p: a.p, v: (a.p - a.v) % a.p }),
            Elem::LAdic(a) => Elem::LAdic(TruncatedLAdic { v: (a.q - a.v) % a.q, ..*a }),
        }
    }

    pub fn sub(&self, o: &Elem) -> Elem {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Elem) -> Elem {
        if Elem::needs_coerce(self, o) {
            if let Elem::Q(q) = o {
                return self.scale_rational(q);
            }
            if let Elem::Q(q) = self {
                return o.scale_rational(q);
            }
            let (a, b) = Elem::coerce(self, o);
            return a.mul(&b);
        }
        match (self, o) {
            (Elem::Q(a), Elem::Q(b)) => Elem::Q(a * b),
            (Elem::Cyclo(a), Elem::Cyclo(b)) => {
                assert_eq!(a.ctx.n, b.ctx.n, "mixed conductors");
                Elem::Cyclo(CycloElem { ctx: a.ctx.clone(), c: cyclo_mul(&a.ctx, &a.c, &b.c) })
            }
            (Elem::Fp(a), Elem::Fp(b)) => {
                assert_eq!(a.p, b.p, "mixed primes");
                Elem::Fp(PrimeFieldElem { p: a.p, v: mulmod(a.v, b.v, a.p) })
            }
            (Elem::LAdic(a), Elem::LAdic(b)) => {
                assert_eq!(a.q, b.q, "mixed precisions");
                Elem::LAdic(TruncatedLAdic { v: mulmod(a.v, b.v, a.q), ..*a })
            }
            _ => unreachable!(),
        }
    }

    fn scale_rational(&self, q: &Rational) -> Elem {
        match self {
            Elem::Q(a) => Elem::Q(a * q),
            Elem::Cyclo(a) => Elem::Cyclo(CycloElem { ctx: a.ctx.clone(), c: a.c.iter().map(|x| x * q).collect() }),
            _ => self.mul(&self.field().from_rational(q).expect("rational not representable")),
        }
    }

    /// Multiplicative inverse; None for zero and for non-units of Z/l^M.
    pub fn inv(&self) -> Option<Elem> {
        if self.is_zero() {
            return None;
        }
        match self {
            Elem::Q(a) => Some(Elem::Q(a.recip())),
            Elem::Cyclo(a) => {
                if a.is_rational() {
                    let mut c = vec![Rational::zero(); a.ctx.phi];
                    c[0] = a.c[0].recip();
                    return Some(Elem::Cyclo(CycloElem { ctx: a.ctx.clone(), c }));
                }
                let phi = a.ctx.phi;
                // column j holds the coordinates of a * x^j
                let mut cols = Vec::with_capacity(phi);
                for j in 0..phi {
                    let mut e = vec![Rational::zero(); phi];
                    e[j] = Rational::one();
                    cols.push(cyclo_mul(&a.ctx, &a.c, &e));
                }
                let mat: Vec<Vec<Rational>> = (0..phi).map(|i| (0..phi).map(|j| cols[j][i].clone()).collect()).collect();
                let mut rhs = vec![Rational::zero(); phi];
                rhs[0] = Rational::one();
                let c = solve_rational(mat, rhs)?;
                Some(Elem::Cyclo(CycloElem { ctx: a.ctx.clone(), c }))
            }
            Elem::Fp(a) => Some(Elem::Fp(PrimeFieldElem { p: a.p, v: modinv(a.v, a.p)? })),
            Elem::LAdic(a) => Some(Elem::LAdic(TruncatedLAdic { v: modinv(a.v, a.q)?, ..*a })),
        }
    }

    pub fn div(&self, o: &Elem) -> Option<Elem> {
        Some(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Option<Elem> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = self.field().one();
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        Some(acc)
    }

    pub fn is_unit(&self) -> bool {
        match self {
            Elem::LAdic(a) => a.v % a.l != 0,
            _ => !self.is_zero(),
        }
    }

    /// The rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Elem::Q(q) => Some(q.clone()),
            Elem::Cyclo(c) if c.is_rational() => Some(c.c[0].clone()),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        let q = self.as_rational()?;
        if q.is_integer() {
            q.to_integer().to_i64()
        } else {
            None
        }
    }

    /// True when every power-basis coordinate is an integer (so the element is
    /// an algebraic integer); finite structures are always integral.
    pub fn is_integral(&self) -> bool {
        match self {
            Elem::Q(q) => q.is_integer(),
            Elem::Cyclo(c) => c.c.iter().all(|x| x.is_integer()),
            _ => true,
        }
    }

    /// Total order used for canonical choices: lexicographic on power-basis
    /// coordinates, or on the reduced representative.
    pub fn canonical_cmp(&self, o: &Elem) -> Ordering {
        match (self, o) {
            (Elem::Fp(a), Elem::Fp(b)) => a.v.cmp(&b.v),
            (Elem::LAdic(a), Elem::LAdic(b)) => a.v.cmp(&b.v),
            _ => {
                let ca = self.rational_coords();
                let cb = o.rational_coords();
                ca.cmp(&cb)
            }
        }
    }

    fn rational_coords(&self) -> Vec<Rational> {
        match self {
            Elem::Q(q) => vec![q.clone()],
            Elem::Cyclo(c) => c.c.clone(),
            Elem::Fp(x) => vec![Rational::from_integer(BigInt::from(x.v))],
            Elem::LAdic(x) => vec![Rational::from_integer(BigInt::from(x.v))],
        }
    }

    /// Canonical inclusion Q(zeta_N) into Q(zeta_N') for N | N'.
    pub fn embed(&self, target: u32) -> Result<Elem, FieldError> {
        let tf = Field::cyclo(target);
        match self {
            Elem::Q(q) => Ok(tf.from_rational(q).expect("rational")),
            Elem::Cyclo(c) => {
                if target % c.ctx.n != 0 {
                    return Err(FieldError::BadEmbedding { from: c.ctx.n as u64, to: target as u64 });
                }
                tf.map_cyclo(self)
            }
            _ => Err(FieldError::Unsupported("embed applies to characteristic zero".into())),
        }
    }

    /// Inverse of [`Elem::embed`] on its image: the element of Q(zeta_N) mapping
    /// to self, if any.
    pub fn restrict(&self, n: u32) -> Option<Elem> {
        let c = match self {
            Elem::Cyclo(c) => c,
            Elem::Q(q) => return Some(Field::cyclo(n).from_rational(q).unwrap()),
            _ => return None,
        };
        let big = c.ctx.n;
        if big % n != 0 {
            return None;
        }
        let small = Field::cyclo(n);
        let phi = match &small {
            Field::Cyclo(ctx) => ctx.phi,
            _ => unreachable!(),
        };
        // images of the small power basis, solved by least-squares free elimination
        let basis: Vec<Elem> = (0..phi)
            .map(|j| {
                let mut v = vec![Rational::zero(); phi];
                v[j] = Rational::one();
                let ctx = match &small {
                    Field::Cyclo(ctx) => ctx.clone(),
                    _ => unreachable!(),
                };
                Elem::Cyclo(CycloElem { ctx, c: v }).embed(big).unwrap()
            })
            .collect();
        let rows = c.ctx.phi;
        let mut aug: Vec<Vec<Rational>> = (0..rows)
            .map(|i| {
                let mut r: Vec<Rational> = basis.iter().map(|b| b.rational_coords()[i].clone()).collect();
                r.push(c.c[i].clone());
                r
            })
            .collect();
        // row reduce the augmented system
        let mut piv_row = 0;
        let mut pivots = Vec::new();
        for col in 0..phi {
            if let Some(r) = (piv_row..rows).find(|&r| !aug[r][col].is_zero()) {
                aug.swap(piv_row, r);
                let inv = aug[piv_row][col].recip();
                for x in aug[piv_row].iter_mut() {
                    *x = &*x * &inv;
                }
                for r2 in 0..rows {
                    if r2 != piv_row && !aug[r2][col].is_zero() {
                        let f = aug[r2][col].clone();
                        for j in 0..=phi {
                            let t = &f * &aug[piv_row][j];
                            aug[r2][j] -= t;
                        }
                    }
                }
                pivots.push(col);
                piv_row += 1;
            }
        }
        if aug[piv_row..].iter().any(|r| !r[phi].is_zero()) {
            return None;
        }
        let mut out = vec![Rational::zero(); phi];
        for (i, &col) in pivots.iter().enumerate() {
            out[col] = aug[i][phi].clone();
        }
        let ctx = match small {
            Field::Cyclo(ctx) => ctx,
            _ => unreachable!(),
        };
        Some(Elem::Cyclo(CycloElem { ctx, c: out }))
    }

    /// Reduction Z/l^M -> Z/l^m.
    pub fn ring_reduce(&self, m: u32) -> Result<Elem, FieldError> {
        match self {
            Elem::LAdic(x) => {
                if m > x.m {
                    return Err(FieldError::BadPrecision { requested: m, available: x.m });
                }
                let q = x.l.pow(m);
                Ok(Elem::LAdic(TruncatedLAdic { l: x.l, m, q, v: x.v % q }))
            }
            _ => Err(FieldError::Unsupported("ring_reduce applies to Z/l^M".into())),
        }
    }
}

impl PartialEq for Elem {
    fn eq(&self, o: &Elem) -> bool {
        if Elem::needs_coerce(self, o) {
            if matches!(self, Elem::Q(_)) || matches!(o, Elem::Q(_)) {
                let (a, b) = Elem::coerce(self, o);
                return a == b;
            }
            return false;
        }
        match (self, o) {
            (Elem::Q(a), Elem::Q(b)) => a == b,
            (Elem::Cyclo(a), Elem::Cyclo(b)) => a.ctx.n == b.ctx.n && a.c == b.c,
            (Elem::Fp(a), Elem::Fp(b)) => a == b,
            (Elem::LAdic(a), Elem::LAdic(b)) => a == b,
            _ => false,
        }
    }
}
impl Eq for Elem {}

impl std::ops::Add for &Elem {
    type Output = Elem;
    fn add(self, o: &Elem) -> Elem {
        Elem::add(self, o)
    }
}
impl std::ops::Sub for &Elem {
    type Output = Elem;
    fn sub(self, o: &Elem) -> Elem {
        Elem::sub(self, o)
    }
}
impl std::ops::Mul for &Elem {
    type Output = Elem;
    fn mul(self, o: &Elem) -> Elem {
        Elem::mul(self, o)
    }
}
impl std::ops::Neg for &Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        Elem::neg(self)
    }
}

fn fmt_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn fmt_coeff(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        fmt_rational(q)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Q(q) => write!(f, "{}", fmt_rational(q)),
            Elem::Cyclo(c) => {
                let parts: Vec<String> = c.c.iter().map(fmt_coeff).collect();
                write!(f, "{}:[{}]", c.ctx.n, parts.join(","))
            }
            Elem::Fp(x) => write!(f, "{}:{}", x.p, x.v),
            Elem::LAdic(x) => write!(f, "{}^{}:{}", x.l, x.m, x.v),
        }
    }
}

fn parse_rational(s: &str) -> Result<Rational, FieldError> {
    let bad = || FieldError::Parse(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(a, b))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for Elem {
    type Err = FieldError;
    fn from_str(s: &str) -> Result<Elem, FieldError> {
        let s = s.trim();
        let bad = || FieldError::Parse(s.to_string());
        if let Some((head, body)) = s.split_once(':') {
            if let Some(inner) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
                let n: u32 = head.parse().map_err(|_| bad())?;
                if n == 0 || n > 4096 {
                    return Err(bad());
                }
                let ctx = Arc::new(CycloCtx::new(n));
                let mut c: Vec<Rational> = if inner.trim().is_empty() {
                    Vec::new()
                } else {
                    inner.split(',').map(parse_rational).collect::<Result<_, _>>()?
                };
                if c.len() > ctx.phi {
                    return Err(bad());
                }
                c.resize(ctx.phi, Rational::zero());
                return Ok(Elem::Cyclo(CycloElem { ctx, c }));
            }
            let v: BigInt = body.parse().map_err(|_| bad())?;
            if let Some((l, m)) = head.split_once('^') {
                let f = Field::ladic(l.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?)?;
                return f.from_rational(&Rational::from_integer(v)).ok_or_else(bad);
            }
            let f = Field::fp(head.parse().map_err(|_| bad())?)?;
            return f.from_rational(&Rational::from_integer(v)).ok_or_else(bad);
        }
        Ok(Elem::Q(parse_rational(s)?))
    }
}

impl serde::Serialize for Elem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Elem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Elem, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------- square roots

fn legendre(a: u64, p: u64) -> i64 {
    match powmod(a, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Splits m = s^2 * d with d squarefree. Gives up (None) on cofactors it
/// cannot certify by trial division.
fn squarefree_split(m: &BigInt) -> Option<(BigInt, Vec<u64>)> {
    let mut rest = m.clone();
    let mut s = BigInt::one();
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p <= 1_000_000 {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= &bp;
        }
        if e % 2 == 1 {
            primes.push(p);
        }
        p += 1;
    }
    if rest.is_one() {
        return Some((s, primes));
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        return Some((s * r, primes));
    }
    let bound = BigInt::from(1_000_000u64) * BigInt::from(1_000_000u64);
    if rest < bound {
        primes.push(rest.to_u64()?);
        return Some((s, primes));
    }
    None
}

fn ctx_of(f: &Field) -> Arc<CycloCtx> {
    match f {
        Field::Cyclo(c) => c.clone(),
        _ => unreachable!(),
    }
}

/// Conductor needed for sqrt(rational * zeta_W^j) and, when present, the root.
fn cyclo_sqrt_parts(ctx: &Arc<CycloCtx>, q: &Rational, j: usize) -> Result<Elem, FieldError> {
    let n = ctx.n as u64;
    let w = if n % 2 == 0 { n } else { 2 * n };
    let field = Field::Cyclo(ctx.clone());
    if q.is_zero() {
        return Ok(field.zero());
    }
    let m = (q.numer() * q.denom()).abs();
    let (s, primes) = squarefree_split(&m).ok_or(FieldError::NotPresent { hint: None })?;
    let mut sign: i64 = if q.is_negative() { -1 } else { 1 };
    let mut cond = 1u64;
    for &p in &primes {
        if p == 2 {
            cond = lcm(cond, 8);
        } else {
            cond = lcm(cond, p);
            if p % 4 == 3 {
                sign = -sign;
            }
        }
    }
    let jj = ((j as u64 + if sign < 0 { w / 2 } else { 0 }) % w) as usize;
    let mut need = lcm(n, cond);
    if jj % 2 == 1 {
        let order = w / (w.gcd(&(jj as u64)));
        need = lcm(need, 2 * order);
    }
    if need != n {
        return Err(FieldError::NotPresent { hint: Some(need) });
    }
    let mut y = field
        .from_rational(&Rational::new(s, q.denom().clone()))
        .expect("rational");
    for &p in &primes {
        let factor = if p == 2 {
            // zeta_8 + zeta_8^-1
            field.root_of_unity(8, 1).unwrap().add(&field.root_of_unity(8, -1).unwrap())
        } else {
            let mut g = field.zero();
            for a in 1..p {
                let z = field.root_of_unity(p, a as i64).unwrap();
                g = if legendre(a, p) > 0 { g.add(&z) } else { g.sub(&z) };
            }
            g
        };
        y = y.mul(&factor);
    }
    Ok(y.mul(&cyclo_root_power(ctx, jj / 2)))
}

/// Orients a square root so that its first nonzero coordinate is positive.
fn canonical_branch(y: Elem) -> Elem {
    let neg = y.neg();
    let coords = y.rational_coords();
    match coords.iter().find(|c| !c.is_zero()) {
        Some(c) if c.is_negative() => neg,
        _ => y,
    }
}

fn tonelli(a: u64, p: u64) -> Option<u64> {
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| legendre(z, p) == -1).unwrap();
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(a, q, p);
    let mut r = powmod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mulmod(tt, tt, p);
            i += 1;
        }
        let b = powmod(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    Some(r)
}

/// Square root with a canonical branch, or NotPresent.
///
/// Cyclotomic case: supports rationals times roots of unity (Gauss sums give
/// the rational square roots). The returned branch has positive leading
/// coordinate, e.g. sqrt(4) = 2 and sqrt(-1) = zeta_8^2 in Q(zeta_8).
/// Prime fields and Z/l^M return the smaller representative.
pub fn field_sqrt(x: &Elem) -> Result<Elem, FieldError> {
    match x {
        Elem::Q(q) => {
            if q.is_negative() {
                let ctx = ctx_of(&Field::cyclo(1));
                return Err(cyclo_sqrt_parts(&ctx, q, 0).err().unwrap_or(FieldError::NotPresent { hint: Some(4) }));
            }
            let (a, b) = (q.numer().sqrt(), q.denom().sqrt());
            if &a * &a == *q.numer() && &b * &b == *q.denom() {
                Ok(Elem::Q(Rational::new(a, b)))
            } else {
                let ctx = ctx_of(&Field::cyclo(1));
                Err(cyclo_sqrt_parts(&ctx, q, 0).err().unwrap_or(FieldError::NotPresent { hint: None }))
            }
        }
        Elem::Cyclo(c) => {
            if x.is_zero() {
                return Ok(x.clone());
            }
            let n = c.ctx.n as u64;
            let w = if n % 2 == 0 { n } else { 2 * n };
            let field = x.field();
            for j in 0..w {
                let inv = field.root_of_unity(w, -(j as i64)).unwrap();
                let y = x.mul(&inv);
                if let Some(q) = y.as_rational() {
                    let root = cyclo_sqrt_parts(&c.ctx, &q, j as usize)?;
                    debug_assert!(root.mul(&root) == *x);
                    return Ok(canonical_branch(root));
                }
            }
            Err(FieldError::NotPresent { hint: None })
        }
        Elem::Fp(a) => {
            let r = tonelli(a.v, a.p).ok_or(FieldError::NotPresent { hint: None })?;
            Ok(Elem::Fp(PrimeFieldElem { p: a.p, v: r.min((a.p - r) % a.p) }))
        }
        Elem::LAdic(a) => {
            let found = if a.q <= (1 << 20) {
                (0..a.q).find(|&r| mulmod(r, r, a.q) == a.v)
            } else if a.l != 2 && a.v % a.l != 0 {
                // Hensel lift of a square root mod l
                tonelli(a.v % a.l, a.l).map(|mut r| {
                    let mut q = a.l;
                    for _ in 1..a.m {
                        q *= a.l;
                        let f = (mulmod(r, r, q) + q - a.v % q) % q;
                        let d = modinv((2 * r) % q, q).unwrap();
                        r = (r + q - mulmod(f, d, q)) % q;
                    }
                    r
                })
            } else {
                None
            };
            let r = found.ok_or(FieldError::NotPresent { hint: None })?;
            Ok(Elem::LAdic(TruncatedLAdic { v: r.min((a.q - r) % a.q), ..*a }))
        }
    }
}

/// All k-th roots of x that the structure contains, for finite structures by
/// enumeration and in characteristic zero among rationals times roots of unity.
pub fn field_roots(x: &Elem, k: u32) -> Vec<Elem> {
    let f = x.field();
    if k == 1 {
        return vec![x.clone()];
    }
    if let Some(size) = f.size() {
        if size <= (1 << 20) {
            return (0..size as i64)
                .map(|v| f.from_int(v))
                .filter(|y| y.pow(k as i64).map(|z| z == *x).unwrap_or(false))
                .collect();
        }
        return Vec::new();
    }
    let (w, ctx) = match &f {
        Field::Cyclo(c) => (if c.n % 2 == 0 { c.n as u64 } else { 2 * c.n as u64 }, Some(c.clone())),
        _ => (2, None),
    };
    let mut out: Vec<Elem> = Vec::new();
    let roots: Vec<Elem> = (0..w as i64).filter_map(|j| f.root_of_unity(w, j)).collect();
    let _ = ctx;
    for z in &roots {
        // x / z must be a perfect k-th power of a rational
        let y = match x.div(&z.pow(k as i64).unwrap()) {
            Some(y) => y,
            None => continue,
        };
        if let Some(q) = y.as_rational() {
            if let Some(r) = rational_root(&q, k) {
                let cand = f.from_rational(&r).unwrap().mul(z);
                if cand.pow(k as i64).unwrap() == *x && !out.contains(&cand) {
                    out.push(cand);
                }
            }
        }
    }
    out
}

fn rational_root(q: &Rational, k: u32) -> Option<Rational> {
    let root = |b: &BigInt| -> Option<BigInt> {
        let r = b.abs().nth_root(k);
        if r.pow(k) == b.abs() {
            Some(if b.is_negative() { -r } else { r })
        } else {
            None
        }
    };
    if q.is_negative() && k % 2 == 0 {
        return None;
    }
    Some(Rational::new(root(q.numer())?, root(q.denom())?))
}
