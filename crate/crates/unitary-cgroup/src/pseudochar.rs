//! Lafforgue pseudocharacters of CU-valued representations.
//!
//! An invariant function is a finite sum of terms. Each term fixes a coset
//! profile per slot, an integer coefficient, a monomial in the scalars b_k and
//! one of s_i(word), det(word)^-1 or 1. Words are products of the matrices
//! attached to the slots: a, a^-1, a^t, a^-t on identity slots and the same
//! four on Y = a Phi for c-slots. Terms vanish on tuples whose cosets do not
//! match the profile.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cgroup::{CuElement, CuGroup};
use crate::field::{field_roots, field_sqrt, Elem, Field};
use crate::galois::GaloisModel;
use crate::lifting::CuRep;
use crate::matrix::{grid_values, intertwiner_space, simplex_tuples, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Profile {
    One,
    C,
    Any,
}

impl Profile {
    pub fn admits(self, coset: bool) -> bool {
        match self {
            Profile::One => !coset,
            Profile::C => coset,
            Profile::Any => true,
        }
    }

    fn merge(self, o: Profile) -> Option<Profile> {
        match (self, o) {
            (Profile::Any, x) | (x, Profile::Any) => Some(x),
            (a, b) if a == b => Some(a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LetterKind {
    G,
    GInv,
    GT,
    GInvT,
    H,
    HInv,
    HT,
    HInvT,
}

use LetterKind::*;

impl LetterKind {
    pub fn inverse(self) -> LetterKind {
        match self {
            G => GInv,
            GInv => G,
            GT => GInvT,
            GInvT => GT,
            H => HInv,
            HInv => H,
            HT => HInvT,
            HInvT => HT,
        }
    }

    pub fn on_c(self) -> bool {
        matches!(self, H | HInv | HT | HInvT)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub kind: LetterKind,
    pub slot: usize,
}

fn l(kind: LetterKind, slot: usize) -> Letter {
    Letter { kind, slot }
}

pub type Word = Vec<Letter>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    /// i-th characteristic polynomial coefficient
    S(usize, Word),
    DetInv(Word),
    One,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub profile: Vec<Profile>,
    pub bexp: Vec<i64>,
    pub op: Op,
    pub coeff: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantFn {
    pub arity: usize,
    pub terms: Vec<Term>,
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

/// Cancels adjacent inverse letters; for trace-type words also cyclically,
/// then rotates to the least rotation.
fn reduce_word(w: &[Letter], cyclic: bool) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &x in w {
        match out.last() {
            Some(&y) if y.slot == x.slot && y.kind.inverse() == x.kind => {
                out.pop();
            }
            _ => out.push(x),
        }
    }
    if cyclic {
        while out.len() >= 2 {
            let (a, b) = (out[0], out[out.len() - 1]);
            if a.slot == b.slot && a.kind.inverse() == b.kind {
                out.pop();
                out.remove(0);
            } else {
                break;
            }
        }
        if let Some(best) = (0..out.len()).map(|r| [&out[r..], &out[..r]].concat()).min() {
            out = best;
        }
    }
    out
}

impl InvariantFn {
    pub fn single(arity: usize, profile: Vec<Profile>, bexp: Vec<i64>, op: Op, dim: usize) -> InvariantFn {
        InvariantFn { arity, terms: vec![Term { profile, bexp, op, coeff: 1 }] }.canonical(dim)
    }

    /// The arity-one generator s_i(a) on the identity coset.
    pub fn s(i: usize, dim: usize) -> InvariantFn {
        InvariantFn::single(1, vec![Profile::One], vec![0], Op::S(i, vec![l(G, 0)]), dim)
    }

    /// det(a)^-1 on the identity coset.
    pub fn det_inv(dim: usize) -> InvariantFn {
        InvariantFn::single(1, vec![Profile::One], vec![0], Op::DetInv(vec![l(G, 0)]), dim)
    }

    /// mu^(2e) = b^e on the given coset.
    pub fn mu_pow(coset: bool, e: i64, dim: usize) -> InvariantFn {
        let p = if coset { Profile::C } else { Profile::One };
        InvariantFn::single(1, vec![p], vec![e], Op::One, dim)
    }

    /// Merges like terms, reduces words and drops zero terms.
    pub fn canonical(mut self, dim: usize) -> InvariantFn {
        let mut acc: BTreeMap<(Vec<Profile>, Vec<i64>, Op), i64> = BTreeMap::new();
        for t in self.terms.drain(..) {
            let (op, mult) = match t.op {
                Op::S(i, w) => {
                    let w = reduce_word(&w, true);
                    if w.is_empty() {
                        (Op::One, binomial(dim, i))
                    } else {
                        (Op::S(i, w), 1)
                    }
                }
                Op::DetInv(w) => {
                    let w = reduce_word(&w, true);
                    if w.is_empty() {
                        (Op::One, 1)
                    } else {
                        (Op::DetInv(w), 1)
                    }
                }
                Op::One => (Op::One, 1),
            };
            *acc.entry((t.profile, t.bexp, op)).or_insert(0) += t.coeff * mult;
        }
        self.terms = acc
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|((profile, bexp, op), coeff)| Term { profile, bexp, op, coeff })
            .collect();
        self
    }

    /// f^zeta with f^zeta(x_1..x_k) = f(x_zeta(1)..x_zeta(m)).
    pub fn pull(&self, zeta: &[usize], k: usize, dim: usize) -> InvariantFn {
        assert_eq!(zeta.len(), self.arity);
        let mut terms = Vec::new();
        'term: for t in &self.terms {
            let mut profile = vec![Profile::Any; k];
            let mut bexp = vec![0; k];
            for (j, &z) in zeta.iter().enumerate() {
                match profile[z].merge(t.profile[j]) {
                    Some(p) => profile[z] = p,
                    None => continue 'term,
                }
                bexp[z] += t.bexp[j];
            }
            let relabel = |w: &Word| w.iter().map(|x| l(x.kind, zeta[x.slot])).collect::<Word>();
            let op = match &t.op {
                Op::S(i, w) => Op::S(*i, relabel(w)),
                Op::DetInv(w) => Op::DetInv(relabel(w)),
                Op::One => Op::One,
            };
            terms.push(Term { profile, bexp, op, coeff: t.coeff });
        }
        InvariantFn { arity: k, terms }.canonical(dim)
    }

    /// f-hat with f-hat(x_1..x_(m+1)) = f(x_1..x_j x_(j+1)..x_(m+1)).
    pub fn fold(&self, j: usize, dim: usize) -> InvariantFn {
        assert!(j < self.arity);
        let shift = |s: usize| if s > j { s + 1 } else { s };
        let mut terms = Vec::new();
        for t in &self.terms {
            let cases: &[(Profile, Profile)] = match t.profile[j] {
                Profile::One => &[(Profile::One, Profile::One), (Profile::C, Profile::C)],
                Profile::C => &[(Profile::One, Profile::C), (Profile::C, Profile::One)],
                Profile::Any => &[(Profile::Any, Profile::Any)],
            };
            for &(px, py) in cases {
                let mut profile = Vec::with_capacity(self.arity + 1);
                let mut bexp = Vec::with_capacity(self.arity + 1);
                for s in 0..self.arity {
                    if s == j {
                        profile.extend([px, py]);
                        bexp.extend([t.bexp[s], t.bexp[s]]);
                    } else {
                        profile.push(t.profile[s]);
                        bexp.push(t.bexp[s]);
                    }
                }
                let mut power = 0i64;
                let mut subst = |w: &Word| -> Word {
                    let mut out = Vec::new();
                    for x in w {
                        if x.slot != j {
                            out.push(l(x.kind, shift(x.slot)));
                            continue;
                        }
                        let (lx, ly) = (j, j + 1);
                        let (part, e): (Vec<Letter>, i64) = match (px, py, x.kind) {
                            (Profile::One, Profile::One, G) => (vec![l(G, lx), l(G, ly)], 0),
                            (Profile::One, Profile::One, GInv) => (vec![l(GInv, ly), l(GInv, lx)], 0),
                            (Profile::One, Profile::One, GT) => (vec![l(GT, ly), l(GT, lx)], 0),
                            (Profile::One, Profile::One, GInvT) => (vec![l(GInvT, lx), l(GInvT, ly)], 0),
                            (Profile::C, Profile::C, G) => (vec![l(H, lx), l(HInvT, ly)], 1),
                            (Profile::C, Profile::C, GInv) => (vec![l(HT, ly), l(HInv, lx)], -1),
                            (Profile::C, Profile::C, GT) => (vec![l(HInv, ly), l(HT, lx)], 1),
                            (Profile::C, Profile::C, GInvT) => (vec![l(HInvT, lx), l(H, ly)], -1),
                            (Profile::One, Profile::C, H) => (vec![l(G, lx), l(H, ly)], 0),
                            (Profile::One, Profile::C, HInv) => (vec![l(HInv, ly), l(GInv, lx)], 0),
                            (Profile::One, Profile::C, HT) => (vec![l(HT, ly), l(GT, lx)], 0),
                            (Profile::One, Profile::C, HInvT) => (vec![l(GInvT, lx), l(HInvT, ly)], 0),
                            (Profile::C, Profile::One, H) => (vec![l(H, lx), l(GInvT, ly)], 1),
                            (Profile::C, Profile::One, HInv) => (vec![l(GT, ly), l(HInv, lx)], -1),
                            (Profile::C, Profile::One, HT) => (vec![l(GInv, ly), l(HT, lx)], 1),
                            (Profile::C, Profile::One, HInvT) => (vec![l(HInvT, lx), l(G, ly)], -1),
                            _ => unreachable!("letter {x:?} in a slot of the wrong profile"),
                        };
                        out.extend(part);
                        power += e;
                    }
                    out
                };
                let (op, total) = match &t.op {
                    Op::S(i, w) => {
                        let w = subst(w);
                        (Op::S(*i, w), power * *i as i64)
                    }
                    Op::DetInv(w) => {
                        let w = subst(w);
                        (Op::DetInv(w), -power * dim as i64)
                    }
                    Op::One => (Op::One, 0),
                };
                // a_z carries s = (-1)^(n-1) b_y^(1-n) when both factors are in the c-coset,
                // and Y_z carries b_y^(1-n) for (c, 1)
                let mut coeff = t.coeff;
                if (px, py) == (Profile::C, Profile::C) && (dim - 1) % 2 == 1 && total.rem_euclid(2) == 1 {
                    coeff = -coeff;
                }
                if matches!((px, py), (Profile::C, Profile::C) | (Profile::C, Profile::One)) {
                    bexp[j + 1] += (1 - dim as i64) * total;
                }
                terms.push(Term { profile, bexp, op, coeff });
            }
        }
        InvariantFn { arity: self.arity + 1, terms }.canonical(dim)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (c, suffix) = match self.kind {
            G => ('g', ""),
            GInv => ('g', "^-1"),
            GT => ('g', "^t"),
            GInvT => ('g', "^-t"),
            H => ('h', ""),
            HInv => ('h', "^-1"),
            HT => ('h', "^t"),
            HInvT => ('h', "^-t"),
        };
        write!(f, "{c}{}{suffix}", self.slot + 1)
    }
}

fn word_str(w: &Word) -> String {
    w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for InvariantFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, t) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let prof: String = t
                .profile
                .iter()
                .map(|p| match p {
                    Profile::One => '1',
                    Profile::C => 'c',
                    Profile::Any => '*',
                })
                .collect();
            if t.coeff != 1 {
                write!(f, "{}*", t.coeff)?;
            }
            for (k, &e) in t.bexp.iter().enumerate() {
                if e != 0 {
                    write!(f, "b{}^{}*", k + 1, e)?;
                }
            }
            match &t.op {
                Op::S(i, w) => write!(f, "s{i}({})", word_str(w))?,
                Op::DetInv(w) => write!(f, "det^-1({})", word_str(w))?,
                Op::One => write!(f, "1")?,
            }
            write!(f, "[{prof}]")?;
        }
        Ok(())
    }
}

fn letter_matrix(g: &CuGroup, x: &CuElement, kind: LetterKind) -> Matrix {
    let base = if kind.on_c() { g.y_form(x) } else { x.a.clone() };
    match kind {
        G | H => base,
        GInv | HInv => base.inverse().expect("invertible"),
        GT | HT => base.transpose(),
        GInvT | HInvT => base.inverse().expect("invertible").transpose(),
    }
}

/// Evaluates f on a tuple of CU elements.
pub fn eval_invariant(g: &CuGroup, f: &InvariantFn, xs: &[&CuElement]) -> Elem {
    assert_eq!(xs.len(), f.arity, "tuple length must equal the arity");
    let field = g.field();
    let mut cache: HashMap<Letter, Matrix> = HashMap::new();
    let mut total = field.zero();
    for t in &f.terms {
        if !t.profile.iter().zip(xs).all(|(p, x)| p.admits(x.coset)) {
            continue;
        }
        let mut word = |w: &Word| {
            w.iter().fold(Matrix::identity(field, g.n()), |acc, x| {
                let m = cache.entry(*x).or_insert_with(|| letter_matrix(g, xs[x.slot], x.kind));
                acc.mul(m)
            })
        };
        let mut v = match &t.op {
            Op::S(i, w) => word(w).char_poly_coeffs().expect("square")[i - 1].clone(),
            Op::DetInv(w) => word(w).det().expect("square").inv().expect("invertible"),
            Op::One => field.one(),
        };
        for (k, &e) in t.bexp.iter().enumerate() {
            if e != 0 {
                v = v.mul(&xs[k].b.pow(e).expect("unit"));
            }
        }
        total = total.add(&v.mul(&field.from_int(t.coeff)));
    }
    total
}

/// Evaluates f on raw coordinates (g, mu, coset), substituting g mu^(1-n)
/// and mu^2.
pub fn eval_invariant_raw(g: &CuGroup, f: &InvariantFn, raws: &[(Matrix, Elem, bool)]) -> Elem {
    let n = g.n() as i64;
    let xs: Vec<CuElement> = raws
        .iter()
        .map(|(m, mu, c)| CuElement { a: m.scale(&mu.pow(1 - n).expect("unit")), b: mu.mul(mu), coset: *c })
        .collect();
    eval_invariant(g, f, &xs.iter().collect::<Vec<_>>())
}

/// Symbols of the generator alphabet for a coset profile.
fn symbols(profile: &[bool]) -> Vec<Word> {
    let mut out = Vec::new();
    for (k, &c) in profile.iter().enumerate() {
        if !c {
            out.push(vec![l(G, k)]);
            out.push(vec![l(GInv, k)]);
        }
    }
    let cs: Vec<usize> = (0..profile.len()).filter(|&k| profile[k]).collect();
    for &k in &cs {
        for &m in &cs {
            if k != m {
                out.push(vec![l(H, k), l(HInv, m)]);
            }
            out.push(vec![l(H, k), l(HInvT, m)]);
            out.push(vec![l(HT, m), l(HInv, k)]);
        }
    }
    out
}

/// All coset profiles of the given arity.
pub fn profiles(arity: usize) -> Vec<Vec<bool>> {
    (0..1usize << arity).map(|m| (0..arity).map(|k| m >> k & 1 == 1).collect()).collect()
}

/// Generator-style invariants of one coset profile: s_i of reduced words of
/// at most `word_cap` symbols using every slot, plus det^-1 and b^(+-1) in
/// arity one.
pub fn generators_for(dim: usize, profile: &[bool], word_cap: usize) -> Vec<InvariantFn> {
    let arity = profile.len();
    let prof: Vec<Profile> = profile.iter().map(|&c| if c { Profile::C } else { Profile::One }).collect();
    let zero = vec![0; arity];
    let mut out = Vec::new();
    if arity == 1 {
        for e in [1, -1] {
            out.push(InvariantFn::single(1, prof.clone(), vec![e], Op::One, dim));
        }
        if !profile[0] {
            out.push(InvariantFn::single(1, prof.clone(), zero.clone(), Op::DetInv(vec![l(G, 0)]), dim));
        }
    }
    let syms = symbols(profile);
    let mut words: BTreeSet<Word> = BTreeSet::new();
    let mut frontier: Vec<Word> = vec![vec![]];
    for _ in 0..word_cap {
        let mut next = Vec::new();
        for w in &frontier {
            for s in &syms {
                let cand = [w.as_slice(), s.as_slice()].concat();
                let red = reduce_word(&cand, false);
                if red.len() < cand.len() {
                    continue;
                }
                next.push(cand);
            }
        }
        for w in &next {
            let r = reduce_word(w, true);
            let used: BTreeSet<usize> = r.iter().map(|x| x.slot).collect();
            if used.len() == arity {
                words.insert(r);
            }
        }
        frontier = next;
    }
    for w in words {
        for i in 1..=dim {
            out.push(InvariantFn::single(arity, prof.clone(), zero.clone(), Op::S(i, w.clone()), dim));
        }
    }
    out
}

pub fn generators(dim: usize, arity: usize, word_cap: usize) -> Vec<InvariantFn> {
    profiles(arity).iter().flat_map(|p| generators_for(dim, p, word_cap)).collect()
}

type Key = (InvariantFn, Vec<usize>);
type RingMap = Arc<dyn Fn(&Elem) -> Elem + Send + Sync>;

#[derive(Clone)]
pub enum Source {
    Rep(CuRep),
    Table(Arc<HashMap<Key, Elem>>),
    Push(Arc<Pseudochar>, RingMap),
}

/// A lazily evaluated table (arity, f, tuple) -> value with optional
/// overriding entries.
pub struct Pseudochar {
    pub model: Arc<GaloisModel>,
    pub field: Field,
    pub dim: usize,
    source: Source,
    overrides: HashMap<Key, Elem>,
    memo: Mutex<HashMap<Key, Elem>>,
}

impl fmt::Debug for Pseudochar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pseudochar(dim {}, {}, {} overrides)", self.dim, self.field.describe(), self.overrides.len())
    }
}

pub fn pseudochar_of_rep(r: &CuRep) -> Pseudochar {
    Pseudochar {
        model: r.model.clone(),
        field: r.group().field().clone(),
        dim: r.n(),
        source: Source::Rep(r.clone()),
        overrides: HashMap::new(),
        memo: Mutex::new(HashMap::new()),
    }
}

/// Composes the values of theta with h; `target` is the codomain of h.
pub fn pushforward(theta: &Arc<Pseudochar>, h: impl Fn(&Elem) -> Elem + Send + Sync + 'static, target: &Field) -> Pseudochar {
    Pseudochar {
        model: theta.model.clone(),
        field: target.clone(),
        dim: theta.dim,
        source: Source::Push(theta.clone(), Arc::new(h)),
        overrides: HashMap::new(),
        memo: Mutex::new(HashMap::new()),
    }
}

impl Pseudochar {
    pub fn from_table(model: &Arc<GaloisModel>, field: &Field, dim: usize, table: HashMap<Key, Elem>) -> Pseudochar {
        Pseudochar {
            model: model.clone(),
            field: field.clone(),
            dim,
            source: Source::Table(Arc::new(table)),
            overrides: HashMap::new(),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    /// Replaces one table entry, for fault injection.
    pub fn with_override(mut self, f: InvariantFn, tuple: Vec<usize>, v: Elem) -> Pseudochar {
        self.overrides.insert((f, tuple), v);
        self
    }

    pub fn overrides(&self) -> impl Iterator<Item = &(InvariantFn, Vec<usize>)> {
        self.overrides.keys()
    }

    /// Theta_m(f)(gamma); None when a table source lacks the entry.
    pub fn value(&self, f: &InvariantFn, tuple: &[usize]) -> Option<Elem> {
        assert_eq!(f.arity, tuple.len());
        let key = (f.clone(), tuple.to_vec());
        if let Some(v) = self.overrides.get(&key) {
            return Some(v.clone());
        }
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Some(v.clone());
        }
        let v = match &self.source {
            Source::Rep(r) => {
                let xs: Vec<&CuElement> = tuple.iter().map(|&g| r.image(g)).collect();
                eval_invariant(r.group(), f, &xs)
            }
            Source::Table(t) => t.get(&key)?.clone(),
            Source::Push(inner, h) => h(&inner.value(f, tuple)?),
        };
        self.memo.lock().unwrap().insert(key, v.clone());
        Some(v)
    }

    fn product(&self, a: usize, b: usize) -> usize {
        self.model.mul(a, b)
    }

    /// JSON lines, one record per (arity, descriptor, tuple, value).
    pub fn dump_jsonl(&self, fs: &[InvariantFn], tuples_of: impl Fn(usize) -> Vec<Vec<usize>>) -> String {
        let mut out = String::new();
        for f in fs {
            for t in tuples_of(f.arity) {
                if let Some(v) = self.value(f, &t) {
                    let rec = serde_json::json!({"arity": f.arity, "f": f.to_string(), "tuple": t, "value": v.to_string()});
                    out.push_str(&rec.to_string());
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// All tuples of length k when there are at most `cap`, otherwise `cap`
/// seeded samples.
pub fn tuples(order: usize, k: usize, cap: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let total = (order as u128).pow(k as u32);
    if total <= cap as u128 {
        (0..total as usize)
            .map(|mut code| {
                (0..k)
                    .map(|_| {
                        let d = code % order;
                        code /= order;
                        d
                    })
                    .collect()
            })
            .collect()
    } else {
        (0..cap).map(|_| (0..k).map(|_| rng.gen_range(0..order)).collect()).collect()
    }
}

/// All maps [m] -> [k].
pub fn all_maps(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out.into_iter().flat_map(|v: Vec<usize>| (0..k).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

#[derive(Debug, Clone)]
pub struct FfsBudget {
    /// word caps for the seed invariants of arity 1, 2, 3
    pub word_caps: [usize; 3],
    /// seed invariants kept per arity at most (arity one keeps all)
    pub seeds_per_arity: usize,
    pub max_arity: usize,
    pub tuple_cap: usize,
    pub seed: u64,
}

impl Default for FfsBudget {
    fn default() -> FfsBudget {
        FfsBudget { word_caps: [4, 2, 2], seeds_per_arity: 24, max_arity: 3, tuple_cap: 512, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterExample {
    pub morphism: String,
    pub f: InvariantFn,
    pub tuple: Vec<usize>,
    pub lhs: Elem,
    pub rhs: Elem,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FfsReport {
    pub instances: usize,
    pub maps_covered: usize,
    pub maps_total: usize,
    pub folds_covered: usize,
    pub folds_total: usize,
    pub counterexample: Option<CounterExample>,
}

impl FfsReport {
    pub fn ok(&self) -> bool {
        self.counterexample.is_none()
    }
}

pub fn seed_invariants(dim: usize, budget: &FfsBudget, rng: &mut ChaCha8Rng) -> Vec<InvariantFn> {
    let mut seeds = Vec::new();
    for arity in 1..=budget.max_arity {
        let mut g = generators(dim, arity, budget.word_caps[arity - 1]);
        if arity > 1 && g.len() > budget.seeds_per_arity {
            // keep every profile represented
            let mut kept = Vec::new();
            let per = (budget.seeds_per_arity / (1 << arity)).max(1);
            for p in profiles(arity) {
                let prof: Vec<Profile> = p.iter().map(|&c| if c { Profile::C } else { Profile::One }).collect();
                let mut of: Vec<InvariantFn> = g.iter().filter(|f| f.terms[0].profile == prof).cloned().collect();
                for _ in 0..per.min(of.len()) {
                    let i = rng.gen_range(0..of.len());
                    kept.push(of.swap_remove(i));
                }
            }
            g = kept;
        }
        seeds.extend(g);
    }
    seeds
}

/// Checks the pull-back condition (a) for every map [m] -> [k] and the fold
/// condition (b) at every position, with m, k at most the arity cap, plus the
/// inclusion [m] -> [m+1] at every overridden entry.
pub fn check_ffs(theta: &Pseudochar, budget: &FfsBudget) -> FfsReport {
    let mut rng: ChaCha8Rng = rand::SeedableRng::seed_from_u64(budget.seed);
    let dim = theta.dim;
    let order = theta.model.order();
    let seeds = seed_invariants(dim, budget, &mut rng);
    let mut rep = FfsReport::default();
    let max = budget.max_arity;
    let mut tuple_cache: HashMap<usize, Vec<Vec<usize>>> = HashMap::new();
    let mut tuples_for = |k: usize, rng: &mut ChaCha8Rng| tuple_cache.entry(k).or_insert_with(|| tuples(order, k, budget.tuple_cap, rng)).clone();
    let compare = |rep: &mut FfsReport, morphism: &str, f: &InvariantFn, t: &[usize], lhs: Option<Elem>, rhs: Option<Elem>| -> bool {
        let (Some(lhs), Some(rhs)) = (lhs, rhs) else { return false };
        rep.instances += 1;
        if lhs != rhs {
            rep.counterexample = Some(CounterExample { morphism: morphism.into(), f: f.clone(), tuple: t.to_vec(), lhs, rhs });
            return true;
        }
        false
    };
    for m in 1..=max {
        for k in 1..=max {
            for zeta in all_maps(m, k) {
                rep.maps_total += 1;
                let fs: Vec<&InvariantFn> = seeds.iter().filter(|f| f.arity == m).collect();
                if !fs.is_empty() {
                    rep.maps_covered += 1;
                }
                let ts = tuples_for(k, &mut rng);
                for f in fs {
                    let fz = f.pull(&zeta, k, dim);
                    for t in &ts {
                        let pulled: Vec<usize> = zeta.iter().map(|&z| t[z]).collect();
                        let name = format!("zeta {zeta:?}: [{m}] -> [{k}]");
                        if compare(&mut rep, &name, &fz, t, theta.value(&fz, t), theta.value(f, &pulled)) {
                            return rep;
                        }
                    }
                }
            }
        }
    }
    for m in 1..max {
        for j in 0..m {
            rep.folds_total += 1;
            let fs: Vec<&InvariantFn> = seeds.iter().filter(|f| f.arity == m).collect();
            if !fs.is_empty() {
                rep.folds_covered += 1;
            }
            let ts = tuples_for(m + 1, &mut rng);
            for f in fs {
                let hat = f.fold(j, dim);
                for t in &ts {
                    let mut folded: Vec<usize> = t[..j].to_vec();
                    folded.push(theta.product(t[j], t[j + 1]));
                    folded.extend_from_slice(&t[j + 2..]);
                    let name = format!("fold x{0} -> x{0} x{1} at arity {m}", j + 1, j + 2);
                    if compare(&mut rep, &name, &hat, t, theta.value(&hat, t), theta.value(f, &folded)) {
                        return rep;
                    }
                }
            }
        }
    }
    let targets: Vec<Key> = theta.overrides.keys().cloned().collect();
    for (f, t) in targets {
        let m = f.arity;
        let zeta: Vec<usize> = (0..m).collect();
        let up = f.pull(&zeta, m + 1, dim);
        for extra in 0..order {
            let mut t2 = t.clone();
            t2.push(extra);
            let name = format!("inclusion [{m}] -> [{}]", m + 1);
            if compare(&mut rep, &name, &up, &t2, theta.value(&up, &t2), theta.value(&f, &t)) {
                return rep;
            }
        }
    }
    rep
}

/// True iff every listed value is integral: denominator-free power-basis
/// coordinates in a cyclotomic field, an integer in Q.
pub fn values_integral(theta: &Pseudochar, fs: &[InvariantFn], tuple_cap: usize, seed: u64) -> bool {
    let mut rng: ChaCha8Rng = rand::SeedableRng::seed_from_u64(seed);
    fs.iter().all(|f| tuples(theta.model.order(), f.arity, tuple_cap, &mut rng).iter().all(|t| theta.value(f, t).map(|v| v.is_integral()).unwrap_or(true)))
}

// ---------------------------------------------------------------- l-adic family

#[derive(Debug, Clone)]
pub struct LadicTables {
    pub precisions: Vec<u32>,
    pub keys: Vec<Key>,
    /// tables[i][j]: value of keys[j] at precisions[i]
    pub tables: Vec<Vec<Elem>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadicReport {
    pub entries: usize,
    pub violations: Vec<(u32, u32, usize)>,
    pub reassembly_exact: bool,
}

impl LadicReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.reassembly_exact
    }
}

/// The family r_m o Theta for each precision m, on the given keys.
pub fn ladic_family(theta: &Arc<Pseudochar>, precisions: &[u32], keys: Vec<Key>) -> LadicTables {
    let tables = precisions
        .iter()
        .map(|&m| {
            let target = match &theta.field {
                Field::LAdic { l, .. } => Field::ladic(*l, m).expect("valid precision"),
                f => f.clone(),
            };
            let p = pushforward(theta, move |x| x.ring_reduce(m).expect("precision within range"), &target);
            keys.iter().map(|(f, t)| p.value(f, t).expect("value")).collect()
        })
        .collect();
    LadicTables { precisions: precisions.to_vec(), keys, tables }
}

impl LadicTables {
    /// Pairs (m, m', entry) where reducing the precision-m' value to m
    /// disagrees with the precision-m value.
    pub fn violations(&self) -> Vec<(u32, u32, usize)> {
        let mut out = Vec::new();
        for a in 0..self.precisions.len() {
            for b in a + 1..self.precisions.len() {
                let (m, m2) = (self.precisions[a], self.precisions[b]);
                for j in 0..self.keys.len() {
                    if self.tables[b][j].ring_reduce(m).ok() != Some(self.tables[a][j].clone()) {
                        out.push((m, m2, j));
                    }
                }
            }
        }
        out
    }

    /// Rebuilds the top-precision values by lifting digit blocks from the
    /// coarsest table upwards.
    pub fn reassemble(&self) -> Option<Vec<u64>> {
        let (l, _) = match self.tables.first()?.first()? {
            Elem::LAdic(x) => (x.prime(), x.precision()),
            _ => return None,
        };
        let mut out = Vec::with_capacity(self.keys.len());
        for j in 0..self.keys.len() {
            let mut acc: u64 = 0;
            let mut prev_m = 0u32;
            for (i, &m) in self.precisions.iter().enumerate() {
                let Elem::LAdic(x) = &self.tables[i][j] else { return None };
                let modulus = l.pow(m);
                let diff = (x.value() + modulus - acc % modulus) % modulus;
                if diff % l.pow(prev_m) != 0 {
                    return None;
                }
                acc += diff;
                prev_m = m;
            }
            out.push(acc);
        }
        Some(out)
    }

    pub fn report(&self) -> LadicReport {
        let top = self.tables.last().map(|t| t.iter().map(|v| if let Elem::LAdic(x) = v { x.value() } else { u64::MAX }).collect::<Vec<_>>());
        let reassembly_exact = matches!((self.reassemble(), top), (Some(a), Some(b)) if a == b);
        LadicReport { entries: self.keys.len(), violations: self.violations(), reassembly_exact }
    }
}

/// Keys: generators of arity at most `max_arity` and word cap `word_cap` on
/// every tuple of matching profile.
pub fn profile_keys(model: &GaloisModel, dim: usize, max_arity: usize, word_cap: usize) -> Vec<Key> {
    let mut keys = Vec::new();
    for arity in 1..=max_arity {
        for p in profiles(arity) {
            let ts = profile_tuples(model, &p);
            for f in generators_for(dim, &p, word_cap) {
                for t in &ts {
                    keys.push((f.clone(), t.clone()));
                }
            }
        }
    }
    keys
}

/// ladic_limit_demo: precisions strictly increasing, the last equal to the
/// precision of the ring.
pub fn ladic_limit_demo(r: &CuRep, precisions: &[u32], max_arity: usize, word_cap: usize) -> (LadicTables, LadicReport) {
    let theta = Arc::new(pseudochar_of_rep(r));
    let keys = profile_keys(&r.model, r.n(), max_arity, word_cap);
    let fam = ladic_family(&theta, precisions, keys);
    let rep = fam.report();
    (fam, rep)
}

/// Tuples whose cosets follow the profile.
pub fn profile_tuples(model: &GaloisModel, profile: &[bool]) -> Vec<Vec<usize>> {
    let g0 = model.gamma0();
    let g1: Vec<usize> = model.elements().filter(|&g| !model.in_gamma0(g)).collect();
    let mut out = vec![vec![]];
    for &c in profile {
        let pool = if c { &g1 } else { &g0 };
        out = out.into_iter().flat_map(|t: Vec<usize>| pool.iter().map(move |&x| [t.clone(), vec![x]].concat())).collect();
    }
    out
}

// ---------------------------------------------------------------- oracle

#[derive(Debug, Clone)]
pub struct OracleCaps {
    pub arity_cap: usize,
    pub word_cap: usize,
    /// evaluations allowed in the higher-arity enumeration
    pub eval_budget: usize,
    /// coefficient vectors tried in the quadratic conjugator stage
    pub search_budget: usize,
}

impl Default for OracleCaps {
    fn default() -> OracleCaps {
        OracleCaps { arity_cap: 3, word_cap: 4, eval_budget: 2_000_000, search_budget: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Match(CuElement),
    Distinguished { f: InvariantFn, tuple: Vec<usize>, v1: Elem, v2: Elem },
    AgreeUpToArity(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConjugatorSearch {
    Found(CuElement),
    /// Exhaustive over a finite field, or the linear stage is empty.
    NonConjugate,
    Inconclusive,
}

fn scalar_ratio(m: &Matrix, y: &Matrix) -> Option<Elem> {
    let (i, j) = (0..y.rows()).flat_map(|i| (0..y.cols()).map(move |j| (i, j))).find(|&(i, j)| !y.get(i, j).is_zero())?;
    let r = m.get(i, j).div(y.get(i, j))?;
    (!r.is_zero() && *m == y.scale(&r)).then_some(r)
}

/// Finds (k, beta) with (k, beta) R1 (k, beta)^-1 = R2.
///
/// Linear stage: pairs (k, m) with k a1(d) = a2(d) k, m a1(d)^-t = a2(d)^-t m
/// on Gamma0 and k Y1 = Y2 m at c~; this is the endomorphism space of the
/// Gamma-module underlying R, much smaller than the Gamma0-commutant.
/// Quadratic stage: k m^t = r I on that span, so that k Y1 k^t = r Y2,
/// then t^2 r beta^(n-1) = 1 for a rescaling t.
pub fn find_cu_conjugator(r1: &CuRep, r2: &CuRep, budget: usize) -> ConjugatorSearch {
    let g = r1.group();
    let model = &r1.model;
    let n = r1.n();
    let field = g.field().clone();
    if r1.d_values() != r2.d_values() {
        return ConjugatorSearch::NonConjugate;
    }
    let c = model.c_tilde();
    let (y1, y2) = (g.y_form(r1.image(c)), g.y_form(r2.image(c)));
    let zero = Matrix::zeros(&field, n, n);
    let id = Matrix::identity(&field, n);
    let pair = |a: &Matrix| Matrix::block_diag(&[a, &a.inverse().expect("invertible").transpose()]);
    let mut xs: Vec<Matrix> = model.gamma0().iter().map(|&d| pair(&r2.image(d).a)).collect();
    let mut ys: Vec<Matrix> = model.gamma0().iter().map(|&d| pair(&r1.image(d).a)).collect();
    // block-diagonal shape and the coupling k Y1 = Y2 m
    let e = Matrix::block_diag(&[&id, &zero]);
    xs.push(e.clone());
    ys.push(e);
    xs.push(Matrix::from_blocks(&zero, &y2, &zero, &zero));
    ys.push(Matrix::from_blocks(&zero, &y1, &zero, &zero));
    let basis = match intertwiner_space(&xs, &ys) {
        Ok(b) => b,
        Err(_) => return ConjugatorSearch::Inconclusive,
    };
    if basis.is_empty() {
        return ConjugatorSearch::NonConjugate;
    }
    let verify = |k: &Matrix, beta: &Elem| -> Option<CuElement> {
        let h = CuElement { a: k.clone(), b: beta.clone(), coset: false };
        model.elements().all(|x| g.conjugate(&h, r1.image(x)).ok().as_ref() == Some(r2.image(x))).then_some(h)
    };
    let scalings: Vec<Elem> = match field.size() {
        Some(q) if q <= 4096 => (1..q as i64).map(|v| field.from_int(v)).collect(),
        _ => grid_values(&field, 9).into_iter().filter(|v| !v.is_zero()).collect(),
    };
    // rescale k Y1 k^t = r Y2 to an actual conjugator
    let finish = |k: &Matrix, r: &Elem| -> Option<CuElement> {
        if let Ok(t) = field_sqrt(&r.inv()?) {
            if let Some(h) = verify(&k.scale(&t), &field.one()) {
                return Some(h);
            }
        }
        for t in &scalings {
            let target = t.mul(t).mul(r).inv()?;
            let betas = if n == 1 {
                if target.is_one() {
                    vec![field.one()]
                } else {
                    vec![]
                }
            } else {
                field_roots(&target, (n - 1) as u32)
            };
            for beta in betas {
                if let Some(h) = verify(&k.scale(t), &beta) {
                    return Some(h);
                }
            }
        }
        None
    };
    let try_k = |km: &Matrix| -> Option<CuElement> {
        let k = km.submatrix(0, 0, n, n);
        let m = km.submatrix(n, n, n, n);
        let r = scalar_ratio(&k.mul(&m.transpose()), &id)?;
        finish(&k, &r)
    };
    if let Some(q) = field.size() {
        if let Some(h) = random_polynomial_search(&basis, n, &y1, &y2, q, budget, &finish) {
            return ConjugatorSearch::Found(h);
        }
    }
    let d = basis.len();
    let combo = |coeffs: &[Elem]| coeffs.iter().zip(&basis).fold(Matrix::zeros(&field, 2 * n, 2 * n), |acc, (c, b)| if c.is_zero() { acc } else { acc.add(&b.scale(c)) });
    if let Some(q) = field.size() {
        let count = (0..d).try_fold(1u128, |acc, _| acc.checked_mul(q as u128));
        if let Some(total) = count.filter(|&t| t / (q as u128 - 1).max(1) <= budget as u128) {
            // projective enumeration: first nonzero coordinate equal to one
            let _ = total;
            let mut coeffs = vec![field.zero(); d];
            for lead in 0..d {
                let free = d - lead - 1;
                let n_free = (q as u128).pow(free as u32);
                for code in 0..n_free {
                    let mut code = code;
                    for c in coeffs.iter_mut() {
                        *c = field.zero();
                    }
                    coeffs[lead] = field.one();
                    for slot in coeffs.iter_mut().skip(lead + 1) {
                        *slot = field.from_int((code % q as u128) as i64);
                        code /= q as u128;
                    }
                    if let Some(h) = try_k(&combo(&coeffs)) {
                        return ConjugatorSearch::Found(h);
                    }
                }
            }
            return ConjugatorSearch::NonConjugate;
        }
    }
    let vals = grid_values(&field, 2 * n + 2);
    let mut found = None;
    let mut tried = 0usize;
    simplex_tuples(d, 2 * n + 1, &mut |t| {
        tried += 1;
        if tried > budget {
            return true;
        }
        let coeffs: Vec<Elem> = t.iter().map(|&k| vals[k].clone()).collect();
        found = try_k(&combo(&coeffs));
        found.is_some()
    });
    match found {
        Some(h) => ConjugatorSearch::Found(h),
        None => ConjugatorSearch::Inconclusive,
    }
}

/// Random k in the linear span, then u = f(z) in F[z] for
/// z = k Y1 k^t Y2^-1 with f(z)^2 z scalar. z is symmetric for the
/// anti-involution u -> Y2 u^t Y2^-1 of the commutant, so u k is a
/// solution of the quadratic stage.
fn random_polynomial_search(
    basis: &[Matrix],
    n: usize,
    y1: &Matrix,
    y2: &Matrix,
    q: u64,
    budget: usize,
    finish: &dyn Fn(&Matrix, &Elem) -> Option<CuElement>,
) -> Option<CuElement> {
    let field = y1.field().clone();
    let id = Matrix::identity(&field, n);
    let y2_inv = y2.inverse()?;
    let mut rng: ChaCha8Rng = rand::SeedableRng::seed_from_u64(0);
    let mut spent = 0usize;
    for _ in 0..64 {
        let k = basis
            .iter()
            .fold(Matrix::zeros(&field, n, n), |acc, b| acc.add(&b.submatrix(0, 0, n, n).scale(&field.from_int(rng.gen_range(0..q as i64)))));
        if !k.is_invertible() {
            continue;
        }
        let z = k.mul(y1).mul(&k.transpose()).mul(&y2_inv);
        // a basis of F[z]
        let mut powers = vec![id.clone()];
        let mut rref = crate::matrix::Rref::new(&field, n * n);
        rref.push(id.entries().to_vec());
        loop {
            let next = powers.last().unwrap().mul(&z);
            if !rref.push(next.entries().to_vec()) {
                break;
            }
            powers.push(next);
        }
        let d = powers.len();
        let total = (q as u128).pow(d as u32);
        for code in 1..total {
            spent += 1;
            if spent > budget {
                return None;
            }
            let mut c = code;
            let mut u = Matrix::zeros(&field, n, n);
            let mut lead_one = true;
            for p in &powers {
                let v = (c % q as u128) as i64;
                c /= q as u128;
                if v != 0 {
                    u = u.add(&p.scale(&field.from_int(v)));
                }
            }
            // projective: the lowest nonzero digit is one
            let mut c = code;
            while c % q as u128 == 0 {
                c /= q as u128;
            }
            if c % q as u128 != 1 {
                lead_one = false;
            }
            if !lead_one {
                continue;
            }
            if let Some(r) = scalar_ratio(&u.mul(&u).mul(&z), &id) {
                if let Some(h) = finish(&u.mul(&k), &r) {
                    return Some(h);
                }
            }
        }
    }
    None
}

fn first_difference(
    r1: &CuRep,
    r2: &CuRep,
    fs: &[InvariantFn],
    ts: &[Vec<usize>],
    spent: &mut usize,
    budget: usize,
) -> Result<Option<OracleVerdict>, ()> {
    let (g1, g2) = (r1.group(), r2.group());
    for f in fs {
        for t in ts {
            *spent += 1;
            if *spent > budget {
                return Err(());
            }
            let x1: Vec<&CuElement> = t.iter().map(|&x| r1.image(x)).collect();
            let x2: Vec<&CuElement> = t.iter().map(|&x| r2.image(x)).collect();
            let (v1, v2) = (eval_invariant(g1, f, &x1), eval_invariant(g2, f, &x2));
            if v1 != v2 {
                return Ok(Some(OracleVerdict::Distinguished { f: f.clone(), tuple: t.clone(), v1, v2 }));
            }
        }
    }
    Ok(None)
}

/// Arity-one invariants first, then the conjugator search, then the
/// higher-arity generators up to the caps.
pub fn distinguish_or_match(r1: &CuRep, r2: &CuRep, caps: &OracleCaps) -> OracleVerdict {
    let model = &r1.model;
    let dim = r1.n();
    if r2.n() != dim {
        let id = model.identity();
        let f = InvariantFn::s(1, dim);
        let (v1, v2) = (r1.group().field().from_int(dim as i64), r2.group().field().from_int(r2.n() as i64));
        return OracleVerdict::Distinguished { f, tuple: vec![id], v1, v2 };
    }
    let mut spent = 0usize;
    for p in profiles(1) {
        let fs = generators_for(dim, &p, caps.word_cap);
        let ts = profile_tuples(model, &p);
        if let Ok(Some(v)) = first_difference(r1, r2, &fs, &ts, &mut spent, usize::MAX) {
            return v;
        }
    }
    if let ConjugatorSearch::Found(h) = find_cu_conjugator(r1, r2, caps.search_budget) {
        return OracleVerdict::Match(h);
    }
    for arity in 2..=caps.arity_cap {
        for p in profiles(arity) {
            let fs = generators_for(dim, &p, caps.word_cap);
            let ts = profile_tuples(model, &p);
            match first_difference(r1, r2, &fs, &ts, &mut spent, caps.eval_budget) {
                Ok(Some(v)) => return v,
                Ok(None) => {}
                Err(()) => return OracleVerdict::AgreeUpToArity(arity - 1),
            }
        }
    }
    OracleVerdict::AgreeUpToArity(caps.arity_cap)
}
