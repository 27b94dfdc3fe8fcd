//! Command-line front end. Each subcommand wraps one library operation and
//! returns a [`RunReport`].

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algebraicity::{
    classify_algebraicity, is_nondegenerate_lds_shape, pairing_symmetry_options, twisting_element, Algebraicity, ArchParam,
    RootDatum, Twisting,
};
use crate::cgroup::GuAction;
use crate::field::{Elem, Field};
use crate::galois::{fixtures, CharacterTable, GaloisModel, Rep};
use crate::gu::{self, BlockLayout, GlobalVerdict, SeparatorSearch};
use crate::lifting::{
    canonical_c_image, descend, lift_with_branches, normalize_c_image, sign_from_image, CuRep, LiftExponent,
};
use crate::matrix::Matrix;
use crate::polarisation::{polarise_irreducible, polarise_semisimple, schur_sign, PolarisedRep, Summand};
use crate::pseudochar::{self, check_ffs, distinguish_or_match, FfsBudget, OracleCaps, OracleVerdict};
use crate::report::{RunReport, Status};

#[derive(Debug, Parser)]
#[command(name = "ucg", version, about = "Exact checks on C-groups of unitary groups")]
pub struct Cli {
    /// rational | cyclo:N | fp:p | ladic:l,M
    #[arg(long, global = true)]
    pub field: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 3)]
    pub arity_cap: usize,
    #[arg(long, global = true, default_value_t = 4)]
    pub word_cap: usize,
    /// report path; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExponentArg {
    OneMinusN,
    NMinusOne,
}

impl From<ExponentArg> for LiftExponent {
    fn from(e: ExponentArg) -> LiftExponent {
        match e {
            ExponentArg::OneMinusN => LiftExponent::OneMinusN,
            ExponentArg::NMinusOne => LiftExponent::NMinusOne,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayoutArg {
    Diagonal,
    AntiDiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ActionArg {
    Standard,
    NoTwist,
    InverseDet,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RepArgs {
    /// group JSON path or bundled name (d4, q8z2, z4z4z2)
    #[arg(long)]
    pub group: String,
    /// representation JSON path; the bundled one when absent
    #[arg(long)]
    pub rep: Option<String>,
    /// lifting character: eps, trivial, auto or a character JSON path
    #[arg(long, default_value = "eps")]
    pub chi: String,
    #[arg(long, value_enum, default_value_t = ExponentArg::OneMinusN)]
    pub exponent: ExponentArg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Galois-stable twisting element for U(n)
    Twisting {
        #[arg(long)]
        n: usize,
    },
    /// Algebraicity of an archimedean parameter "a1,a2,..." (halves as p/2)
    Algebraicity {
        #[arg(long, allow_hyphen_values = true)]
        param: String,
    },
    /// Schur sign of a conjugate self-dual representation
    Sign {
        #[arg(long)]
        group: String,
        #[arg(long)]
        rep: Option<String>,
    },
    /// Lift a polarised representation to a CU-valued one and back
    Lift(RepArgs),
    /// Pseudocharacter of the lift: FFS axioms and integrality
    Pseudochar {
        #[command(flatten)]
        rep: RepArgs,
        /// JSON-lines dump of the arity-one table
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Compatibility of the reductions of the pseudocharacter mod l^m
    Ladic {
        #[command(flatten)]
        rep: RepArgs,
        #[arg(long, default_value_t = 5)]
        l: u64,
        #[arg(long, default_value_t = 3)]
        m: u32,
    },
    /// Match two lifts up to conjugacy or separate them by an invariant
    Oracle {
        #[command(flatten)]
        rep: RepArgs,
        /// second representation; a seeded conjugate of the first when absent
        #[arg(long)]
        rep2: Option<String>,
    },
    /// Locally conjugate, globally non-conjugate pair in CGU_n
    GuWitness {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = LayoutArg::Diagonal)]
        layout: LayoutArg,
        #[arg(long, value_enum, default_value_t = ActionArg::Standard)]
        action: ActionArg,
    },
}

/// Bad flags or unreadable inputs (exit code 2).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("input error: {0}")]
pub struct InputError(pub String);

fn input<E: std::fmt::Display>(e: E) -> InputError {
    InputError(e.to_string())
}

fn field_or(cli: &Cli, default: &str) -> Result<Field, InputError> {
    Field::parse(cli.field.as_deref().unwrap_or(default)).map_err(input)
}

/// A file when it exists, else the bundled fixture named by the file stem.
fn read_source(arg: &str, rep: bool) -> Result<String, InputError> {
    let path = Path::new(arg);
    if path.is_file() {
        return std::fs::read_to_string(path).map_err(input);
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    let name = if rep { stem.strip_suffix("rep").unwrap_or(stem) } else { stem };
    let (g, r) = fixtures::source(name).ok_or_else(|| InputError(format!("no file or bundled fixture '{arg}'")))?;
    Ok(if rep { r } else { g }.to_string())
}

fn load_rep(group: &str, rep: Option<&str>, field: &Field) -> Result<(Arc<GaloisModel>, Rep), InputError> {
    let model = Arc::new(GaloisModel::from_json(&read_source(group, false)?).map_err(input)?);
    let text = read_source(rep.unwrap_or(group), true)?;
    let rho = Rep::from_json(&model, field, &text).map_err(input)?;
    Ok((model, rho))
}

fn chi0_for(chi_lift: &CharacterTable, n: usize, exponent: LiftExponent) -> Vec<Elem> {
    let e = exponent.value(n);
    chi_lift.values().iter().map(|v| v.pow(e).expect("unit")).collect()
}

/// Splits a representation with diagonal images into self-dual characters
/// and pairs psi + (psi^c)^v chi.
fn diagonal_summands(rho: &Rep, chi0: &[Elem]) -> Option<Vec<Summand>> {
    let model = rho.model();
    let g0 = model.gamma0();
    let n = rho.dim();
    if g0.iter().any(|&g| !rho.image(g).is_diagonal()) {
        return None;
    }
    let psi = |i: usize| -> Vec<Elem> { model.elements().map(|g| if model.in_gamma0(g) { rho.image(g).get(i, i).clone() } else { rho.field().one() }).collect() };
    let partner = |p: &[Elem]| -> Vec<Elem> {
        model.elements().map(|g| if model.in_gamma0(g) { p[model.conj_c(g)].inv().expect("unit").mul(&chi0[g]) } else { rho.field().one() }).collect()
    };
    let as_rep = |p: &[Elem]| -> Option<Rep> {
        let images = g0.iter().map(|&g| (g, Matrix::scalar(rho.field(), 1, &p[g]))).collect();
        Rep::new(model, images).ok()
    };
    let mut used = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        let (p, q) = (psi(i), partner(&psi(i)));
        let same = |a: &[Elem], b: &[Elem]| g0.iter().all(|&g| a[g] == b[g]);
        if same(&p, &q) {
            out.push(Summand::SelfDual(as_rep(&p)?));
        } else {
            let j = (0..n).find(|&j| !used[j] && same(&psi(j), &q))?;
            used[j] = true;
            out.push(Summand::Pair(as_rep(&p)?));
        }
    }
    Some(out)
}

fn polarise(rho: &Rep, chi_lift: &CharacterTable, exponent: LiftExponent) -> Result<PolarisedRep, InputError> {
    let chi0 = chi0_for(chi_lift, rho.dim(), exponent);
    polarise_irreducible(rho, &chi0).or_else(|e| {
        diagonal_summands(rho, &chi0)
            .and_then(|s| polarise_semisimple(&s, &chi0, None).ok())
            .ok_or_else(|| InputError(format!("cannot polarise: {e}")))
    })
}

fn chi_lift_for(args: &RepArgs, model: &Arc<GaloisModel>, field: &Field, rho: &Rep) -> Result<CharacterTable, InputError> {
    match args.chi.as_str() {
        "eps" => Ok(CharacterTable::sign(model, field)),
        "trivial" => Ok(CharacterTable::trivial(model, field)),
        "auto" => {
            // the first character compatible with the sign of rho
            let exponent = LiftExponent::from(args.exponent);
            let c = model.c_tilde();
            CharacterTable::enumerate(model, field, false)
                .into_iter()
                .filter_map(|v| CharacterTable::new(model, v).ok())
                .find(|chi| polarise(rho, chi, exponent).map(|p| p.chi.value(c) == chi.value(c)).unwrap_or(false))
                .ok_or_else(|| InputError("no compatible lifting character".into()))
        }
        path => {
            let text = std::fs::read_to_string(path).map_err(input)?;
            CharacterTable::from_json(model, field, &text).map_err(input)
        }
    }
}

struct Lifted {
    model: Arc<GaloisModel>,
    p: PolarisedRep,
    chi_lift: CharacterTable,
    exponent: LiftExponent,
}

fn prepare(args: &RepArgs, field: &Field) -> Result<Lifted, InputError> {
    let (model, rho) = load_rep(&args.group, args.rep.as_deref(), field)?;
    let chi_lift = chi_lift_for(args, &model, field, &rho)?;
    let exponent = LiftExponent::from(args.exponent);
    let p = polarise(&rho, &chi_lift, exponent)?;
    Ok(Lifted { model, p, chi_lift, exponent })
}

fn rep_inputs(cli: &Cli, field: &Field, args: &RepArgs) -> Value {
    json!({
        "field": field.describe(),
        "group": args.group,
        "rep": args.rep,
        "chi": args.chi,
        "exponent": format!("{:?}", args.exponent),
        "arity_cap": cli.arity_cap,
        "word_cap": cli.word_cap,
    })
}

/// Lifts and records the "lift" verdict; None when the lift fails.
fn lift_checked(report: &mut RunReport, l: &Lifted) -> Option<CuRep> {
    match lift_with_branches(&l.p, &l.chi_lift, l.exponent, &|_| false) {
        Ok(r) => {
            report.check("lift", true, json!({"n": r.n(), "images": r.to_json()}));
            Some(r)
        }
        Err(e) => {
            report.check("lift", false, json!(e.to_string()));
            None
        }
    }
}

pub fn run_twisting(cli: &Cli, n: usize) -> Result<RunReport, InputError> {
    if n == 0 {
        return Err(InputError("n must be positive".into()));
    }
    let mut report = RunReport::new("twisting", json!({"n": n}), cli.seed);
    let rd = RootDatum::new(n);
    match twisting_element(n) {
        Twisting::Exists(theta) => {
            let ok = n % 2 == 1
                && rd.simple_coroots().iter().all(|a| RootDatum::pairing(&theta, a) == 1)
                && rd.galois(&theta) == theta;
            report.check("twisting", ok, json!({"result": "Exists", "theta": theta}));
        }
        Twisting::NoneExists { doubled_first } => {
            report.check("twisting", n % 2 == 0, json!({"result": "NoneExists", "theta_1": format!("{doubled_first}/2")}));
        }
    }
    Ok(report)
}

pub fn run_algebraicity(cli: &Cli, param: &str) -> Result<RunReport, InputError> {
    let p: ArchParam = param.parse().map_err(InputError)?;
    let mut report = RunReport::new("algebraicity", json!({"param": param}), cli.seed);
    let alg = classify_algebraicity(&p);
    let opts = pairing_symmetry_options(&p);
    let lds = is_nondegenerate_lds_shape(&p);
    report.push(
        "classify",
        Status::Ok,
        json!({
            "algebraicity": format!("{alg:?}"),
            "symmetric_possible": opts.symmetric_possible,
            "antisymmetric_possible": opts.antisymmetric_possible,
            "lds_shape": lds,
        }),
    );
    let applies = lds && alg != Algebraicity::Neither && p.multiplicities().values().any(|&m| m == 1);
    if applies {
        report.check("multiplicity-one-forbids-antisymmetric", !opts.antisymmetric_possible, Value::Null);
    } else {
        report.push("multiplicity-one-forbids-antisymmetric", Status::Na, json!("hypotheses not met"));
    }
    Ok(report)
}

pub fn run_sign(cli: &Cli, group: &str, rep: Option<&str>) -> Result<RunReport, InputError> {
    let field = field_or(cli, "cyclo:8")?;
    let (model, rho) = load_rep(group, rep, &field)?;
    let mut report = RunReport::new("sign", json!({"field": field.describe(), "group": group, "rep": rep}), cli.seed);
    match schur_sign(&rho, &vec![field.one(); model.order()]) {
        Ok((lam, a)) => report.push("schur-sign", Status::Ok, json!({"sign": lam, "A": a.to_json()})),
        Err(e) => report.push("schur-sign", Status::Na, json!(e.to_string())),
    }
    Ok(report)
}

pub fn run_lift(cli: &Cli, args: &RepArgs) -> Result<RunReport, InputError> {
    let field = field_or(cli, "cyclo:8")?;
    let l = prepare(args, &field)?;
    let mut report = RunReport::new("lift", rep_inputs(cli, &field, args), cli.seed);
    // which exponent relation validates for this input
    let other = match l.exponent {
        LiftExponent::OneMinusN => LiftExponent::NMinusOne,
        LiftExponent::NMinusOne => LiftExponent::OneMinusN,
    };
    let other_ok = lift_with_branches(&l.p, &l.chi_lift, other, &|_| false).is_ok();
    report.push("other-exponent", Status::Na, json!({"exponent": format!("{other:?}"), "validates": other_ok}));
    let Some(r) = lift_checked(&mut report, &l) else { return Ok(report) };
    match descend(&r) {
        Ok((q, back)) => report.check("round-trip", q == l.p && back == l.chi_lift, Value::Null),
        Err(e) => report.check("round-trip", false, json!(e.to_string())),
    }
    let sign = l.p.sign();
    let mu = sign_from_image(&r);
    report.check("sign", sign.map(|s| field.from_int(s)) == Some(mu.clone()), json!({"sign": sign, "minus_mu_c_squared": mu.to_string()}));
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut flips_ok = true;
    for _ in 0..8 {
        let mask: u64 = rng.gen();
        let flipped = lift_with_branches(&l.p, &l.chi_lift, l.exponent, &|g| mask >> (g % 64) & 1 == 1);
        flips_ok &= flipped.as_ref() == Ok(&r);
    }
    report.check("branch-independence", flips_ok, json!({"masks": 8}));
    if sign == Some(1) {
        match normalize_c_image(&r) {
            Ok((r2, h)) => {
                let canon = canonical_c_image(r.group()).ok();
                let ok = canon.as_ref() == Some(r2.image(l.model.c_tilde()));
                report.check("normalisation", ok, json!({"h": h.to_json()}));
            }
            Err(e) => report.check("normalisation", false, json!(e.to_string())),
        }
    } else {
        report.push("normalisation", Status::Na, json!("sign is -1"));
    }
    Ok(report)
}

pub fn run_pseudochar(cli: &Cli, args: &RepArgs, dump: Option<&Path>) -> Result<RunReport, InputError> {
    let field = field_or(cli, "cyclo:8")?;
    let l = prepare(args, &field)?;
    let mut report = RunReport::new("pseudochar", rep_inputs(cli, &field, args), cli.seed);
    let Some(r) = lift_checked(&mut report, &l) else { return Ok(report) };
    let theta = pseudochar::pseudochar_of_rep(&r);
    let budget = FfsBudget { word_caps: [cli.word_cap, 2, 2], max_arity: cli.arity_cap, seed: cli.seed, ..FfsBudget::default() };
    let ffs = check_ffs(&theta, &budget);
    let detail = json!({
        "instances": ffs.instances,
        "maps_covered": format!("{}/{}", ffs.maps_covered, ffs.maps_total),
        "folds_covered": format!("{}/{}", ffs.folds_covered, ffs.folds_total),
        "counterexample": ffs.counterexample.as_ref().map(|c| format!("{c:?}")),
    });
    report.check("ffs", ffs.ok(), detail);
    let fs = pseudochar::generators(r.n(), 1, cli.word_cap);
    if matches!(field, Field::Rational | Field::Cyclo(_)) {
        report.check("integrality", pseudochar::values_integral(&theta, &fs, budget.tuple_cap, cli.seed), Value::Null);
    } else {
        report.push("integrality", Status::Na, json!("field has no ring of integers here"));
    }
    if let Some(path) = dump {
        let model = r.model.clone();
        let text = theta.dump_jsonl(&fs, |_| model.elements().map(|g| vec![g]).collect());
        std::fs::write(path, text).map_err(input)?;
    }
    Ok(report)
}

pub fn run_ladic(cli: &Cli, args: &RepArgs, l: u64, m: u32) -> Result<RunReport, InputError> {
    let field = field_or(cli, "cyclo:4")?;
    let target = Field::ladic(l, m).map_err(input)?;
    let lifted = prepare(args, &field)?;
    let mut inputs = rep_inputs(cli, &field, args);
    inputs["l"] = json!(l);
    inputs["m"] = json!(m);
    let mut report = RunReport::new("ladic", inputs, cli.seed);
    let Some(r) = lift_checked(&mut report, &lifted) else { return Ok(report) };
    let r = match r.map_field(&target) {
        Ok(r) => r,
        Err(e) => return Err(InputError(format!("cannot map into {}: {e}", target.describe()))),
    };
    let precisions: Vec<u32> = (1..=m).collect();
    let (_, rep) = pseudochar::ladic_limit_demo(&r, &precisions, cli.arity_cap.min(2), cli.word_cap.min(2));
    report.check("compatibility", rep.violations.is_empty(), json!({"entries": rep.entries, "violations": rep.violations.len()}));
    report.check("reassembly", rep.reassembly_exact, Value::Null);
    Ok(report)
}

pub fn run_oracle(cli: &Cli, args: &RepArgs, rep2: Option<&str>) -> Result<RunReport, InputError> {
    let field = field_or(cli, "fp:13")?;
    let l1 = prepare(args, &field)?;
    let mut inputs = rep_inputs(cli, &field, args);
    inputs["rep2"] = json!(rep2);
    let mut report = RunReport::new("oracle", inputs, cli.seed);
    let Some(r1) = lift_checked(&mut report, &l1) else { return Ok(report) };
    let r2 = match rep2 {
        Some(path) => {
            let second = RepArgs { rep: Some(path.to_string()), ..args.clone() };
            let l2 = prepare(&second, &field)?;
            match lift_with_branches(&l2.p, &l2.chi_lift, l2.exponent, &|_| false) {
                Ok(r) => r,
                Err(e) => return Err(InputError(format!("second lift: {e}"))),
            }
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let g = r1.group();
            let h = loop {
                let k = Matrix::from_fn(&field, r1.n(), r1.n(), |_, _| field.from_int(rng.gen_range(-3..=3)));
                if let Ok(h) = g.from_raw(&k, &field.one(), false) {
                    break h;
                }
            };
            r1.conjugate(&h).map_err(input)?
        }
    };
    let caps = OracleCaps { arity_cap: cli.arity_cap, word_cap: cli.word_cap, ..OracleCaps::default() };
    match distinguish_or_match(&r1, &r2, &caps) {
        OracleVerdict::Match(h) => {
            let ok = r1.conjugate(&h).as_ref() == Ok(&r2);
            report.check("oracle", ok, json!({"result": "Match", "conjugator": h.to_json()}));
        }
        OracleVerdict::Distinguished { f, tuple, v1, v2 } => {
            let expected_match = rep2.is_none();
            report.check(
                "oracle",
                !expected_match,
                json!({"result": "Distinguished", "invariant": f.to_string(), "tuple": tuple, "v1": v1.to_string(), "v2": v2.to_string()}),
            );
        }
        OracleVerdict::AgreeUpToArity(k) => {
            report.push("oracle", Status::Na, json!({"result": "AgreeUpToArity", "arity": k}));
        }
    }
    Ok(report)
}

pub fn run_gu_witness(cli: &Cli, n: usize, layout: LayoutArg, action: ActionArg) -> Result<RunReport, InputError> {
    if n == 0 || n % 4 != 0 {
        return Err(InputError(format!("n = {n} is not a positive multiple of 4")));
    }
    let field = field_or(cli, &format!("cyclo:{}", 4 * n))?;
    let layout = match layout {
        LayoutArg::Diagonal => BlockLayout::Diagonal,
        LayoutArg::AntiDiagonal => BlockLayout::AntiDiagonal,
    };
    let action = match action {
        ActionArg::Standard => GuAction::Standard,
        ActionArg::NoTwist => GuAction::NoTwist,
        ActionArg::InverseDet => GuAction::InverseDet,
    };
    let inputs = json!({"n": n, "field": field.describe(), "layout": format!("{layout:?}"), "action": format!("{action:?}")});
    let mut report = RunReport::new("gu-witness", inputs, cli.seed);
    let pair = match gu::build_witness_pair_with(n, &field, layout, action) {
        Ok(p) => {
            report.check("build", true, json!({"generators": {"r1": [p.r1[1].to_json(), p.r1[4].to_json()], "r2": [p.r2[1].to_json(), p.r2[4].to_json()]}}));
            p
        }
        Err(gu::GuError::MissingRoot(f, k)) => return Err(InputError(format!("{f} lacks a primitive {k}-th root of unity"))),
        Err(e) => {
            report.check("build", false, json!(e.to_string()));
            return Ok(report);
        }
    };
    for w in gu::check_local_conjugacy(&pair) {
        let ok = w.witness.is_some() && w.generic_det_nonzero;
        let detail = json!({"coset": w.coset as u8, "linear_dim": w.linear_dim, "witness": w.witness.as_ref().map(|h| h.to_json())});
        report.check(format!("local({},{})", w.element.0, w.element.1), ok, detail);
    }
    match gu::check_global_conjugacy(&pair) {
        GlobalVerdict::NonConjugate { linear_dim, separator } => {
            report.check("global", true, json!({"result": "NonConjugate", "linear_dim": linear_dim, "certificate": separator.to_json()}))
        }
        GlobalVerdict::Conjugate(h) => report.check("global", false, json!({"result": "Conjugate", "conjugator": h.to_json()})),
        GlobalVerdict::Undetermined { linear_dim } => {
            report.check("global", false, json!({"result": "Undetermined", "linear_dim": linear_dim}))
        }
    }
    match gu::find_distinguishing_invariant(&pair, usize::MAX) {
        Ok(SeparatorSearch::Found(s)) => report.check("separator", s.tuple.len() >= 2, s.to_json()),
        Ok(SeparatorSearch::NotFound { evaluations }) => report.check("separator", false, json!({"evaluations": evaluations})),
        Err(e) => report.check("separator", false, json!(e.to_string())),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let r = n / 2;
    let fact: i64 = (1..=r as i64).product();
    let mut ok = true;
    for _ in 0..50 {
        let a = Matrix::from_fn(&field, n, n, |_, _| field.from_int(rng.gen_range(-5..=5)));
        let pf = a.sub(&a.transpose()).pfaffian().expect("even size");
        ok &= gu::pfaffian_polarization(&vec![a; r]).ok() == Some(pf.mul(&field.from_int(fact)));
    }
    report.check("pfaffian-polarisation", ok, json!({"arguments": r, "samples": 50, "factor": fact}));
    Ok(report)
}

pub fn run(cli: &Cli) -> Result<RunReport, InputError> {
    if let Some(f) = &cli.field {
        Field::parse(f).map_err(input)?;
    }
    match &cli.command {
        Command::Twisting { n } => run_twisting(cli, *n),
        Command::Algebraicity { param } => run_algebraicity(cli, param),
        Command::Sign { group, rep } => run_sign(cli, group, rep.as_deref()),
        Command::Lift(args) => run_lift(cli, args),
        Command::Pseudochar { rep, dump } => run_pseudochar(cli, rep, dump.as_deref()),
        Command::Ladic { rep, l, m } => run_ladic(cli, rep, *l, *m),
        Command::Oracle { rep, rep2 } => run_oracle(cli, rep, rep2.as_deref()),
        Command::GuWitness { n, layout, action } => run_gu_witness(cli, *n, *layout, *action),
    }
}

/// Runs the parsed command, writes the report and returns the exit code.
pub fn main_with(cli: &Cli) -> i32 {
    let report = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    let text = report.to_json_string();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => println!("{text}"),
    }
    report.exit_code()
}
