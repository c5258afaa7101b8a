//! Command-line driver for `isotypy-core`: models, degree counts, action
//! decompositions, extension problems and local-system self-tests.
//!
//! Every command returns its standard output and exit code through [`run`]:
//! 0 on success, 1 when the engine rejects its input (the report says why),
//! 2 for malformed input or invalid parameters.

pub mod format;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isotypy_core::charlattice::ClassFunction;
use isotypy_core::engine::{
    apply_scramble, extend, random_scramble, run_local_system, self_problem, RunOptions, SelfTestProvider, StepRecord,
};
use isotypy_core::groups::{decompose_action, validate_decomposition, AbelianPGroup, ActionGroup, Elem};
use isotypy_core::isometry::{verify_isometry, verify_stability};
use isotypy_core::localmodel::{full_host, irr_block, quotient_model, ClassTable};
use log::{debug, info};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use format::{aut_rows, subgroup_gens, to_json, ErrorJson, IsometryFile, ModelParams, ProblemJson, ResultJson};

#[derive(Parser, Debug)]
#[command(name = "isotypy", version, about = "Local block models and isometry extension for rank-2 abelian defect groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Character table of the block of N = P ⋊ Ẽ.
    Model {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Degree counts from the formula against enumeration.
    Counts(CountsArgs),
    /// Splits D = P1 × P2 under an action F = F1 × F2.
    Decompose(DecomposeArgs),
    /// Writes the extension problem of a model quotient, optionally scrambled.
    Problem {
        #[command(flatten)]
        model: ModelArgs,
        /// Generator `a,b` of Q; repeat for more.
        #[arg(long = "q", value_parser = parse_pair)]
        q: Vec<[u64; 2]>,
        /// Seed of a random signed relabeling of the G-side.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solves an extension problem given as JSON (`-` reads standard input).
    Extend { problem: PathBuf },
    /// Runs the local system of a model against itself.
    Selftest {
        #[command(flatten)]
        model: ModelArgs,
        /// Also extend seeded scrambles of every quotient on the descent.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 10)]
        scrambles: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Checks an isometry file, and its stability when both actions are given.
    Verify { file: PathBuf },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct ModelArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub l: u64,
    #[arg(long)]
    pub a1: Option<u64>,
    #[arg(long)]
    pub a2: Option<u64>,
}

impl From<ModelArgs> for ModelParams {
    fn from(a: ModelArgs) -> Self {
        ModelParams { p: a.p, n: a.n, m: a.m, l: a.l, a1: a.a1, a2: a.a2 }
    }
}

#[derive(Args, Debug, Clone)]
pub struct CountsArgs {
    #[arg(long, required_unless_present = "sweep")]
    pub p: Option<u64>,
    #[arg(long, required_unless_present = "sweep")]
    pub n: Option<u32>,
    #[arg(long, required_unless_present = "sweep")]
    pub m: Option<u32>,
    #[arg(long, required_unless_present = "sweep")]
    pub l: Option<u64>,
    /// All p in `--primes`, 1 ≤ m ≤ n ≤ `--max-exp`, 1 < l | p − 1.
    #[arg(long, conflicts_with_all = ["p", "n", "m", "l"])]
    pub sweep: bool,
    #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
    pub primes: Vec<u64>,
    #[arg(long, default_value_t = 2)]
    pub max_exp: u32,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub m: u32,
    /// Generator of F as `α,β,γ,δ`: (1,0) ↦ (α,γ), (0,1) ↦ (β,δ).
    #[arg(long = "gen", value_parser = parse_quad, required = true)]
    pub gens: Vec<[u64; 4]>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

fn parse_list<const K: usize>(s: &str) -> Result<[u64; K], String> {
    let v: Vec<u64> = s.split(',').map(|t| t.trim().parse::<u64>().map_err(|e| format!("{t:?}: {e}"))).collect::<Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<u64>| format!("expected {K} comma-separated integers, got {}", v.len()))
}

fn parse_pair(s: &str) -> Result<[u64; 2], String> {
    parse_list::<2>(s)
}

fn parse_quad(s: &str) -> Result<[u64; 4], String> {
    parse_list::<4>(s)
}

/// Why a command did not succeed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// Malformed input or invalid parameters (exit 2).
    Usage(ErrorJson),
    /// A rendered report of an engine rejection (exit 1).
    Engine(String),
}

impl Failure {
    pub fn usage(kind: &str, message: impl fmt::Display) -> Self {
        Failure::Usage(ErrorJson { kind: kind.into(), message: message.to_string() })
    }
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    status: &'static str,
    error: &'a ErrorJson,
}

/// Standard output and exit code of a command.
pub fn run(cli: Cli) -> (String, i32) {
    let out = match cli.command {
        Command::Model { model, format } => cmd_model(model.into(), format),
        Command::Counts(a) => cmd_counts(&a),
        Command::Decompose(a) => cmd_decompose(&a),
        Command::Problem { model, q, seed } => cmd_problem(model.into(), &q, seed),
        Command::Extend { problem } => cmd_extend(&problem),
        Command::Selftest { model, seed, scrambles, format } => cmd_selftest(model.into(), seed, scrambles, format),
        Command::Verify { file } => cmd_verify(&file),
    };
    match out {
        Ok(s) => (s, 0),
        Err(Failure::Engine(s)) => (s, 1),
        Err(Failure::Usage(e)) => (to_json(&ErrorDoc { status: "error", error: &e }), 2),
    }
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(|e| Failure::usage("io", e))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::usage("io", format!("{}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::usage("malformed_json", e))
}

#[derive(Serialize)]
struct ClassJson {
    x: [u64; 2],
    e: [u64; 3],
    size: u64,
}

#[derive(Serialize)]
struct CharacterJson {
    label: String,
    xi: [u64; 2],
    stab: &'static str,
    beta: u64,
    degree: u64,
    values: Vec<String>,
}

#[derive(Serialize)]
struct ModelJson {
    model: ModelParams,
    a1: u64,
    a2: u64,
    order: u64,
    conductor: u64,
    classes: Vec<ClassJson>,
    characters: Vec<CharacterJson>,
}

pub fn cmd_model(params: ModelParams, format: Format) -> Result<String, Failure> {
    let model = params.build()?;
    let table = std::sync::Arc::new(ClassTable::new(full_host(&model)));
    info!("{} classes", table.len());
    let characters: Vec<CharacterJson> = irr_block(&model)
        .into_iter()
        .map(|c| CharacterJson {
            label: c.label.to_string(),
            xi: [c.label.xi.0, c.label.xi.1],
            stab: c.label.stab.code(),
            beta: c.label.beta,
            degree: c.degree,
            values: ClassFunction::character(&table, &c.label).values().iter().map(|v| v.to_string()).collect(),
        })
        .collect();
    let classes = table
        .reps()
        .iter()
        .zip(table.sizes())
        .map(|(g, &size)| ClassJson { x: [g.x.0, g.x.1], e: [g.e.i, g.e.j, g.e.k], size })
        .collect();
    let doc = ModelJson {
        model: params,
        a1: model.a1(),
        a2: model.a2(),
        order: model.order(),
        conductor: model.conductor(),
        classes,
        characters,
    };
    Ok(match format {
        Format::Json => to_json(&doc),
        Format::Table => {
            let mut s = format!(
                "N = (C_{} x C_{}) : E~, l = {}, |N| = {}, {} block characters\n",
                model.q1(),
                model.q2(),
                model.l(),
                doc.order,
                doc.characters.len()
            );
            let reps: Vec<String> = doc.classes.iter().map(|c| format!("({},{}).e1^{} e2^{} z^{}", c.x[0], c.x[1], c.e[0], c.e[1], c.e[2])).collect();
            s += &format!("{:<24} {:>6}  {}\n", "class", "", reps.join(" | "));
            for c in &doc.characters {
                s += &format!("{:<24} {:>6}  {}\n", c.label, c.degree, c.values.join(" | "));
            }
            s
        }
    })
}

#[derive(Serialize)]
struct CountJson {
    model: ModelParams,
    enumerated: [u64; 2],
    formula: [u64; 2],
    sum_of_squares: u64,
    expected_sum: u64,
    status: &'static str,
}

fn count_one(params: ModelParams) -> Result<CountJson, Failure> {
    let model = params.build()?;
    let (q1, q2, l) = (model.q1(), model.q2(), model.l());
    let irr = irr_block(&model);
    let small = irr.iter().filter(|c| c.degree == l).count() as u64;
    let large = irr.iter().filter(|c| c.degree == l * l).count() as u64;
    let sum_of_squares = irr.iter().map(|c| c.degree * c.degree).sum();
    let formula = [q1 + q2 - 1, (q1 - 1) * (q2 - 1) / (l * l)];
    let expected_sum = l * l * q1 * q2;
    let ok = [small, large] == formula && sum_of_squares == expected_sum && small + large == irr.len() as u64;
    debug!("{}: {} characters", params.tuple(), irr.len());
    Ok(CountJson {
        model: params,
        enumerated: [small, large],
        formula,
        sum_of_squares,
        expected_sum,
        status: if ok { "MATCH" } else { "MISMATCH" },
    })
}

pub fn cmd_counts(a: &CountsArgs) -> Result<String, Failure> {
    let sets: Vec<ModelParams> = if a.sweep {
        let mut v = Vec::new();
        for &p in &a.primes {
            for n in 1..=a.max_exp {
                for m in 1..=n {
                    for l in (2..p).filter(|l| (p - 1) % l == 0) {
                        v.push(ModelParams { p, n, m, l, a1: None, a2: None });
                    }
                }
            }
        }
        v
    } else {
        let (Some(p), Some(n), Some(m), Some(l)) = (a.p, a.n, a.m, a.l) else {
            return Err(Failure::usage("usage", "--p, --n, --m and --l are required without --sweep"));
        };
        vec![ModelParams { p, n, m, l, a1: None, a2: None }]
    };
    let rows = sets.into_iter().map(count_one).collect::<Result<Vec<_>, _>>()?;
    let bad = rows.iter().filter(|r| r.status != "MATCH").count();
    let text = match a.format {
        Format::Json => to_json(&rows),
        Format::Table => {
            let mut s = String::new();
            for r in &rows {
                s += &format!(
                    "{} enumerated ({},{}) formula ({},{}) squares {}/{} {}\n",
                    r.model.tuple(),
                    r.enumerated[0],
                    r.enumerated[1],
                    r.formula[0],
                    r.formula[1],
                    r.sum_of_squares,
                    r.expected_sum,
                    r.status
                );
            }
            if rows.len() > 1 {
                s += &format!("{} parameter sets, {} MISMATCH\n", rows.len(), bad);
            }
            s
        }
    };
    if bad > 0 {
        Err(Failure::Engine(text))
    } else {
        Ok(text)
    }
}

#[derive(Serialize)]
struct DecompositionJson {
    p: u64,
    n: u32,
    m: u32,
    p1: Vec<[u64; 2]>,
    p2: Vec<[u64; 2]>,
    f1: Vec<[[u64; 2]; 2]>,
    f2: Vec<[[u64; 2]; 2]>,
    route: Vec<String>,
    validator: &'static str,
}

pub fn cmd_decompose(a: &DecomposeArgs) -> Result<String, Failure> {
    if a.n < a.m {
        return Err(Failure::usage("invalid_group", "exponents must satisfy n >= m"));
    }
    let d = AbelianPGroup::new(a.p, a.n, a.m).map_err(|e| Failure::usage("invalid_group", e))?;
    let gens = a
        .gens
        .iter()
        .map(|&[al, be, ga, de]| d.automorphism(al, be, ga, de))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::usage("invalid_action", e))?;
    let f = ActionGroup::new(d, gens);
    let dec = decompose_action(&d, &f).map_err(|e| Failure::Engine(to_json(&ErrorDoc { status: "failed", error: &ErrorJson::of(&e) })))?;
    let validator = if validate_decomposition(&d, &f, &dec).is_ok() { "PASS" } else { "FAIL" };
    let pairs = |v: &[Elem]| v.iter().map(|x| [x.0, x.1]).collect();
    let doc = DecompositionJson {
        p: a.p,
        n: a.n,
        m: a.m,
        p1: pairs(&dec.p1),
        p2: pairs(&dec.p2),
        f1: dec.f1.iter().map(aut_rows).collect(),
        f2: dec.f2.iter().map(aut_rows).collect(),
        route: dec.route.iter().map(|r| format!("{r:?}")).collect(),
        validator,
    };
    let s = to_json(&doc);
    if validator == "PASS" {
        Ok(s)
    } else {
        Err(Failure::Engine(s))
    }
}

pub fn cmd_problem(params: ModelParams, q: &[[u64; 2]], seed: Option<u64>) -> Result<String, Failure> {
    let model = params.build()?;
    let gens = subgroup_gens(&model, q)?;
    let qm = quotient_model(&model, &model.pgroup().generate(&gens)).map_err(|e| Failure::usage("invalid_subgroup", e))?;
    let mut pb = self_problem(&qm).map_err(|e| Failure::usage("invalid_subgroup", e))?;
    if let Some(seed) = seed {
        let sc = random_scramble(&qm, pb.case, &mut ChaCha8Rng::seed_from_u64(seed));
        pb = apply_scramble(&pb, &sc);
    }
    Ok(to_json(&ProblemJson::from_problem(params, &pb)))
}

pub fn cmd_extend(path: &PathBuf) -> Result<String, Failure> {
    let doc: ProblemJson = parse_json(&read_input(path)?)?;
    let pb = doc.to_problem()?;
    info!("extending {} problem with {} basis elements", pb.case.name(), pb.basis.len());
    match extend(&pb) {
        Ok(ext) => Ok(to_json(&ResultJson::extended(&ext))),
        Err(e) => Err(Failure::Engine(to_json(&ResultJson::failed(pb.case, &e)))),
    }
}

fn gens_text(g: &[Elem]) -> String {
    if g.is_empty() {
        return "1".into();
    }
    format!("<{}>", g.iter().map(|x| format!("({},{})", x.0, x.1)).collect::<Vec<_>>().join(","))
}

#[derive(Serialize)]
struct StepJson {
    generators: Vec<[u64; 2]>,
    order: usize,
    orbit: usize,
    case: &'static str,
    gamma_identity: bool,
}

impl From<&StepRecord> for StepJson {
    fn from(s: &StepRecord) -> Self {
        StepJson {
            generators: s.generators.iter().map(|x| [x.0, x.1]).collect(),
            order: s.order,
            orbit: s.orbit,
            case: s.case.name(),
            gamma_identity: s.gamma_identity,
        }
    }
}

#[derive(Serialize)]
struct ScrambleJson {
    seed: u64,
    attempted: usize,
    extended: usize,
    failures: Vec<String>,
}

#[derive(Serialize)]
struct SelftestJson {
    model: ModelParams,
    status: &'static str,
    subgroups: usize,
    all_identity: bool,
    steps: Vec<StepJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scrambles: Option<ScrambleJson>,
}

fn scramble_steps(params: &ModelParams, steps: &[StepRecord], seed: u64, per_step: usize) -> Result<ScrambleJson, Failure> {
    let model = params.build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ScrambleJson { seed, attempted: 0, extended: 0, failures: Vec::new() };
    for s in steps {
        let qm = quotient_model(&model, &model.pgroup().generate(&s.generators)).map_err(|e| Failure::usage("invalid_subgroup", e))?;
        let pb = self_problem(&qm).map_err(|e| Failure::usage("invalid_subgroup", e))?;
        for k in 0..per_step {
            let spb = apply_scramble(&pb, &random_scramble(&qm, pb.case, &mut rng));
            out.attempted += 1;
            match extend(&spb) {
                Ok(ext) if spb.basis.iter().zip(&spb.delta_zero).all(|(b, v)| &ext.isometry.apply(b) == v) => out.extended += 1,
                Ok(_) => out.failures.push(format!("{} #{k}: restriction differs", gens_text(&s.generators))),
                Err(e) => out.failures.push(format!("{} #{k}: {e}", gens_text(&s.generators))),
            }
        }
    }
    Ok(out)
}

pub fn cmd_selftest(params: ModelParams, seed: Option<u64>, per_step: usize, format: Format) -> Result<String, Failure> {
    let model = params.build()?;
    let mut doc = SelftestJson {
        model: params,
        status: "COMPLETE",
        subgroups: 0,
        all_identity: false,
        steps: Vec::new(),
        error: None,
        scrambles: None,
    };
    let mut ok = true;
    match run_local_system(&model, &SelfTestProvider, RunOptions::default()) {
        Ok(state) => {
            info!("installed {} subgroups", state.len());
            doc.subgroups = state.len();
            doc.all_identity = state.all_identity();
            doc.steps = state.steps().iter().map(StepJson::from).collect();
            if !state.is_complete() {
                doc.status = "INCOMPLETE";
                ok = false;
            }
            if let Some(seed) = seed {
                let sc = scramble_steps(&params, state.steps(), seed, per_step)?;
                ok &= sc.failures.is_empty();
                doc.scrambles = Some(sc);
            }
        }
        Err(e) => {
            doc.status = "FAILED";
            doc.error = Some(ErrorJson::of(&e));
            ok = false;
        }
    }
    let text = match format {
        Format::Json => to_json(&doc),
        Format::Table => {
            let mut s = format!("local system for {}: {} subgroups, {} extension steps\n", params.tuple(), doc.subgroups, doc.steps.len());
            for st in &doc.steps {
                let g: Vec<Elem> = st.generators.iter().map(|x| Elem(x[0], x[1])).collect();
                let gamma = if st.gamma_identity { "id" } else { "non-identity" };
                s += &format!("  {} order {}, orbit {}, {}, gamma {}\n", gens_text(&g), st.order, st.orbit, st.case, gamma);
            }
            match (&doc.error, doc.all_identity) {
                (Some(e), _) => s += &format!("FAILED: {}\n", e.message),
                (None, true) => s += &format!("{}, all Γ = id\n", doc.status),
                (None, false) => s += &format!("{}, some Γ ≠ id\n", doc.status),
            }
            if let Some(sc) = &doc.scrambles {
                s += &format!("scrambles (seed {}): {}/{} extended\n", sc.seed, sc.extended, sc.attempted);
                for f in &sc.failures {
                    s += &format!("  {f}\n");
                }
            }
            s
        }
    };
    if ok {
        Ok(text)
    } else {
        Err(Failure::Engine(text))
    }
}

fn is_perm(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n && p.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
}

#[derive(Serialize)]
struct VerifyJson {
    status: &'static str,
    checks: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorJson>,
}

pub fn cmd_verify(path: &PathBuf) -> Result<String, Failure> {
    let file: IsometryFile = parse_json(&read_input(path)?)?;
    let iso = file.isometry();
    let mut doc = VerifyJson { status: "verified", checks: vec!["isometry"], error: None };
    let mut result = verify_isometry(&iso);
    match (file.domain_action, file.codomain_action) {
        (Some(d), Some(c)) => {
            let (rows, cols) = (iso.codomain.len(), iso.domain.len());
            if d.perms.iter().any(|p| !is_perm(p, cols)) || c.perms.iter().any(|p| !is_perm(p, rows)) {
                return Err(Failure::usage("malformed_isometry", "actions must be permutations of the label lists"));
            }
            doc.checks.push("stability");
            result = result.and_then(|_| verify_stability(&iso, &d.into(), &c.into()));
        }
        (None, None) => {}
        _ => return Err(Failure::usage("malformed_isometry", "stability needs both domain_action and codomain_action")),
    }
    match result {
        Ok(()) => Ok(to_json(&doc)),
        Err(e) => {
            doc.status = "failed";
            doc.error = Some(ErrorJson::of(&e));
            Err(Failure::Engine(to_json(&doc)))
        }
    }
}
