//! The command driver behind the `cartan` binary: runs one command on the
//! text of a `.eds` file and renders the result as text or JSON.

use std::fmt::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dsl::{self, Document};
use crate::eds::{integral_witness, ExteriorSystem, IntegralElement};
use crate::error::{Error, Result};
use crate::involution::{
    cartan_test, characters, chart_values, find_integral_element, generic_flag, CartanReport, Chart,
};
use crate::linearize::{CharacteristicSample, Linearization};
use crate::prolong::{iterate_prolongation, prolong, restrict, torsion, Stop, TorsionEntry};
use crate::scalar::{format_rational, Point};

pub const SCHEMA: &str = "v1";

/// Random covectors sampled by `charvar`, besides the coordinate ones.
pub const CHARVAR_SAMPLES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    CheckElement,
    Characters,
    CartanTest,
    Prolong,
    Torsion,
    Symbol,
    Charvar,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::CheckElement,
        Command::Characters,
        Command::CartanTest,
        Command::Prolong,
        Command::Torsion,
        Command::Symbol,
        Command::Charvar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::CheckElement => "check-element",
            Command::Characters => "characters",
            Command::CartanTest => "cartan-test",
            Command::Prolong => "prolong",
            Command::Torsion => "torsion",
            Command::Symbol => "symbol",
            Command::Charvar => "charvar",
        }
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub json: bool,
    /// Overrides the file's `seed`.
    pub seed: Option<u64>,
    /// For `prolong`: alternate Cartan's test and prolongation up to this
    /// many times.
    pub max_steps: Option<usize>,
    /// For `torsion`: restrict to the zero locus of the first torsion entry,
    /// solved for this coordinate, and rerun Cartan's test.
    pub solve_for: Option<String>,
    /// For `prolong`: names of the new coordinates.
    pub names: Option<Vec<String>>,
    /// For `symbol`: the covector, in components on the independence condition.
    pub xi: Option<Vec<BigRational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// 0 computed, 1 domain error, 2 parse error.
    pub code: i32,
    pub stdout: String,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct ErrorBody {
    error: ErrorJson,
}

#[derive(Serialize)]
struct ErrorJson {
    kind: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<usize>,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::ZeroDivision => "zero_division",
        Error::PoleAtPoint(_) => "pole_at_point",
        Error::UnboundSymbol(_) => "unbound_symbol",
        Error::UnknownSymbol(_) => "unknown_symbol",
        Error::DSquaredNonzero { .. } => "d_squared_nonzero",
        Error::DegreeError(_) => "degree_error",
        Error::DependentBasis => "dependent_basis",
        Error::DegreeZeroGenerator(_) => "degree_zero_generator",
        Error::BadIndependenceCondition(_) => "bad_independence_condition",
        Error::NegativeLastCharacter(_) => "negative_last_character",
        Error::AffineOnly(_) => "affine_only",
        Error::NotSolvable(_) => "not_solvable",
        Error::NotCoordinateManifold => "not_coordinate_manifold",
        Error::NotAGraph => "not_a_graph",
        Error::NoIntegralElement(_) => "no_integral_element",
        Error::NotIntegral(_) => "not_integral",
        Error::Dimension(_) => "dimension",
        Error::Parse { .. } => "parse",
    }
}

/// Exit code for an error: 2 for parse errors, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if matches!(e, Error::Parse { .. }) {
        2
    } else {
        1
    }
}

struct Rendered {
    text: String,
    json: serde_json::Value,
    code: i32,
}

impl Rendered {
    fn ok(text: String, body: impl Serialize) -> Result<Self> {
        Ok(Rendered {
            text,
            json: serde_json::to_value(body).expect("report serializes"),
            code: 0,
        })
    }
}

pub fn run(command: Command, text: &str, opts: &Options) -> Outcome {
    let result = dsl::parse(text).and_then(|doc| dispatch(command, &doc, opts));
    let (code, text, body) = match result {
        Ok(r) => (r.code, r.text, r.json),
        Err(e) => {
            let (line, column) = match &e {
                Error::Parse { line, col, .. } => (Some(*line), Some(*col)),
                _ => (None, None),
            };
            let body = ErrorBody {
                error: ErrorJson {
                    kind: error_kind(&e),
                    message: e.to_string(),
                    line,
                    column,
                },
            };
            (
                exit_code(&e),
                format!("error: {e}\n"),
                serde_json::to_value(body).expect("error serializes"),
            )
        }
    };
    let stdout = if opts.json {
        let env = Envelope {
            schema: SCHEMA,
            command: command.name(),
            body,
        };
        let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
        s.push('\n');
        s
    } else {
        text
    };
    Outcome { code, stdout }
}

fn dispatch(command: Command, doc: &Document, opts: &Options) -> Result<Rendered> {
    let sys = doc.system()?;
    let point = doc.point();
    let seed = opts.seed.or(doc.seed).unwrap_or(0);
    match command {
        Command::CheckElement => check_element(sys, doc, &point, seed),
        Command::Characters => characters_cmd(sys, doc, &point, seed),
        Command::CartanTest => {
            let r = cartan_test(sys, &point, doc.integral_element()?.as_ref(), seed)?;
            Rendered::ok(report_text(&r), &r)
        }
        Command::Prolong => match opts.max_steps {
            Some(k) => iterate_cmd(sys, &point, k, seed),
            None => prolong_cmd(sys, doc, &point, seed, opts.names.as_deref()),
        },
        Command::Torsion => torsion_cmd(sys, &point, seed, opts.solve_for.as_deref()),
        Command::Symbol => symbol_cmd(sys, doc, &point, seed, opts.xi.as_deref()),
        Command::Charvar => charvar_cmd(sys, doc, &point, seed),
    }
}

fn element(sys: &ExteriorSystem, doc: &Document, point: &Point, seed: u64) -> Result<IntegralElement> {
    match doc.integral_element()? {
        Some(e) => Ok(e),
        None => IntegralElement::from_chart(sys, point.clone(), &find_integral_element(sys, point, seed)?),
    }
}

fn tuple<T: ToString>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(T::to_string).collect();
    format!("({})", parts.join(","))
}

fn matrix_strings(a: &[Vec<BigRational>]) -> Vec<Vec<String>> {
    a.iter().map(|r| r.iter().map(format_rational).collect()).collect()
}

fn matrix_text(a: &[Vec<String>]) -> String {
    let rows: Vec<String> = a.iter().map(|r| format!("[{}]", r.join(", "))).collect();
    format!("[{}]", rows.join(", "))
}

pub fn report_text(r: &CartanReport) -> String {
    let mut s = String::new();
    let verdict = if r.involutive {
        format!(
            "involutive: yes; characters {}; predicted {}; actual {}",
            tuple(&r.characters),
            r.predicted_dim,
            r.actual_dim
        )
    } else {
        format!(
            "involutive: no; {}; characters {}; predicted {}; actual {}",
            r.inequality(),
            tuple(&r.characters),
            r.predicted_dim,
            r.actual_dim
        )
    };
    writeln!(s, "{verdict}").unwrap();
    writeln!(s, "system {}: dimension {}, p = {}", r.system, r.dim, r.p).unwrap();
    writeln!(s, "integral elements at the point: {}-dimensional", r.fiber_dim).unwrap();
    if r.involutive {
        writeln!(s, "generality: {}", r.generality).unwrap();
    }
    if r.linearity_caveat {
        writeln!(
            s,
            "note: chart equations are not affine; actual dimension is the tangent-space rank"
        )
        .unwrap();
    }
    s
}

#[derive(Serialize)]
struct CheckBody {
    integral: bool,
    element: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessJson>,
}

#[derive(Serialize)]
struct WitnessJson {
    form: String,
    vectors: Vec<usize>,
    value: String,
}

fn check_element(sys: &ExteriorSystem, doc: &Document, point: &Point, seed: u64) -> Result<Rendered> {
    let e = element(sys, doc, point, seed)?;
    let names = sys.manifold().coframe();
    let basis: Vec<Vec<String>> = e
        .basis
        .iter()
        .map(|v| v.0.iter().map(format_rational).collect())
        .collect();
    match integral_witness(sys, &e)? {
        None => {
            let text = format!("integral: yes; basis {}\n", matrix_text(&basis));
            Rendered::ok(
                text,
                CheckBody {
                    integral: true,
                    element: basis,
                    witness: None,
                },
            )
        }
        Some(w) => {
            let form = sys.closure()[w.form].display(names).to_string();
            let value = format_rational(&w.value);
            let text = format!("integral: no; {form} is {value} on basis vectors {:?}\n", w.vectors);
            let body = CheckBody {
                integral: false,
                element: basis,
                witness: Some(WitnessJson {
                    form,
                    vectors: w.vectors,
                    value,
                }),
            };
            Ok(Rendered {
                text,
                json: serde_json::to_value(body).expect("report serializes"),
                code: 1,
            })
        }
    }
}

#[derive(Serialize)]
struct CharactersBody {
    characters: Vec<i64>,
    polar_ranks: Vec<usize>,
    flag: Vec<Vec<String>>,
}

fn characters_cmd(sys: &ExteriorSystem, doc: &Document, point: &Point, seed: u64) -> Result<Rendered> {
    let e = element(sys, doc, point, seed)?;
    if let Some(w) = integral_witness(sys, &e)? {
        return Err(Error::NotIntegral(format!(
            "{} is {} on basis vectors {:?}",
            sys.closure()[w.form].display(sys.manifold().coframe()),
            format_rational(&w.value),
            w.vectors
        )));
    }
    let flag = generic_flag(sys, &e, seed)?;
    let chars = characters(sys.dim(), sys.p(), &flag.polar_ranks)?;
    let text = format!(
        "characters {}; polar ranks {}\n",
        tuple(&chars),
        tuple(&flag.polar_ranks)
    );
    let body = CharactersBody {
        characters: chars,
        polar_ranks: flag.polar_ranks,
        flag: flag
            .vectors
            .iter()
            .map(|v| v.0.iter().map(format_rational).collect())
            .collect(),
    };
    Rendered::ok(text, body)
}

#[derive(Serialize)]
struct TorsionJson {
    generator: usize,
    pair: [String; 2],
    value: String,
}

fn torsion_json(sys: &ExteriorSystem, t: &[TorsionEntry]) -> Vec<TorsionJson> {
    let names = sys.manifold().coframe();
    t.iter()
        .map(|e| TorsionJson {
            generator: e.generator,
            pair: [names[e.pair.0].clone(), names[e.pair.1].clone()],
            value: e.value.to_string(),
        })
        .collect()
}

fn torsion_text(t: &[TorsionJson]) -> String {
    if t.is_empty() {
        return "no torsion\n".into();
    }
    let mut s = String::new();
    for (k, e) in t.iter().enumerate() {
        let label = if t.len() == 1 {
            "t".to_string()
        } else {
            format!("t{}", k + 1)
        };
        writeln!(
            s,
            "{label} = {}    (generator {}, {}^{})",
            e.value, e.generator, e.pair[0], e.pair[1]
        )
        .unwrap();
    }
    s
}

#[derive(Serialize)]
struct ProlongBody {
    system: String,
    dim: usize,
    parameters: Vec<String>,
    solution: Vec<[String; 2]>,
    torsion: Vec<TorsionJson>,
    document: String,
}

fn prolong_cmd(
    sys: &ExteriorSystem,
    doc: &Document,
    point: &Point,
    seed: u64,
    names: Option<&[String]>,
) -> Result<Rendered> {
    let pr = prolong(sys, names)?;
    let lifted = doc.point.as_ref().and_then(|_| {
        let a = match doc.integral_element() {
            Ok(Some(e)) => e.chart(sys).ok()?,
            _ => find_integral_element(sys, point, seed).ok()?,
        };
        let values = chart_values(&Chart::new(sys), &a);
        let mut pt = point.clone();
        for (param, unknown) in pr.parameters.iter().zip(&pr.parameter_unknowns) {
            pt.insert(param.clone(), values[unknown].clone());
        }
        Some(pt)
    });
    let out_doc = Document {
        manifold: pr.system.manifold().clone(),
        system: Some(pr.system.clone()),
        point: lifted,
        element: None,
        seed: doc.seed,
    };
    let document = dsl::print(&out_doc);
    let tj = torsion_json(&pr.system, &pr.torsion);
    let mut text = String::new();
    if pr.parameters.is_empty() {
        writeln!(text, "# parameters: none").unwrap();
    } else {
        writeln!(text, "# parameters: {}", pr.parameters.join(" ")).unwrap();
    }
    for (u, v) in &pr.solution {
        let v = v.to_string();
        if *u != v {
            writeln!(text, "# {u} = {v}").unwrap();
        }
    }
    for line in torsion_text(&tj).lines() {
        writeln!(text, "# {line}").unwrap();
    }
    text.push_str(&document);
    let body = ProlongBody {
        system: pr.system.name().to_string(),
        dim: pr.system.dim(),
        parameters: pr.parameters.clone(),
        solution: pr.solution.iter().map(|(u, v)| [u.clone(), v.to_string()]).collect(),
        torsion: tj,
        document,
    };
    Rendered::ok(text, body)
}

#[derive(Serialize)]
struct IterateBody<'a> {
    reports: &'a [CartanReport],
    stop: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
    torsion: Vec<TorsionJson>,
}

fn iterate_cmd(sys: &ExteriorSystem, point: &Point, max_steps: usize, seed: u64) -> Result<Rendered> {
    let it = iterate_prolongation(sys, point, max_steps, seed)?;
    let mut text = String::new();
    for (k, r) in it.reports.iter().enumerate() {
        writeln!(text, "step {k}: {}", report_text(r).lines().next().unwrap_or_default()).unwrap();
    }
    let (stop, detail, tj) = match &it.stop {
        Stop::Involutive => ("involutive", None, Vec::new()),
        Stop::MaxSteps => ("max_steps", None, Vec::new()),
        Stop::AffineOnly(m) => ("affine_only", Some(m.clone()), Vec::new()),
        Stop::Torsion(t) => ("torsion", None, torsion_json(&it.system, t)),
    };
    writeln!(text, "stopped: {}", stop.replace('_', " ")).unwrap();
    if let Some(d) = &detail {
        writeln!(text, "{d}").unwrap();
    }
    if !tj.is_empty() {
        text.push_str(&torsion_text(&tj));
    }
    let body = IterateBody {
        reports: &it.reports,
        stop,
        detail,
        torsion: tj,
    };
    Rendered::ok(text, body)
}

#[derive(Serialize)]
struct TorsionBody {
    torsion: Vec<TorsionJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    restricted: Option<CartanReport>,
}

fn torsion_cmd(sys: &ExteriorSystem, point: &Point, seed: u64, solve_for: Option<&str>) -> Result<Rendered> {
    let t = torsion(sys)?;
    let tj = torsion_json(sys, &t);
    let mut text = torsion_text(&tj);
    let restricted = match solve_for {
        None => None,
        Some(x) => {
            let Some(first) = t.first() else {
                return Err(Error::NotSolvable(format!("{x}: there is no torsion to solve")));
            };
            let r = restrict(sys, &first.value, x)?;
            let mut pt = point.clone();
            pt.remove(x);
            let report = cartan_test(&r, &pt, None, seed)?;
            writeln!(text, "restricted to t = 0, solved for {x}:").unwrap();
            text.push_str(&report_text(&report));
            Some(report)
        }
    };
    Rendered::ok(
        text,
        TorsionBody {
            torsion: tj,
            restricted,
        },
    )
}

#[derive(Serialize)]
struct SymbolBody {
    xi: Vec<String>,
    matrix: Vec<Vec<String>>,
    rank: usize,
    kernel_dim: usize,
    characteristic: bool,
}

fn symbol_cmd(
    sys: &ExteriorSystem,
    doc: &Document,
    point: &Point,
    seed: u64,
    xi: Option<&[BigRational]>,
) -> Result<Rendered> {
    let e = element(sys, doc, point, seed)?;
    let lin = Linearization::new(sys, &e)?;
    let xi: Vec<BigRational> = match xi {
        Some(x) => x.to_vec(),
        None => (0..lin.p)
            .map(|i| BigRational::from_integer(BigInt::from(u8::from(i == 0))))
            .collect(),
    };
    let (characteristic, kernel_dim) = lin.is_characteristic(&xi)?;
    let matrix = matrix_strings(&lin.symbol(&xi)?);
    let xs: Vec<String> = xi.iter().map(format_rational).collect();
    let text = format!(
        "symbol at xi = {}: {}\nkernel {kernel_dim}; characteristic: {}\n",
        tuple(&xs),
        matrix_text(&matrix),
        if characteristic { "yes" } else { "no" }
    );
    let body = SymbolBody {
        xi: xs,
        rank: lin.q - kernel_dim,
        matrix,
        kernel_dim,
        characteristic,
    };
    Rendered::ok(text, body)
}

#[derive(Serialize)]
struct CharvarBody {
    polynomial: String,
    /// Whether `polynomial` is the determinant of a square symbol rather
    /// than of its Gram matrix.
    square: bool,
    samples: Vec<CharacteristicSample>,
}

/// Coordinate covectors followed by [`CHARVAR_SAMPLES`] seeded random ones.
pub fn sample_covectors(p: usize, seed: u64) -> Vec<Vec<BigRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc4a7);
    let mut out: Vec<Vec<BigRational>> = (0..p)
        .map(|i| {
            (0..p)
                .map(|j| BigRational::from_integer(BigInt::from(u8::from(i == j))))
                .collect()
        })
        .collect();
    while out.len() < p + CHARVAR_SAMPLES && p > 0 {
        let v: Vec<BigRational> = (0..p)
            .map(|_| BigRational::new(rng.gen_range(-9..=9).into(), rng.gen_range(1..=4).into()))
            .collect();
        if v.iter().any(|x| !x.is_zero()) {
            out.push(v);
        }
    }
    out
}

fn charvar_cmd(sys: &ExteriorSystem, doc: &Document, point: &Point, seed: u64) -> Result<Rendered> {
    let e = element(sys, doc, point, seed)?;
    let lin = Linearization::new(sys, &e)?;
    let (poly, square) = lin.characteristic_polynomial()?;
    let samples = sample_covectors(lin.p, seed)
        .iter()
        .map(|xi| Ok(CharacteristicSample::new(xi, lin.is_characteristic(xi)?)))
        .collect::<Result<Vec<_>>>()?;
    let hits = samples.iter().filter(|s| s.characteristic).count();
    let label = if square { "det" } else { "gram det" };
    let text = format!(
        "{label} = {poly}\ncharacteristic: {hits} of {} sampled covectors\n",
        samples.len()
    );
    let body = CharvarBody {
        polynomial: poly.to_string(),
        square,
        samples,
    };
    Rendered::ok(text, body)
}
