mod common;

use cartan::coframe::SymbolKind;
use cartan::dsl::{parse, parse_scalar, print};
use cartan::{Error, Manifold};
use common::*;

fn parse_error(text: &str) -> (usize, usize, String) {
    match parse(text) {
        Err(Error::Parse { line, col, msg }) => (line, col, msg),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

const PLANE: &str = "manifold M { coordinates x y; }\n";

fn with_system(body: &str) -> String {
    format!("{PLANE}system S on M {{ {body} }}\n")
}

#[test]
fn harmonic_has_two_generators_and_p_two() {
    let doc = fixture("harmonic");
    let sys = doc.system().unwrap();
    assert_eq!(sys.generators().len(), 2);
    assert_eq!(sys.p(), 2);
    assert_eq!(sys.dim(), 5);
}

#[test]
fn webs_manifold_is_six_dimensional_and_closed() {
    let doc = fixture("webs");
    assert_eq!(doc.manifold.dim(), 6);
    assert!(doc.manifold.validate().unwrap().unchecked.is_empty());
    assert_eq!(doc.system().unwrap().generators().len(), 3);
}

#[test]
fn empty_system_block_needs_p() {
    let (line, col, msg) = parse_error(&with_system(""));
    assert_eq!(msg, "system requires p");
    assert_eq!((line, col), (2, 1));
}

#[test]
fn missing_independence_condition() {
    let (_, _, msg) = parse_error(&with_system("p = 1;"));
    assert!(msg.contains("independence"), "{msg}");
}

#[test]
fn print_then_parse_is_the_identity_on_fixtures() {
    for name in ALL_FIXTURES {
        if name == "trivial-2" {
            continue;
        }
        let doc = fixture(name);
        let text = print(&doc);
        let again = parse(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(again, doc, "{name}");
        assert_eq!(print(&again), text, "{name}");
    }
}

#[test]
fn errors_carry_positions() {
    let cases: [(&str, (usize, usize), &str); 9] = [
        ("manifold M { coordinates x y; } $", (1, 33), "unexpected character"),
        ("manifold M { coordinates x d; }", (1, 14), "reserved"),
        ("manifold M { coordinates x x; }", (1, 14), "declared twice"),
        ("manifold M { coordinates x; scalar K; }", (1, 29), "no `d K"),
        ("manifold M { coordinates x;", (1, 28), "end of input"),
        (
            "manifold M { coordinates x; d x = dx; }",
            (1, 29),
            "fixed by its declaration",
        ),
        ("manifold M { coframe a; d a = a; }", (1, 31), "must be a 2-form"),
        ("manifold M { coframe a; d b = 0; }", (1, 25), "unknown name"),
        ("point { x = 1; }", (1, 1), "manifold block must come first"),
    ];
    for (text, pos, needle) in cases {
        let (line, col, msg) = parse_error(text);
        assert!(msg.contains(needle), "{text}: {msg}");
        assert_eq!((line, col), pos, "{text}: {msg}");
    }
}

#[test]
fn expression_errors_point_at_the_operator() {
    let cases: [(&str, usize, &str); 5] = [
        (
            "p = 1; independence = dx; generator dx + dx^dy;",
            56,
            "cannot add a 1-form and a 2-form",
        ),
        ("p = 1; independence = dx; generator dx * dy;", 56, "use ^"),
        ("p = 1; independence = dx; generator dq;", 53, "unknown name `dq`"),
        ("p = 1; independence = dx; generator dx / dy;", 58, "divide by a scalar"),
        ("p = 1; independence = dz;", 24, "not a coframe element"),
    ];
    for (body, col, needle) in cases {
        let (line, c, msg) = parse_error(&with_system(body));
        assert_eq!(line, 2, "{body}: {msg}");
        assert!(msg.contains(needle), "{body}: {msg}");
        assert_eq!(c, col, "{body}: {msg}");
    }
}

#[test]
fn domain_errors_are_not_parse_errors() {
    let r = parse(&with_system("p = 1; independence = dx; generator 3;"));
    assert!(matches!(r, Err(Error::DegreeZeroGenerator(_))));
    let r = parse("manifold M { coordinates x y; coframe a; d a = x*dy^a; }");
    assert!(matches!(r, Err(Error::DSquaredNonzero { .. })), "{r:?}");
    let r = parse(&with_system("p = 1; independence = dx dy;"));
    assert!(matches!(r, Err(Error::BadIndependenceCondition(_))));
}

#[test]
fn comments_and_whitespace_are_ignored() {
    let a = parse(&format!("# heading\n{PLANE}  # trailing\n")).unwrap();
    let b = parse(PLANE).unwrap();
    assert_eq!(a, b);
}

fn plane() -> Manifold {
    let mut m = parse("manifold M { coordinates x y; const k; }").unwrap().manifold;
    m.declare("z", SymbolKind::Constant);
    m
}

#[test]
fn precedence() {
    let m = plane();
    let s = |t: &str| parse_scalar(&m, t).unwrap();
    assert_eq!(s("-x**2"), s("-(x**2)"));
    assert_eq!(s("2*x**2"), s("2*(x*x)"));
    assert_eq!(s("x**-1"), s("1/x"));
    assert_eq!(s("1 + 2*3"), s("7"));
    assert_eq!(s("x - y - k"), s("x - (y + k)"));
    assert_eq!(s("x/y/k"), s("x/(y*k)"));
    assert_eq!(s("(x + y)**2 - x**2 - 2*x*y"), s("y**2"));
}

#[test]
fn forms_parse_with_d() {
    let m = plane();
    let f = cartan::dsl::parse_form(&m, "d(x*y)").unwrap();
    assert_eq!(f, cartan::dsl::parse_form(&m, "y*dx + x*dy").unwrap());
    assert!(cartan::dsl::parse_form(&m, "d(dx)").unwrap().is_zero());
    assert!(parse_scalar(&m, "dx").is_err());
}

#[test]
fn chart_and_basis_elements() {
    let chart =
        format!("{PLANE}system S on M {{ p = 1; independence = dx; generator dy - dx; }}\nelement {{ a = [[1]]; }}\n");
    let basis = format!(
        "{PLANE}system S on M {{ p = 1; independence = dx; generator dy - dx; }}\nelement {{ basis = [[2, 2]]; }}\n"
    );
    let a = parse(&chart).unwrap().integral_element().unwrap().unwrap();
    let b = parse(&basis).unwrap().integral_element().unwrap().unwrap();
    let sys = parse(&chart).unwrap().system().unwrap().clone();
    assert_eq!(a.chart(&sys).unwrap(), b.chart(&sys).unwrap());
    let bad = format!("{PLANE}element {{ basis = [[1, 2, 3]]; }}\n");
    assert!(parse_error(&bad).2.contains("components"));
}

#[test]
fn prolonged_output_reparses() {
    use cartan::cli::{run, Command, Options};
    let out = run(
        Command::Prolong,
        &fixture_text("immersion"),
        &Options {
            names: Some(vec!["a".into(), "b".into(), "c".into()]),
            ..Options::default()
        },
    );
    assert_eq!(out.code, 0);
    let doc = parse(&out.stdout).unwrap();
    assert_eq!(
        doc.system().unwrap().generators(),
        fixture("immersion-prolonged").system().unwrap().generators()
    );
}
