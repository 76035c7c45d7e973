mod common;

use std::process::Command;

use common::*;

fn cartan(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cartan")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn path(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

fn temp(name: &str, text: &str) -> String {
    let p = std::env::temp_dir().join(format!("cartan-cli-{}-{name}.eds", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn harmonic_verdict_line() {
    let (code, out) = cartan(&["cartan-test", &path("harmonic")]);
    assert_eq!(code, 0);
    assert_eq!(
        out.lines().next().unwrap(),
        "involutive: yes; characters (1,2,0); predicted 7; actual 7"
    );
}

#[test]
fn immersion_verdict_line() {
    let (code, out) = cartan(&["cartan-test", &path("immersion")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("involutive: no; s1 + 2*s2 = 4 > 3;"), "{out}");
}

#[test]
fn torsion_line() {
    let (code, out) = cartan(&["torsion", &path("immersion-prolonged")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("t = -a**2 - b*c - K - R33 + s/2"), "{out}");
}

#[test]
fn torsion_with_solve_for_reruns_the_test() {
    let (code, out) = cartan(&["torsion", &path("immersion-prolonged"), "--solve-for", "b"]);
    assert_eq!(code, 0);
    assert!(
        out.contains("involutive: yes; characters (6,2,0,0); predicted 13; actual 13"),
        "{out}"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(cartan(&["cartan-test", &path("trivial-2")]).0, 1);
    assert_eq!(cartan(&["symbol", &path("webs")]).0, 1);
    let parse = temp("parse", "manifold M { coordinates x; }\nsystem S on M { }\n");
    let (code, out) = cartan(&["cartan-test", &parse]);
    assert_eq!(code, 2);
    assert_eq!(out, "error: 2:1: system requires p\n");
    let not_integral = temp(
        "nonint",
        "manifold M { coordinates x y; }\nsystem S on M { p = 1; independence = dx; generator dy; }\n\
         point { x = 0; y = 0; }\nelement { a = [[1]]; }\n",
    );
    assert_eq!(cartan(&["check-element", &not_integral]).0, 1);
    assert_eq!(cartan(&["cartan-test", &not_integral]).0, 1);
    assert_eq!(cartan(&["cartan-test", "/nonexistent/file.eds"]).0, 2);
}

#[test]
fn json_flag_switches_format() {
    let (code, out) = cartan(&["cartan-test", &path("webs"), "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "v1");
    assert_eq!(v["characters"], serde_json::json!([0, 0, 3, 0]));
    assert_eq!(v["predicted_dim"], 12);
    assert_eq!(v["actual_dim"], 12);
    assert_eq!(v["involutive"], true);
    assert_eq!(v["linearity_caveat"], false);
    assert!(v["generality"].is_string());
}

#[test]
fn error_json_has_position() {
    let parse = temp("parse-json", "manifold M { coordinates x; }\nsystem S on M { }\n");
    let (code, out) = cartan(&["cartan-test", &parse, "--json"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["kind"], "parse");
    assert_eq!(v["error"]["line"], 2);
    assert_eq!(v["error"]["column"], 1);
}

#[test]
fn symbol_accepts_a_covector() {
    let (code, out) = cartan(&["symbol", &path("harmonic"), "--xi", "3,-1/2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("symbol at xi = (3,-1/2)"), "{out}");
    assert!(out.contains("characteristic: no"), "{out}");
    let (code, _) = cartan(&["symbol", &path("harmonic"), "--xi", "1"]);
    assert_eq!(code, 1);
}

#[test]
fn seed_flag_is_deterministic() {
    let a = cartan(&["cartan-test", &path("lagrangian-n3"), "--json", "--seed", "7"]);
    let b = cartan(&["cartan-test", &path("lagrangian-n3"), "--json", "--seed", "7"]);
    assert_eq!(a, b);
}

#[test]
fn prolong_names_and_iteration() {
    let (code, out) = cartan(&["prolong", &path("immersion"), "--names", "a,b,c"]);
    assert_eq!(code, 0);
    assert!(out.contains("# parameters: a b c"), "{out}");
    let (code, out) = cartan(&["prolong", &path("immersion"), "--max-steps", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("stopped: torsion"), "{out}");
    let (code, _) = cartan(&["prolong", &path("immersion"), "--names", "a,b"]);
    assert_eq!(code, 1);
}
