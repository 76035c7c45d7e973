#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use cartan::dsl::{self, Document};
use cartan::involution::cartan_test;
use cartan::{CartanReport, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.eds"))
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture(name: &str) -> Document {
    dsl::parse(&fixture_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn report(name: &str) -> CartanReport {
    let doc = fixture(name);
    let sys = doc.system().unwrap();
    let e = doc.integral_element().unwrap();
    cartan_test(sys, &doc.point(), e.as_ref(), doc.seed.unwrap_or(0)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    q(n, 1)
}

/// Parses a scalar expression in the symbols of a fixture's system.
pub fn scalar_in(doc: &Document, expr: &str) -> Scalar {
    let m = doc.system.as_ref().map_or(&doc.manifold, |s| s.manifold());
    dsl::parse_scalar(m, expr).unwrap_or_else(|e| panic!("{expr}: {e}"))
}

pub const ALL_FIXTURES: [&str; 15] = [
    "lagrangian-n2",
    "lagrangian-n3",
    "lagrangian-n4",
    "harmonic",
    "webs",
    "immersion",
    "immersion-prolonged",
    "frobenius",
    "plane-curves",
    "trivial-0",
    "trivial-1",
    "trivial-2",
    "trivial-3",
    "trivial-4",
    "trivial-5",
];
