use std::fmt::Write;

use super::{Document, ElementSpec};
use crate::coframe::{Manifold, SymbolKind};
use crate::eds::ExteriorSystem;
use crate::scalar::format_rational;

fn manifold(m: &Manifold, out: &mut String) {
    let names = m.coframe();
    writeln!(out, "manifold {} {{", m.name()).unwrap();
    let mut i = 0;
    while i < names.len() {
        let coord = |i: usize| m.coordinate_name(i).filter(|x| names[i] == format!("d{x}"));
        let is_coord = coord(i).is_some();
        let mut run = Vec::new();
        while i < names.len() && coord(i).is_some() == is_coord {
            run.push(coord(i).map_or_else(|| names[i].clone(), str::to_string));
            i += 1;
        }
        let kw = if is_coord { "coordinates" } else { "coframe" };
        writeln!(out, "    {kw} {};", run.join(" ")).unwrap();
    }
    let mut loose = Vec::new();
    let mut groups: Vec<(&str, Vec<&str>)> = Vec::new();
    for (name, kind) in m.symbols() {
        let kw = match kind {
            SymbolKind::Coordinate(i) if names[*i] == format!("d{name}") => continue,
            SymbolKind::Coordinate(_) => {
                loose.push(name);
                "scalar"
            }
            SymbolKind::Declared(_) => "scalar",
            SymbolKind::Free => "free",
            SymbolKind::Constant => "const",
        };
        match groups.last_mut() {
            Some((k, v)) if *k == kw => v.push(name),
            _ => groups.push((kw, vec![name])),
        }
    }
    for (kw, v) in &groups {
        writeln!(out, "    {kw} {};", v.join(" ")).unwrap();
    }
    for (i, n) in names.iter().enumerate() {
        let d = m.structure(i);
        if !d.is_zero() {
            writeln!(out, "    d {n} = {};", d.display(names)).unwrap();
        }
    }
    for (name, kind) in m.symbols() {
        match kind {
            SymbolKind::Declared(f) => writeln!(out, "    d {name} = {};", f.display(names)).unwrap(),
            SymbolKind::Coordinate(i) if loose.contains(&name) => {
                writeln!(out, "    d {name} = {};", names[*i]).unwrap()
            }
            _ => {}
        }
    }
    out.push_str("}\n");
}

fn system(s: &ExteriorSystem, out: &mut String) {
    let names = s.manifold().coframe();
    writeln!(out, "system {} on {} {{", s.name(), s.manifold().name()).unwrap();
    writeln!(out, "    p = {};", s.p()).unwrap();
    let ind: Vec<&str> = s.independence().iter().map(|&i| names[i].as_str()).collect();
    if ind.is_empty() {
        writeln!(out, "    independence = ;").unwrap();
    } else {
        writeln!(out, "    independence = {};", ind.join(" ")).unwrap();
    }
    for g in s.generators() {
        writeln!(out, "    generator {};", g.display(names)).unwrap();
    }
    out.push_str("}\n");
}

/// Prints a document in the form [`super::parse`] reads.
pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    let m = doc.system.as_ref().map_or(&doc.manifold, |s| s.manifold());
    manifold(m, &mut out);
    if let Some(s) = &doc.system {
        system(s, &mut out);
    }
    if let Some(p) = &doc.point {
        out.push_str("point {");
        for (k, v) in p.iter() {
            write!(out, " {k} = {};", format_rational(v)).unwrap();
        }
        out.push_str(" }\n");
    }
    if let Some(e) = &doc.element {
        let (kw, rows): (&str, Vec<Vec<String>>) = match e {
            ElementSpec::Chart(a) => ("a", a.iter().map(|r| r.iter().map(format_rational).collect()).collect()),
            ElementSpec::Basis(b) => (
                "basis",
                b.iter().map(|v| v.0.iter().map(format_rational).collect()).collect(),
            ),
        };
        let rows: Vec<String> = rows.iter().map(|r| format!("[{}]", r.join(", "))).collect();
        writeln!(out, "element {{ {kw} = [{}]; }}", rows.join(", ")).unwrap();
    }
    if let Some(s) = doc.seed {
        writeln!(out, "seed = {s};").unwrap();
    }
    out
}
