//! Manifolds presented by a coframe with structure equations.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::forms::DForm;
use crate::scalar::{Point, Scalar};

/// How a scalar symbol gets its differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    /// A coordinate function whose differential is the given coframe element.
    Coordinate(usize),
    /// A function with a declared differential.
    Declared(DForm),
    /// A constant: differential zero.
    Constant,
    /// A value-only symbol (e.g. a higher derivative of a curvature function).
    /// Its differential is unknown, so `d` of anything containing it fails.
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifold {
    name: String,
    coframe: Vec<String>,
    structure: Vec<DForm>,
    symbols: BTreeMap<String, SymbolKind>,
    /// Declaration order, for printing.
    order: Vec<String>,
}

/// Checks that could not be carried out because they need the differential
/// of a value-only symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Validation {
    pub unchecked: Vec<String>,
}

impl Manifold {
    pub fn new(name: impl Into<String>, coframe: Vec<String>) -> Self {
        let n = coframe.len();
        Manifold {
            name: name.into(),
            coframe,
            structure: vec![DForm::zero(2); n],
            symbols: BTreeMap::new(),
            order: Vec::new(),
        }
    }

    /// `R^n` with coordinates `xs` and coframe `dx` for each coordinate `x`.
    pub fn coordinates(name: impl Into<String>, xs: &[&str]) -> Self {
        let mut m = Manifold::new(name, xs.iter().map(|x| format!("d{x}")).collect());
        for (i, x) in xs.iter().enumerate() {
            m.declare(x, SymbolKind::Coordinate(i));
        }
        m
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn dim(&self) -> usize {
        self.coframe.len()
    }

    pub fn coframe(&self) -> &[String] {
        &self.coframe
    }

    pub fn coframe_index(&self, name: &str) -> Option<usize> {
        self.coframe.iter().position(|c| c == name)
    }

    pub fn structure(&self, i: usize) -> &DForm {
        &self.structure[i]
    }

    pub fn set_structure(&mut self, i: usize, d: DForm) {
        self.structure[i] = d;
    }

    pub fn declare(&mut self, name: &str, kind: SymbolKind) {
        if self.symbols.insert(name.to_string(), kind).is_none() {
            self.order.push(name.to_string());
        }
    }

    pub fn symbol(&self, name: &str) -> Option<&SymbolKind> {
        self.symbols.get(name)
    }

    /// Symbols in declaration order.
    pub fn symbols(&self) -> impl Iterator<Item = (&str, &SymbolKind)> {
        self.order.iter().map(|n| (n.as_str(), &self.symbols[n]))
    }

    pub fn coordinate_name(&self, i: usize) -> Option<&str> {
        self.symbols.iter().find_map(|(n, k)| match k {
            SymbolKind::Coordinate(j) if *j == i => Some(n.as_str()),
            _ => None,
        })
    }

    /// True when all structure equations vanish and every coframe element is
    /// the differential of a declared coordinate.
    pub fn is_coordinate(&self) -> bool {
        self.structure.iter().all(DForm::is_zero) && (0..self.dim()).all(|i| self.coordinate_name(i).is_some())
    }

    /// Differential of a scalar, by the chain rule over its symbols.
    pub fn d_scalar(&self, c: &Scalar) -> Result<DForm> {
        let mut out = DForm::zero(1);
        for s in c.symbols() {
            let ds = match self.symbols.get(&*s) {
                None => return Err(Error::UnknownSymbol(s.to_string())),
                Some(SymbolKind::Constant) => continue,
                Some(SymbolKind::Free) => {
                    return Err(Error::UnknownSymbol(format!("d{s} (differential not declared)")))
                }
                Some(SymbolKind::Coordinate(i)) => DForm::basis(*i),
                Some(SymbolKind::Declared(f)) => f.clone(),
            };
            let k = c.partial(&s);
            if !k.is_zero() {
                out = out.add(&ds.scale(&k))?;
            }
        }
        Ok(out)
    }

    /// Exterior derivative.
    pub fn d(&self, form: &DForm) -> Result<DForm> {
        let mut out = DForm::zero(form.degree() + 1);
        for (idx, c) in form.terms() {
            let dc = self.d_scalar(c)?;
            if !dc.is_zero() {
                out = out.add(&dc.wedge(&DForm::monomial(idx, Scalar::one())))?;
            }
            for (j, &i) in idx.iter().enumerate() {
                let dtheta = &self.structure[i];
                if dtheta.is_zero() {
                    continue;
                }
                let before = DForm::monomial(&idx[..j], Scalar::one());
                let after = DForm::monomial(&idx[j + 1..], Scalar::one());
                let mut t = before.wedge(dtheta).wedge(&after).scale(c);
                if j % 2 == 1 {
                    t = t.neg();
                }
                out = out.add(&t)?;
            }
        }
        Ok(out)
    }

    fn check_symbols(&self, form: &DForm) -> Result<()> {
        for (idx, c) in form.terms() {
            if let Some(&i) = idx.iter().find(|&&i| i >= self.dim()) {
                return Err(Error::Dimension(format!("coframe index {i} out of range")));
            }
            for s in c.symbols() {
                if !self.symbols.contains_key(&*s) {
                    return Err(Error::UnknownSymbol(s.to_string()));
                }
            }
        }
        Ok(())
    }

    /// Confirms `d(d theta) = 0` for every coframe element and `d(d f) = 0` for
    /// every declared scalar.
    pub fn validate(&self) -> Result<Validation> {
        let mut report = Validation::default();
        for d in &self.structure {
            self.check_symbols(d)?;
        }
        for (name, kind) in &self.symbols {
            if let SymbolKind::Declared(f) = kind {
                self.check_symbols(f)?;
                if f.degree() != 1 && !f.is_zero() {
                    return Err(Error::DegreeError(format!("d{name} must be a 1-form")));
                }
            }
            if let SymbolKind::Coordinate(i) = kind {
                if *i >= self.dim() {
                    return Err(Error::Dimension(format!("coordinate {name} has no coframe element")));
                }
            }
        }
        let mut check = |what: String, f: &DForm| -> Result<()> {
            match self.d(f) {
                Ok(dd) if dd.is_zero() => Ok(()),
                Ok(dd) => Err(Error::DSquaredNonzero {
                    what,
                    residual: dd.display(&self.coframe).to_string(),
                }),
                Err(Error::UnknownSymbol(s)) if s.contains("not declared") => {
                    report.unchecked.push(what);
                    Ok(())
                }
                Err(e) => Err(e),
            }
        };
        for (i, d) in self.structure.iter().enumerate() {
            check(self.coframe[i].clone(), d)?;
        }
        for name in &self.order {
            if let SymbolKind::Declared(f) = &self.symbols[name] {
                check(name.clone(), f)?;
            }
        }
        Ok(report)
    }

    /// Ensures the point binds every symbol of the manifold.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        for name in &self.order {
            if !p.contains(name) {
                return Err(Error::UnboundSymbol(name.clone()));
            }
        }
        Ok(())
    }

    /// Removes a coframe element, replacing it everywhere by `replacement`
    /// (a 1-form not involving it). Indices above it shift down by one.
    pub fn eliminate_coframe(&self, k: usize, replacement: &DForm) -> Result<(Manifold, Vec<DForm>)> {
        let n = self.dim();
        let images: Vec<DForm> = (0..n)
            .map(|i| match i.cmp(&k) {
                std::cmp::Ordering::Less => DForm::basis(i),
                std::cmp::Ordering::Equal => DForm::zero(1),
                std::cmp::Ordering::Greater => DForm::basis(i - 1),
            })
            .collect();
        let rep = replacement.pullback(&images);
        let mut images = images;
        images[k] = rep;
        let mut coframe = self.coframe.clone();
        coframe.remove(k);
        let mut m = Manifold::new(self.name.clone(), coframe);
        let mut j = 0;
        for i in 0..n {
            if i == k {
                continue;
            }
            m.structure[j] = self.structure[i].pullback(&images);
            j += 1;
        }
        for name in &self.order {
            let kind = match &self.symbols[name] {
                SymbolKind::Coordinate(i) if *i == k => SymbolKind::Declared(images[k].clone()),
                SymbolKind::Coordinate(i) if *i > k => SymbolKind::Coordinate(i - 1),
                SymbolKind::Declared(f) => SymbolKind::Declared(f.pullback(&images)),
                other => other.clone(),
            };
            m.declare(name, kind);
        }
        Ok((m, images))
    }

    /// Applies a scalar substitution to all structure data and drops the
    /// substituted symbol.
    pub fn substitute(&self, bindings: &BTreeMap<String, Scalar>) -> Result<Manifold> {
        let mut m = Manifold::new(self.name.clone(), self.coframe.clone());
        for (i, d) in self.structure.iter().enumerate() {
            m.structure[i] = d.substitute(bindings)?;
        }
        for name in &self.order {
            if bindings.contains_key(name) {
                continue;
            }
            let kind = match &self.symbols[name] {
                SymbolKind::Declared(f) => SymbolKind::Declared(f.substitute(bindings)?),
                other => other.clone(),
            };
            m.declare(name, kind);
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: &str) -> Scalar {
        Scalar::symbol(n)
    }

    #[test]
    fn coordinate_manifold_validates() {
        let m = Manifold::coordinates("R5", &["x", "y", "u", "ux", "uy"]);
        assert_eq!(m.dim(), 5);
        assert!(m.is_coordinate());
        assert!(m.validate().unwrap().unchecked.is_empty());
    }

    #[test]
    fn d_of_contact_form() {
        // d(du - ux dx - uy dy) = -dux^dx - duy^dy
        let m = Manifold::coordinates("R5", &["x", "y", "u", "ux", "uy"]);
        let theta = DForm::basis(2)
            .sub(&DForm::basis(0).scale(&s("ux")))
            .unwrap()
            .sub(&DForm::basis(1).scale(&s("uy")))
            .unwrap();
        let expected = DForm::basis(3)
            .wedge(&DForm::basis(0))
            .neg()
            .sub(&DForm::basis(4).wedge(&DForm::basis(1)))
            .unwrap();
        assert_eq!(m.d(&theta).unwrap(), expected);
    }

    #[test]
    fn nonclosed_structure_is_rejected() {
        // d t1 = t2^t3 with d t2 = t1^t2 gives d^2 t1 = t1^t2^t3.
        let mut m = Manifold::new("A", vec!["t1".into(), "t2".into()]);
        m.set_structure(0, DForm::basis(0).wedge(&DForm::basis(1)));
        assert!(m.validate().is_ok());
        let mut h = Manifold::new("H", vec!["t1".into(), "t2".into(), "t3".into()]);
        h.set_structure(0, DForm::basis(1).wedge(&DForm::basis(2)));
        assert!(h.validate().is_ok());
        h.set_structure(1, DForm::basis(0).wedge(&DForm::basis(1)));
        assert!(matches!(h.validate(), Err(Error::DSquaredNonzero { .. })));
    }

    #[test]
    fn undeclared_coefficient() {
        let mut m = Manifold::new("H", vec!["t1".into(), "t2".into(), "t3".into()]);
        m.set_structure(0, DForm::basis(1).wedge(&DForm::basis(2)).scale(&s("f")));
        assert_eq!(m.validate(), Err(Error::UnknownSymbol("f".into())));
    }

    #[test]
    fn free_symbols_skip_checks() {
        let mut m = Manifold::new("P", vec!["t1".into(), "t2".into()]);
        m.declare("K", SymbolKind::Declared(DForm::basis(0).scale(&s("K1"))));
        m.declare("K1", SymbolKind::Free);
        let v = m.validate().unwrap();
        assert_eq!(v.unchecked, vec!["K".to_string()]);
        assert!(m.d(&DForm::basis(1).scale(&s("K"))).is_ok());
        assert!(m.d(&DForm::basis(1).scale(&s("K1"))).is_err());
    }
}
