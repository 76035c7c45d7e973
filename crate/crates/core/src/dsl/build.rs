use std::collections::BTreeSet;

use num_rational::BigRational;

use super::{Expr, Item, MStmt, Pos, SStmt, Spanned};
use crate::coframe::{Manifold, SymbolKind};
use crate::eds::{ExteriorSystem, IntegralElement};
use crate::error::{Error, Result};
use crate::forms::{DForm, TangentVector};
use crate::scalar::{Point, Scalar};

/// How the file specifies an integral element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementSpec {
    /// Chart coordinates, one row per non-independence coframe element.
    Chart(Vec<Vec<BigRational>>),
    /// Basis vectors in components dual to the coframe.
    Basis(Vec<TangentVector>),
}

/// Everything one file describes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub manifold: Manifold,
    pub system: Option<ExteriorSystem>,
    pub point: Option<Point>,
    pub element: Option<ElementSpec>,
    pub seed: Option<u64>,
}

impl Document {
    pub fn system(&self) -> Result<&ExteriorSystem> {
        self.system
            .as_ref()
            .ok_or_else(|| Pos { line: 1, col: 1 }.error("the file has no system block"))
    }

    pub fn point(&self) -> Point {
        self.point.clone().unwrap_or_default()
    }

    pub fn integral_element(&self) -> Result<Option<IntegralElement>> {
        let sys = self.system()?;
        match &self.element {
            None => Ok(None),
            Some(ElementSpec::Chart(a)) => IntegralElement::from_chart(sys, self.point(), a).map(Some),
            Some(ElementSpec::Basis(b)) => Ok(Some(IntegralElement::new(self.point(), b.clone()))),
        }
    }
}

struct Env<'a> {
    manifold: &'a Manifold,
    allow_d: bool,
}

fn eval(e: &Spanned<Expr>, env: &Env) -> Result<DForm> {
    let pos = e.pos;
    Ok(match &e.node {
        Expr::Num(n) => DForm::scalar(Scalar::from_rational(BigRational::from_integer(n.clone()))),
        Expr::Name(s) => {
            if let Some(i) = env.manifold.coframe_index(s) {
                DForm::basis(i)
            } else if env.manifold.symbol(s).is_some() {
                DForm::scalar(Scalar::symbol(s))
            } else {
                return Err(pos.error(format!("unknown name `{s}`")));
            }
        }
        Expr::Neg(a) => eval(a, env)?.neg(),
        Expr::Pow(a, k) => {
            let base = eval(a, env)?;
            let Some(c) = base.as_scalar() else {
                return Err(a.pos.error("only scalars can be raised to a power"));
            };
            DForm::scalar(c.pow(*k).map_err(|_| pos.error("zero raised to a negative power"))?)
        }
        Expr::D(a) => {
            if !env.allow_d {
                return Err(pos.error("d(...) is not allowed here"));
            }
            let f = eval(a, env)?;
            env.manifold.d(&f).map_err(|err| match err {
                Error::UnknownSymbol(s) => pos.error(format!("cannot differentiate: {s}")),
                other => other,
            })?
        }
        Expr::Bin(op, at, a, b) => {
            let (x, y) = (eval(a, env)?, eval(b, env)?);
            match op {
                '+' | '-' => {
                    let y = if *op == '-' { y.neg() } else { y };
                    if x.is_zero() && x.degree() == 0 {
                        y
                    } else if y.is_zero() && y.degree() == 0 {
                        x
                    } else if x.degree() != y.degree() {
                        return Err(at.error(format!("cannot add a {}-form and a {}-form", x.degree(), y.degree())));
                    } else {
                        x.add(&y)?
                    }
                }
                '*' => match (x.as_scalar(), y.as_scalar()) {
                    (Some(c), _) => y.scale(&c),
                    (_, Some(c)) => x.scale(&c),
                    _ => return Err(at.error("use ^ to multiply forms of positive degree")),
                },
                '/' => {
                    let Some(c) = y.as_scalar() else {
                        return Err(b.pos.error("can only divide by a scalar"));
                    };
                    let inv = c.recip().map_err(|_| at.error("division by zero"))?;
                    x.scale(&inv)
                }
                '^' => x.wedge(&y),
                _ => unreachable!("parser only produces + - * / ^"),
            }
        }
    })
}

pub(crate) fn eval_in(m: &Manifold, e: &Spanned<Expr>) -> Result<DForm> {
    eval(
        e,
        &Env {
            manifold: m,
            allow_d: true,
        },
    )
}

fn constant(e: &Spanned<Expr>, m: &Manifold) -> Result<BigRational> {
    let env = Env {
        manifold: m,
        allow_d: false,
    };
    let f = eval(e, &env)?;
    f.as_scalar()
        .and_then(|c| c.as_constant())
        .ok_or_else(|| e.pos.error("expected a rational number"))
}

fn build_manifold(name: &str, body: &[Spanned<MStmt>]) -> Result<Manifold> {
    let mut coframe: Vec<String> = Vec::new();
    let mut decls: Vec<(String, SymbolKind, Pos)> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut claim = |n: &str, pos: Pos| -> Result<()> {
        if n == "d" {
            return Err(pos.error("`d` is reserved"));
        }
        if !seen.insert(n.to_string()) {
            return Err(pos.error(format!("`{n}` is declared twice")));
        }
        Ok(())
    };
    for st in body {
        let pos = st.pos;
        match &st.node {
            MStmt::Coframe(ns) => {
                for n in ns {
                    claim(n, pos)?;
                    coframe.push(n.clone());
                }
            }
            MStmt::Coordinates(ns) => {
                for n in ns {
                    claim(n, pos)?;
                    claim(&format!("d{n}"), pos)?;
                    decls.push((n.clone(), SymbolKind::Coordinate(coframe.len()), pos));
                    coframe.push(format!("d{n}"));
                }
            }
            MStmt::Scalar(ns) | MStmt::Free(ns) | MStmt::Const(ns) => {
                let kind = match &st.node {
                    MStmt::Scalar(_) => SymbolKind::Declared(DForm::zero(1)),
                    MStmt::Free(_) => SymbolKind::Free,
                    _ => SymbolKind::Constant,
                };
                for n in ns {
                    claim(n, pos)?;
                    decls.push((n.clone(), kind.clone(), pos));
                }
            }
            MStmt::D(..) => {}
        }
    }
    decls.sort_by_key(|(_, k, _)| !matches!(k, SymbolKind::Coordinate(_)));
    let mut m = Manifold::new(name, coframe);
    for (n, k, _) in &decls {
        m.declare(n, k.clone());
    }
    let mut done: BTreeSet<String> = BTreeSet::new();
    for st in body {
        let MStmt::D(target, e) = &st.node else {
            continue;
        };
        if !done.insert(target.clone()) {
            return Err(st.pos.error(format!("d{target} is given twice")));
        }
        let env = Env {
            manifold: &m,
            allow_d: false,
        };
        let f = eval(e, &env)?;
        if let Some(i) = m.coframe_index(target) {
            if !f.is_zero() && f.degree() != 2 {
                return Err(e.pos.error(format!("d{target} must be a 2-form")));
            }
            m.set_structure(i, if f.is_zero() { DForm::zero(2) } else { f });
            continue;
        }
        match m.symbol(target) {
            Some(SymbolKind::Declared(_)) => {
                if !f.is_zero() && f.degree() != 1 {
                    return Err(e.pos.error(format!("d{target} must be a 1-form")));
                }
                let f = if f.is_zero() { DForm::zero(1) } else { f };
                m.declare(target, SymbolKind::Declared(f));
            }
            Some(_) => {
                return Err(st
                    .pos
                    .error(format!("the differential of `{target}` is fixed by its declaration")))
            }
            None => return Err(st.pos.error(format!("unknown name `{target}`"))),
        }
    }
    for (n, k, pos) in &decls {
        if matches!(k, SymbolKind::Declared(_)) && !done.contains(n) {
            return Err(pos.error(format!("scalar `{n}` has no `d {n} = ...;` statement")));
        }
    }
    m.validate()?;
    Ok(m)
}

pub(crate) fn build(items: &[Spanned<Item>]) -> Result<Document> {
    let mut manifold: Option<Manifold> = None;
    let mut doc_system = None;
    let mut point = None;
    let mut element = None;
    let mut seed = None;
    for it in items {
        let pos = it.pos;
        match &it.node {
            Item::Manifold { name, body } => {
                if manifold.is_some() {
                    return Err(pos.error("only one manifold block is allowed"));
                }
                manifold = Some(build_manifold(name, body)?);
            }
            Item::System { name, on, body } => {
                let Some(m) = &manifold else {
                    return Err(pos.error("the manifold block must come first"));
                };
                if on.node != m.name() {
                    return Err(on.pos.error(format!("no manifold named `{}`", on.node)));
                }
                if doc_system.is_some() {
                    return Err(pos.error("only one system block is allowed"));
                }
                let env = Env {
                    manifold: m,
                    allow_d: true,
                };
                let mut p = None;
                let mut indep = None;
                let mut gens = Vec::new();
                for st in body {
                    match &st.node {
                        SStmt::P(k) => p = Some(*k),
                        SStmt::Independence(ns) => {
                            let idx = ns
                                .iter()
                                .map(|n| {
                                    m.coframe_index(n)
                                        .ok_or_else(|| st.pos.error(format!("`{n}` is not a coframe element")))
                                })
                                .collect::<Result<Vec<_>>>()?;
                            indep = Some(idx);
                        }
                        SStmt::Generator(e) => gens.push(eval(e, &env)?),
                    }
                }
                let p = p.ok_or_else(|| pos.error("system requires p"))?;
                let indep = indep.ok_or_else(|| pos.error("missing `independence = ...;`"))?;
                doc_system = Some((name.clone(), gens, p, indep));
            }
            Item::Point(binds) => {
                let Some(m) = &manifold else {
                    return Err(pos.error("the manifold block must come first"));
                };
                let mut pt = Point::new();
                for (n, e) in binds {
                    if m.symbol(&n.node).is_none() {
                        return Err(n.pos.error(format!("unknown name `{}`", n.node)));
                    }
                    if pt.contains(&n.node) {
                        return Err(n.pos.error(format!("`{}` is given twice", n.node)));
                    }
                    pt.insert(n.node.clone(), constant(e, m)?);
                }
                point = Some(pt);
            }
            Item::Element { basis, rows } => {
                let Some(m) = &manifold else {
                    return Err(pos.error("the manifold block must come first"));
                };
                let vals = rows
                    .iter()
                    .map(|r| r.iter().map(|e| constant(e, m)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                element = Some(if *basis {
                    if let Some(r) = vals.iter().find(|r| r.len() != m.dim()) {
                        return Err(pos.error(format!(
                            "basis vector has {} components, manifold has dimension {}",
                            r.len(),
                            m.dim()
                        )));
                    }
                    ElementSpec::Basis(vals.into_iter().map(TangentVector).collect())
                } else {
                    ElementSpec::Chart(vals)
                });
            }
            Item::Seed(s) => seed = Some(*s),
        }
    }
    let manifold = manifold.ok_or_else(|| Pos { line: 1, col: 1 }.error("missing manifold block"))?;
    let system = match doc_system {
        Some((name, gens, p, indep)) => Some(ExteriorSystem::new(name, manifold.clone(), gens, p, indep)?),
        None => None,
    };
    Ok(Document {
        manifold,
        system,
        point,
        element,
        seed,
    })
}
