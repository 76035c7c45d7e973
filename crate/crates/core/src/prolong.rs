//! Prolongation, torsion of linear Pfaffian systems, and restriction to the
//! zero locus of a function.

use std::collections::BTreeMap;

use crate::coframe::SymbolKind;
use crate::eds::ExteriorSystem;
use crate::error::{Error, Result};
use crate::forms::DForm;
use crate::involution::{cartan_test, chart_equations, chart_values, solve_staged, CartanReport};
use crate::linalg::{self, Matrix};
use crate::scalar::{Point, Scalar};

#[derive(Clone, Debug)]
pub struct Prolongation {
    pub system: ExteriorSystem,
    /// New coordinates, one per free chart unknown.
    pub parameters: Vec<String>,
    /// Each chart unknown as a function of the parameters.
    pub solution: Vec<(String, Scalar)>,
    /// Chart unknown corresponding to each parameter.
    pub parameter_unknowns: Vec<String>,
    pub torsion: Vec<TorsionEntry>,
}

/// A component of `d(theta_r)` modulo the generators that no choice of
/// absorption removes, at `omega_j ^ omega_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionEntry {
    pub generator: usize,
    pub pair: (usize, usize),
    pub value: Scalar,
}

/// Replaces the system by the Pfaffian system on its variety of integral
/// elements, parametrized by the chart unknowns left free when the chart
/// equations are solved (latest unknowns eliminated first).
pub fn prolong(sys: &ExteriorSystem, names: Option<&[String]>) -> Result<Prolongation> {
    let eqs = chart_equations(sys);
    let cols = eqs.chart.unknowns.len();
    let order: Vec<usize> = (0..cols).rev().collect();
    let sol = solve_staged(&eqs.chart, eqs.equations.clone(), &order)?;
    let free = sol.free.clone();
    let params: Vec<String> = match names {
        Some(ns) if ns.len() != free.len() => {
            return Err(Error::Dimension(format!(
                "{} names given for {} parameters",
                ns.len(),
                free.len()
            )))
        }
        Some(ns) => ns.to_vec(),
        None => free.iter().map(|&f| eqs.chart.unknowns[f].clone()).collect(),
    };

    let old = sys.manifold();
    let n = old.dim();
    let mut coframe = old.coframe().to_vec();
    for p in &params {
        let dp = format!("d{p}");
        if old.symbol(p).is_some() || coframe.contains(&dp) {
            return Err(Error::NotSolvable(format!("name `{p}` is already in use")));
        }
        coframe.push(dp);
    }
    let mut m = crate::coframe::Manifold::new(old.name(), coframe);
    for i in 0..n {
        m.set_structure(i, old.structure(i).clone());
    }
    for (name, kind) in old.symbols() {
        m.declare(name, kind.clone());
    }
    for (k, p) in params.iter().enumerate() {
        m.declare(p, SymbolKind::Coordinate(n + k));
    }

    let rename: BTreeMap<String, Scalar> = free
        .iter()
        .zip(&params)
        .map(|(&f, p)| (eqs.chart.unknowns[f].clone(), Scalar::symbol(p)))
        .collect();
    let mut value = vec![Scalar::zero(); cols];
    for (k, &f) in free.iter().enumerate() {
        value[f] = Scalar::symbol(&params[k]);
    }
    for (c, v) in &sol.solved {
        value[*c] = v.substitute(&rename)?;
    }

    let p = sys.p();
    let mut gens = Vec::new();
    for (r, &i) in eqs.chart.pi.iter().enumerate() {
        let mut g = DForm::basis(i);
        for (j, &w) in eqs.chart.omega.iter().enumerate() {
            let t = DForm::basis(w).scale(&value[r * p + j]);
            g = g.sub(&t)?;
        }
        gens.push(g);
    }
    let system = ExteriorSystem::new(
        format!("{}_prolonged", sys.name()),
        m,
        gens,
        p,
        sys.independence().to_vec(),
    )?;
    let torsion = torsion(&system)?;
    Ok(Prolongation {
        system,
        parameter_unknowns: free.iter().map(|&f| eqs.chart.unknowns[f].clone()).collect(),
        parameters: params,
        solution: eqs.chart.unknowns.iter().cloned().zip(value).collect(),
        torsion,
    })
}

/// Torsion of a system generated by 1-forms: the part of `d theta` modulo
/// the generators, quadratic in the independence forms, that cannot be
/// absorbed by changing the remaining forms by multiples of them.
pub fn torsion(sys: &ExteriorSystem) -> Result<Vec<TorsionEntry>> {
    let m = sys.manifold();
    let n = sys.dim();
    let p = sys.p();
    let gens: Vec<&DForm> = sys.generators().iter().filter(|g| !g.is_zero()).collect();
    if let Some(g) = gens.iter().find(|g| g.degree() != 1) {
        return Err(Error::DegreeError(format!(
            "torsion needs a Pfaffian system; `{}` has degree {}",
            g.display(m.coframe()),
            g.degree()
        )));
    }
    let covec = |f: &DForm| -> Vec<Scalar> { (0..n).map(|i| f.coeff(&[i])).collect() };

    // Adapted basis: independent generators, independence forms, then
    // coframe elements completing it.
    let mut rows: Matrix<Scalar> = Vec::new();
    let mut kept = Vec::new();
    for (k, g) in gens.iter().enumerate() {
        let mut t = rows.clone();
        t.push(covec(g));
        if linalg::rank(&t) > rows.len() {
            rows = t;
            kept.push(k);
        }
    }
    let s = rows.len();
    for &w in sys.independence() {
        rows.push(covec(&DForm::basis(w)));
    }
    if linalg::rank(&rows) < s + p {
        return Err(Error::BadIndependenceCondition(
            "independence forms are not independent modulo the generators".into(),
        ));
    }
    for i in 0..n {
        if rows.len() == n {
            break;
        }
        let mut t = rows.clone();
        t.push(covec(&DForm::basis(i)));
        if linalg::rank(&t) > rows.len() {
            rows = t;
        }
    }
    let inv = inverse(&rows)?;
    let images: Vec<DForm> = (0..n)
        .map(|i| DForm::from_terms(1, (0..n).map(|a| (vec![a], inv[i][a].clone()))))
        .collect();

    let q = n - s - p;
    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|j| (j + 1..p).map(move |l| (j, l))).collect();
    let nl = q * p;
    let mut pivots: Vec<(usize, Vec<Scalar>, Scalar)> = Vec::new();
    let mut out = Vec::new();
    for &k in &kept {
        let dt = m.d(gens[k])?.pullback(&images);
        let mut pmat = vec![vec![Scalar::zero(); p]; q];
        let mut tmat = vec![vec![Scalar::zero(); p]; p];
        for (idx, c) in dt.terms() {
            let (u, v) = (idx[0], idx[1]);
            if u < s {
                continue;
            }
            match (u < s + p, v < s + p) {
                (true, true) => tmat[u - s][v - s] = c.clone(),
                (true, false) => pmat[v - s - p][u - s] = -c,
                _ => {
                    return Err(Error::DegreeError(format!(
                        "d of generator {} is quadratic in the non-independence forms",
                        k + 1
                    )))
                }
            }
        }
        for &(j, l) in &pairs {
            let mut row = vec![Scalar::zero(); nl];
            for (mi, pr) in pmat.iter().enumerate() {
                row[mi * p + j] = &row[mi * p + j] + &pr[l];
                row[mi * p + l] = &row[mi * p + l] - &pr[j];
            }
            let mut t = tmat[j][l].clone();
            for (pc, prow, pt) in &pivots {
                let f = row[*pc].clone();
                if f.is_zero() {
                    continue;
                }
                for (x, y) in row.iter_mut().zip(prow) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
                t = &t - &(&f * pt);
            }
            match row.iter().position(|x| !x.is_zero()) {
                None => {
                    if !t.is_zero() {
                        out.push(TorsionEntry {
                            generator: k,
                            pair: (sys.independence()[j], sys.independence()[l]),
                            value: t,
                        });
                    }
                }
                Some(pc) => {
                    let lead = row[pc].clone();
                    let row: Vec<Scalar> = row.iter().map(|x| x.checked_div(&lead)).collect::<Result<_>>()?;
                    let t = t.checked_div(&lead)?;
                    pivots.push((pc, row, t));
                }
            }
        }
    }
    Ok(out)
}

fn inverse(m: &Matrix<Scalar>) -> Result<Matrix<Scalar>> {
    let n = m.len();
    let mut aug: Matrix<Scalar> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    let order: Vec<usize> = (0..n).collect();
    let piv = linalg::rref_with_order(&mut aug, Some(&order));
    if piv.len() < n {
        return Err(Error::DependentBasis);
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Restricts to the locus `equation = 0` by solving it for the coordinate
/// `solve_for` (the equation must be affine in it with nonzero coefficient).
pub fn restrict(sys: &ExteriorSystem, equation: &Scalar, solve_for: &str) -> Result<ExteriorSystem> {
    if equation.is_zero() {
        return Ok(sys.clone());
    }
    let (k, rest) = equation
        .affine_in(solve_for)
        .ok_or_else(|| Error::NotSolvable(format!("{solve_for}: equation is not affine in it")))?;
    if k.is_zero() {
        return Err(Error::NotSolvable(format!("{solve_for}: equation does not involve it")));
    }
    let value = (-rest).checked_div(&k)?;
    let m = sys.manifold();
    let i = match m.symbol(solve_for) {
        Some(SymbolKind::Coordinate(i)) => *i,
        Some(_) => {
            return Err(Error::NotSolvable(format!(
                "{solve_for}: only coordinates can be solved for"
            )))
        }
        None => return Err(Error::UnknownSymbol(solve_for.to_string())),
    };
    if sys.independence().contains(&i) {
        return Err(Error::NotSolvable(format!(
            "{solve_for}: its differential is an independence form"
        )));
    }
    let rep = m.d_scalar(&value)?;
    if !rep.coeff(&[i]).is_zero() {
        return Err(Error::NotSolvable(format!(
            "{solve_for}: its differential cannot be eliminated"
        )));
    }
    let (m2, images) = m.eliminate_coframe(i, &rep)?;
    let bindings: BTreeMap<String, Scalar> = [(solve_for.to_string(), value)].into_iter().collect();
    let m3 = m2.substitute(&bindings)?;
    m3.validate()?;
    let gens = sys
        .generators()
        .iter()
        .map(|g| g.pullback(&images).substitute(&bindings))
        .collect::<Result<Vec<_>>>()?;
    let indep = sys
        .independence()
        .iter()
        .map(|&j| if j > i { j - 1 } else { j })
        .collect();
    ExteriorSystem::new(sys.name(), m3, gens, sys.p(), indep)
}

/// Why [`iterate_prolongation`] stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stop {
    Involutive,
    Torsion(Vec<TorsionEntry>),
    AffineOnly(String),
    MaxSteps,
}

#[derive(Clone, Debug)]
pub struct Iteration {
    pub reports: Vec<CartanReport>,
    pub stop: Stop,
    /// The last system reached, with the point lifted to it.
    pub system: ExteriorSystem,
    pub point: Point,
}

/// Alternates Cartan's test and prolongation until the system is involutive,
/// torsion appears, or `max_steps` prolongations have been made.
pub fn iterate_prolongation(sys: &ExteriorSystem, point: &Point, max_steps: usize, seed: u64) -> Result<Iteration> {
    let mut cur = sys.clone();
    let mut pt = point.clone();
    let mut reports = Vec::new();
    let mut steps = 0;
    loop {
        let report = cartan_test(&cur, &pt, None, seed)?;
        let involutive = report.involutive;
        let chart = report.chart.clone();
        reports.push(report);
        let stop = if involutive {
            Some(Stop::Involutive)
        } else if steps == max_steps {
            Some(Stop::MaxSteps)
        } else {
            None
        };
        if let Some(stop) = stop {
            return Ok(Iteration {
                reports,
                stop,
                system: cur,
                point: pt,
            });
        }
        let pr = match prolong(&cur, None) {
            Ok(pr) => pr,
            Err(Error::AffineOnly(msg)) => {
                return Ok(Iteration {
                    reports,
                    stop: Stop::AffineOnly(msg),
                    system: cur,
                    point: pt,
                })
            }
            Err(e) => return Err(e),
        };
        let values = chart_values(&crate::involution::Chart::new(&cur), &chart);
        for (param, unknown) in pr.parameters.iter().zip(&pr.parameter_unknowns) {
            pt.insert(param.clone(), values[unknown].clone());
        }
        steps += 1;
        cur = pr.system;
        if !pr.torsion.is_empty() {
            return Ok(Iteration {
                reports,
                stop: Stop::Torsion(pr.torsion),
                system: cur,
                point: pt,
            });
        }
    }
}
