//! Polar equations, Cartan characters and the involutivity test.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::eds::{integral_witness, ExteriorSystem, IntegralElement};
use crate::error::{Error, Result};
use crate::forms::{subsets, DForm, NumForm, TangentVector};
use crate::linalg::{self, Matrix};
use crate::scalar::{format_rational, Point, Scalar};

/// Number of random flags tried when looking for a generic one.
pub const FLAG_TRIALS: usize = 5;

/// The affine chart on the Grassmannian of `p`-planes on which the
/// independence forms are nondegenerate: a plane is the graph
/// `pi^r = sum_j a_{rj} omega^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub omega: Vec<usize>,
    pub pi: Vec<usize>,
    /// Unknown names, row-major: `unknowns[r * p + j]` is `a_{rj}`.
    pub unknowns: Vec<String>,
}

impl Chart {
    pub fn new(sys: &ExteriorSystem) -> Chart {
        let names = sys.manifold().coframe();
        let taken: BTreeSet<&str> = sys.manifold().symbols().map(|(n, _)| n).collect();
        let omega = sys.independence().to_vec();
        let pi = sys.complement();
        let mut unknowns = Vec::new();
        for &r in &pi {
            for &j in &omega {
                let mut u = format!("a_{}_{}", names[r], names[j]);
                while taken.contains(u.as_str()) {
                    u.push('_');
                }
                unknowns.push(u);
            }
        }
        Chart { omega, pi, unknowns }
    }

    pub fn p(&self) -> usize {
        self.omega.len()
    }

    pub fn unknown(&self, r: usize, j: usize) -> &str {
        &self.unknowns[r * self.p() + j]
    }

    /// Images of the coframe on a plane of the chart, in the dual basis
    /// `omega^1..omega^p` of the plane.
    pub fn images(&self, n: usize) -> Vec<DForm> {
        let mut images = vec![DForm::zero(1); n];
        for (j, &w) in self.omega.iter().enumerate() {
            images[w] = DForm::basis(j);
        }
        for (r, &i) in self.pi.iter().enumerate() {
            let mut f = DForm::zero(1);
            for j in 0..self.p() {
                let t = DForm::basis(j).scale(&Scalar::symbol(self.unknown(r, j)));
                f = f.add(&t).expect("1-forms");
            }
            images[i] = f;
        }
        images
    }

    pub fn bind(&self, a: &[Vec<BigRational>], point: &Point) -> Point {
        let mut out = point.clone();
        for (r, row) in a.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                out.insert(self.unknown(r, j), v.clone());
            }
        }
        out
    }
}

/// Polynomial conditions on the chart unknowns (with coefficients functions
/// on the manifold) cutting out the integral elements.
#[derive(Clone, Debug)]
pub struct ChartEquations {
    pub chart: Chart,
    pub equations: Vec<Scalar>,
}

impl ChartEquations {
    /// True when every equation is affine in the unknowns.
    pub fn is_affine(&self) -> bool {
        let vars: BTreeSet<String> = self.chart.unknowns.iter().cloned().collect();
        self.equations
            .iter()
            .all(|e| matches!(e.degree_in_symbols(&vars), Some(d) if d <= 1))
    }

    /// Splits affine equations into `A x = b`.
    pub fn affine_system(&self) -> Result<(Matrix<Scalar>, Vec<Scalar>)> {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for e in &self.equations {
            let mut row = Vec::with_capacity(self.chart.unknowns.len());
            let mut rest = e.clone();
            for u in &self.chart.unknowns {
                let (k, r) = rest.affine_in(u).ok_or_else(|| Error::AffineOnly(e.to_string()))?;
                if k.symbols()
                    .iter()
                    .any(|s| self.chart.unknowns.iter().any(|x| **s == **x))
                {
                    return Err(Error::AffineOnly(e.to_string()));
                }
                row.push(k);
                rest = r;
            }
            a.push(row);
            b.push(-rest);
        }
        Ok((a, b))
    }
}

pub fn chart_equations(sys: &ExteriorSystem) -> ChartEquations {
    let chart = Chart::new(sys);
    let images = chart.images(sys.dim());
    let mut equations = Vec::new();
    for f in sys.closure() {
        if f.degree() == 0 {
            continue;
        }
        for (_, c) in f.pullback(&images).terms() {
            equations.push(c.clone());
        }
    }
    ChartEquations { chart, equations }
}

/// Dimension of the variety of integral elements near a given one, read off
/// from the rank of the Jacobian of the chart equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActualDimension {
    pub dim: usize,
    pub jacobian_rank: usize,
    pub equation_count: usize,
    /// Some chart equation is nonlinear in the unknowns, so the count is only
    /// valid where the variety is smooth of the expected codimension.
    pub linearity_caveat: bool,
}

pub fn actual_dimension(
    sys: &ExteriorSystem,
    eqs: &ChartEquations,
    point: &Point,
    a: &[Vec<BigRational>],
) -> Result<ActualDimension> {
    let at = eqs.chart.bind(a, point);
    let mut jac: Matrix<BigRational> = Vec::new();
    for e in &eqs.equations {
        let row = eqs
            .chart
            .unknowns
            .iter()
            .map(|u| e.partial(u).eval(&at))
            .collect::<Result<Vec<_>>>()?;
        jac.push(row);
    }
    let rank = linalg::rank(&jac);
    let (n, p) = (sys.dim(), sys.p());
    Ok(ActualDimension {
        dim: n + p * (n - p) - rank,
        jacobian_rank: rank,
        equation_count: eqs.equations.len(),
        linearity_caveat: !eqs.is_affine(),
    })
}

/// Covectors `w -> phi(v_S, w)` for closure forms `phi` of degree `|S| + 1`
/// and subsets `S` of the given vectors. Their common kernel is the polar
/// space of `span(vs)`.
pub fn polar_equations(closure: &[NumForm], n: usize, vs: &[TangentVector]) -> Matrix<BigRational> {
    let mut rows = Vec::new();
    for f in closure {
        let j = f.degree();
        if j == 0 || j > vs.len() + 1 {
            continue;
        }
        for sub in subsets(vs.len(), j - 1) {
            let mut h = f.clone();
            for &s in &sub {
                h = h.hook(&vs[s]);
            }
            if !h.is_zero() {
                rows.push(h.covector(n));
            }
        }
    }
    rows
}

/// Number of independent polar equations of `span(vs)`.
pub fn polar_rank(closure: &[NumForm], n: usize, vs: &[TangentVector]) -> usize {
    linalg::rank(&polar_equations(closure, n, vs))
}

/// A flag `E_0 < E_1 < ... < E_p` inside an integral element, with the
/// number of polar equations of each `E_k`, `k < p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    pub vectors: Vec<TangentVector>,
    pub polar_ranks: Vec<usize>,
}

impl Flag {
    pub fn new(closure: &[NumForm], n: usize, vectors: Vec<TangentVector>) -> Flag {
        let polar_ranks = (0..vectors.len())
            .map(|k| polar_rank(closure, n, &vectors[..k]))
            .collect();
        Flag { vectors, polar_ranks }
    }
}

/// Cartan characters from the polar ranks of a flag in a `p`-plane of an
/// `n`-manifold.
pub fn characters(n: usize, p: usize, polar_ranks: &[usize]) -> Result<Vec<i64>> {
    if polar_ranks.len() != p {
        return Err(Error::Dimension(format!(
            "{} polar ranks for p = {p}",
            polar_ranks.len()
        )));
    }
    let mut s = Vec::with_capacity(p + 1);
    let mut prev = 0i64;
    for &r in polar_ranks {
        s.push(r as i64 - prev);
        prev = r as i64;
    }
    let last = (n - p) as i64 - prev;
    if last < 0 {
        return Err(Error::NegativeLastCharacter(last));
    }
    s.push(last);
    Ok(s)
}

/// `n + s_1 + 2 s_2 + ... + p s_p`.
pub fn predicted_dimension(n: usize, chars: &[i64]) -> i64 {
    n as i64 + chars.iter().enumerate().map(|(k, s)| k as i64 * s).sum::<i64>()
}

/// Random flags in `e` (seeded); the one with the lexicographically largest
/// polar ranks is returned.
pub fn generic_flag(sys: &ExteriorSystem, e: &IntegralElement, seed: u64) -> Result<Flag> {
    let closure = sys.closure_at(&e.point)?;
    let n = sys.dim();
    let p = e.basis.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Flag> = None;
    for _ in 0..FLAG_TRIALS {
        let m = loop {
            let m: Matrix<BigRational> = (0..p)
                .map(|_| {
                    (0..p)
                        .map(|_| BigRational::from_integer(rng.gen_range(-9i64..=9).into()))
                        .collect()
                })
                .collect();
            if p == 0 || !linalg::det(&m).is_zero() {
                break m;
            }
        };
        let vectors = m
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&e.basis)
                    .fold(TangentVector::zeros(n), |acc, (c, v)| acc.add_scaled(c, v))
            })
            .collect();
        let flag = Flag::new(&closure, n, vectors);
        if best.as_ref().is_none_or(|b| flag.polar_ranks > b.polar_ranks) {
            best = Some(flag);
        }
    }
    Ok(best.unwrap_or_else(|| Flag::new(&closure, n, Vec::new())))
}

/// Chart unknowns solved in terms of the ones left free.
#[derive(Clone, Debug)]
pub struct StagedSolution {
    /// Solved unknowns by index, as expressions in the free unknowns.
    pub solved: BTreeMap<usize, Scalar>,
    /// Free unknowns, ascending.
    pub free: Vec<usize>,
}

/// Solves the affine equations among `equations` by elimination in
/// `col_order`, substitutes the result into the others and repeats, so
/// equations that only become affine once the linear ones are solved are
/// handled too.
pub fn solve_staged(chart: &Chart, equations: Vec<Scalar>, col_order: &[usize]) -> Result<StagedSolution> {
    let names = &chart.unknowns;
    let cols = names.len();
    let all: BTreeSet<String> = names.iter().cloned().collect();
    let mut eqs = equations;
    let mut solved: BTreeMap<usize, Scalar> = BTreeMap::new();
    loop {
        let (affine, rest): (Vec<Scalar>, Vec<Scalar>) = eqs
            .into_iter()
            .filter(|e| !e.is_zero())
            .partition(|e| matches!(e.degree_in_symbols(&all), Some(d) if d <= 1));
        if affine.is_empty() {
            match rest.first() {
                None => break,
                Some(e) => return Err(Error::AffineOnly(e.to_string())),
            }
        }
        let (a, b) = ChartEquations {
            chart: chart.clone(),
            equations: affine,
        }
        .affine_system()?;
        let sol = linalg::solve_affine(&a, &b, cols, Some(col_order))
            .map_err(|v| Error::NoIntegralElement(format!("chart equations force 0 = {v}")))?;
        let mut bindings = BTreeMap::new();
        for (c, k, deps) in &sol.solved {
            let mut v = k.clone();
            for (f, coef) in deps {
                v = &v + &(coef * &Scalar::symbol(&names[*f]));
            }
            bindings.insert(names[*c].clone(), v);
        }
        for v in solved.values_mut() {
            *v = v.substitute(&bindings)?;
        }
        for (c, ..) in &sol.solved {
            solved.insert(*c, bindings[&names[*c]].clone());
        }
        eqs = rest.iter().map(|e| e.substitute(&bindings)).collect::<Result<_>>()?;
    }
    let free = (0..cols).filter(|f| !solved.contains_key(f)).collect();
    Ok(StagedSolution { solved, free })
}

/// Solves the chart equations at a point, choosing seeded random values for
/// any unknowns left free.
pub fn find_integral_element(sys: &ExteriorSystem, point: &Point, seed: u64) -> Result<Vec<Vec<BigRational>>> {
    let chart = Chart::new(sys);
    let names = &chart.unknowns;
    let cols = names.len();
    let eqs: Vec<Scalar> = chart_equations(sys)
        .equations
        .iter()
        .map(|e| e.partial_eval(point))
        .collect::<Result<_>>()?;
    let all: BTreeSet<&str> = names.iter().map(String::as_str).collect();
    for e in &eqs {
        if let Some(s) = e.symbols().iter().find(|s| !all.contains(&***s)) {
            return Err(Error::UnboundSymbol(s.to_string()));
        }
    }
    let order: Vec<usize> = (0..cols).collect();
    let sol = solve_staged(&chart, eqs, &order).map_err(|e| match e {
        Error::AffineOnly(_) => {
            Error::AffineOnly("chart equations are nonlinear at the point; supply an element".into())
        }
        other => other,
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut values = Point::new();
    let mut x = vec![BigRational::zero(); cols];
    for &f in &sol.free {
        x[f] = BigRational::from_integer(rng.gen_range(-3i64..=3).into());
        values.insert(names[f].clone(), x[f].clone());
    }
    for (c, v) in &sol.solved {
        x[*c] = v.eval(&values)?;
    }
    let p = sys.p();
    Ok((0..chart.pi.len()).map(|r| x[r * p..(r + 1) * p].to_vec()).collect())
}

/// Outcome of Cartan's test at an integral element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CartanReport {
    pub system: String,
    pub dim: usize,
    pub p: usize,
    pub characters: Vec<i64>,
    pub predicted_dim: i64,
    pub actual_dim: i64,
    /// Dimension of the space of integral elements at the point.
    pub fiber_dim: i64,
    pub involutive: bool,
    pub linearity_caveat: bool,
    pub generality: String,
    pub chart_equation_count: usize,
    pub jacobian_rank: usize,
    pub polar_ranks: Vec<usize>,
    /// Chart coordinates of the element, rows indexed by the non-independence
    /// coframe elements.
    pub element: Vec<Vec<String>>,
    #[serde(skip)]
    pub chart: Vec<Vec<BigRational>>,
}

impl CartanReport {
    /// Cartan's inequality as text, e.g. `s1 + 2*s2 = 4 > 3`.
    pub fn inequality(&self) -> String {
        let last = self.characters.iter().rposition(|&s| s != 0).unwrap_or(0).max(1);
        let lhs: Vec<String> = (1..=last.min(self.characters.len().saturating_sub(1)))
            .map(|k| if k == 1 { "s1".to_string() } else { format!("{k}*s{k}") })
            .collect();
        let total = self.predicted_dim - self.dim as i64;
        let rhs = self.actual_dim - self.dim as i64;
        let rel = match total.cmp(&rhs) {
            std::cmp::Ordering::Equal => "=",
            std::cmp::Ordering::Greater => ">",
            std::cmp::Ordering::Less => "<",
        };
        let lhs = if lhs.is_empty() {
            "0".to_string()
        } else {
            lhs.join(" + ")
        };
        format!("{lhs} = {total} {rel} {rhs}")
    }
}

pub fn generality(chars: &[i64]) -> String {
    match chars.iter().rposition(|&s| s != 0) {
        None => "a unique integral manifold through each integral element".into(),
        Some(0) if chars[0] == 1 => "1 constant".into(),
        Some(0) => format!("{} constants", chars[0]),
        Some(k) => {
            let f = if chars[k] == 1 { "function" } else { "functions" };
            let v = if k == 1 { "variable" } else { "variables" };
            format!("{} {f} of {k} {v}", chars[k])
        }
    }
}

/// Cartan's test at `point`. Uses `element` when given (it must be
/// integral), otherwise solves the chart equations for one.
pub fn cartan_test(
    sys: &ExteriorSystem,
    point: &Point,
    element: Option<&IntegralElement>,
    seed: u64,
) -> Result<CartanReport> {
    let e = match element {
        Some(e) => e.clone(),
        None => {
            let a = find_integral_element(sys, point, seed)?;
            IntegralElement::from_chart(sys, point.clone(), &a)?
        }
    };
    if let Some(w) = integral_witness(sys, &e)? {
        let names = sys.manifold().coframe();
        return Err(Error::NotIntegral(format!(
            "{} is {} on basis vectors {:?}",
            sys.closure()[w.form].display(names),
            format_rational(&w.value),
            w.vectors
        )));
    }
    let a = e.chart(sys)?;
    let flag = generic_flag(sys, &e, seed)?;
    let (n, p) = (sys.dim(), sys.p());
    let chars = characters(n, p, &flag.polar_ranks)?;
    let predicted = predicted_dimension(n, &chars);
    let eqs = chart_equations(sys);
    let actual = actual_dimension(sys, &eqs, &e.point, &a)?;
    Ok(CartanReport {
        system: sys.name().to_string(),
        dim: n,
        p,
        generality: generality(&chars),
        involutive: predicted == actual.dim as i64,
        characters: chars,
        predicted_dim: predicted,
        actual_dim: actual.dim as i64,
        fiber_dim: actual.dim as i64 - n as i64,
        linearity_caveat: actual.linearity_caveat,
        chart_equation_count: actual.equation_count,
        jacobian_rank: actual.jacobian_rank,
        polar_ranks: flag.polar_ranks,
        element: a.iter().map(|r| r.iter().map(format_rational).collect()).collect(),
        chart: a,
    })
}

/// Values of the chart unknowns, keyed by name.
pub fn chart_values(chart: &Chart, a: &[Vec<BigRational>]) -> BTreeMap<String, BigRational> {
    let mut out = BTreeMap::new();
    for (r, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out.insert(chart.unknown(r, j).to_string(), v.clone());
        }
    }
    out
}
