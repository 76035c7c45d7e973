//! Sparse multivariate polynomials over the rationals.
//!
//! Monomials are kept sorted by symbol name and ordered graded-lexicographically,
//! so the term map of a [`Poly`] is already its canonical form.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Symbol = Arc<str>;

/// Power product `x1^e1 * x2^e2 * ...` with variables sorted by name and
/// strictly positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: Symbol) -> Self {
        Monomial(vec![(name, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| *e).sum()
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn exponent(&self, var: &str) -> u32 {
        self.0.iter().find(|(v, _)| &**v == var).map(|(_, e)| *e).unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *v {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((v.clone(), e - f)),
                }
            } else {
                out.push((v.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Removes `var` entirely, returning the exponent it had.
    fn split_var(&self, var: &str) -> (u32, Monomial) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(v, x)| {
                if &**v == var {
                    e = *x;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (e, Monomial(rest))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        // Lexicographic with earlier names as the more significant variables.
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((a, ea)), Some((b, eb))) => match a.cmp(b) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        o => return o,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn var(name: Symbol) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(name), BigRational::one());
        Poly { terms }
    }

    pub fn from_term(m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(m, _)| m.is_one())
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn contains_var(&self, var: &str) -> bool {
        self.terms.keys().any(|m| m.exponent(var) > 0)
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(n, c)| (n.mul(m), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading()?;
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading() {
            let qm = m.div(lm)?;
            let qc = c / lc;
            rem = rem.sub(&divisor.mul_term(&qm, &qc));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Scales so the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Coefficients with respect to `var`, indexed by power; each is free of `var`.
    pub fn coefficients_in(&self, var: &str) -> Vec<Poly> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(var);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    fn leading_coeff_in(&self, var: &str) -> Poly {
        self.coefficients_in(var).pop().unwrap_or_default()
    }

    pub fn eval(&self, lookup: &impl Fn(&str) -> Option<BigRational>) -> Result<BigRational, Symbol> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                let x = lookup(v).ok_or_else(|| v.clone())?;
                t *= num_traits::pow(x, *e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Formal partial derivative.
    pub fn derivative(&self, var: &str) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(var);
            if e == 0 {
                continue;
            }
            let m2 = if e > 1 {
                rest.mul(&Monomial(vec![(Symbol::from(var), e - 1)]))
            } else {
                rest
            };
            out.add_term(m2, c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Greatest common divisor, normalized to be monic.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        if self == other {
            return self.monic();
        }
        let va = self.vars();
        let vb = other.vars();
        if coprime_by_images(self, other, &va, &vb) {
            return Poly::one();
        }
        let var = va.union(&vb).next().cloned().expect("nonconstant");
        if !va.contains(&var) {
            return self.gcd(&other.content_in(&var));
        }
        if !vb.contains(&var) {
            return self.content_in(&var).gcd(other);
        }
        let ca = self.content_in(&var);
        let cb = other.content_in(&var);
        let pa = self.exact_div(&ca).expect("content divides");
        let pb = other.exact_div(&cb).expect("content divides");
        let c = ca.gcd(&cb);
        let g = primitive_prs(pa, pb, &var);
        c.mul(&g).monic()
    }

    /// GCD of the coefficients with respect to `var` (monic).
    pub fn content_in(&self, var: &str) -> Poly {
        let mut g = Poly::zero();
        for c in self.coefficients_in(var).into_iter().rev() {
            if c.is_zero() {
                continue;
            }
            g = g.gcd(&c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn primitive_part_in(&self, var: &str) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let c = self.content_in(var);
        self.exact_div(&c).expect("content divides").monic()
    }
}

/// Univariate image in `keep`, every other variable set by `value`.
fn specialize(p: &Poly, keep: &str, value: &impl Fn(&str) -> BigRational) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in &p.terms {
        let (e, rest) = m.split_var(keep);
        let mut t = c.clone();
        for (v, k) in &rest.0 {
            t *= num_traits::pow(value(v), *k as usize);
        }
        let mono = if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(Symbol::from(keep), e)])
        };
        out.add_term(mono, t);
    }
    out
}

/// Sufficient test for `gcd(a, b) = 1`: in every variable, the univariate
/// images under a degree-preserving evaluation of the others are coprime.
fn coprime_by_images(a: &Poly, b: &Poly, va: &BTreeSet<Symbol>, vb: &BTreeSet<Symbol>) -> bool {
    let vars: Vec<&Symbol> = va.union(vb).collect();
    if vars.len() < 2 {
        return false;
    }
    for &var in &vars {
        let (da, db) = (a.degree_in(var), b.degree_in(var));
        if da == 0 || db == 0 {
            continue;
        }
        let image = (1..=3i64).find_map(|attempt| {
            let value = |v: &str| {
                let k = vars.iter().position(|w| &***w == v).unwrap_or(0) as i64;
                BigRational::from_integer(BigInt::from(2 + 3 * k + 7 * attempt * (k + 1)))
            };
            let (ia, ib) = (specialize(a, var, &value), specialize(b, var, &value));
            (ia.degree_in(var) == da && ib.degree_in(var) == db).then_some((ia, ib))
        });
        let Some((ia, ib)) = image else { return false };
        if primitive_prs(ia, ib, var).contains_var(var) {
            return false;
        }
    }
    true
}

/// Pseudo-remainder of `a` by `b` as polynomials in `var`.
fn pseudo_rem(a: &Poly, b: &Poly, var: &str) -> Poly {
    let db = b.degree_in(var);
    let lb = b.leading_coeff_in(var);
    let mut r = a.clone();
    while !r.is_zero() && r.contains_var(var) && r.degree_in(var) >= db {
        let dr = r.degree_in(var);
        let lr = r.leading_coeff_in(var);
        let shift = if dr > db {
            Poly::from_term(Monomial(vec![(Symbol::from(var), dr - db)]), BigRational::one())
        } else {
            Poly::one()
        };
        r = r.mul(&lb).sub(&lr.mul(&shift).mul(b));
    }
    r
}

/// GCD of two polynomials that are primitive with respect to `var`.
fn primitive_prs(a: Poly, b: Poly, var: &str) -> Poly {
    let (mut a, mut b) = if a.degree_in(var) >= b.degree_in(var) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        if !b.contains_var(var) {
            return if b.is_zero() {
                a.primitive_part_in(var)
            } else {
                Poly::one()
            };
        }
        let r = pseudo_rem(&a, &b, var);
        if r.is_zero() {
            return b.primitive_part_in(var);
        }
        a = b;
        b = r.primitive_part_in(var);
    }
}
