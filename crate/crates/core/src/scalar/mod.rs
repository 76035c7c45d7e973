//! Exact scalars: multivariate rational functions over the rationals.
//!
//! Every [`Scalar`] is stored in normal form: numerator and denominator are
//! coprime expanded polynomials and the denominator is monic in the graded
//! lexicographic order. Two scalars are equal as rational functions iff they
//! are structurally equal.

mod poly;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use poly::{Monomial, Poly, Symbol};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Scalar::from_rational(BigRational::new(n.into(), d.into()))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Scalar {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn symbol(name: &str) -> Self {
        Scalar {
            num: Poly::var(Symbol::from(name)),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Scalar {
            num: p,
            den: Poly::one(),
        }
    }

    /// Builds `num / den` in normal form.
    pub fn from_fraction(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDivision);
        }
        if num.is_zero() {
            return Ok(Scalar::zero());
        }
        let (num, den) = if den.is_constant() || num.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_one() {
                (num, den)
            } else {
                (
                    num.exact_div(&g).expect("gcd divides numerator"),
                    den.exact_div(&g).expect("gcd divides denominator"),
                )
            }
        };
        let lc = den.leading_coeff();
        if lc.is_one() {
            Ok(Scalar { num, den })
        } else {
            let inv = lc.recip();
            Ok(Scalar {
                num: num.scale(&inv),
                den: den.scale(&inv),
            })
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut s = self.num.vars();
        s.extend(self.den.vars());
        s
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        self.num.contains_var(name) || self.den.contains_var(name)
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        if other.is_zero() {
            return Err(Error::ZeroDivision);
        }
        if let Some(c) = other.as_constant() {
            return Ok(Scalar {
                num: self.num.scale(&c.recip()),
                den: self.den.clone(),
            });
        }
        Scalar::from_fraction(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn recip(&self) -> Result<Scalar> {
        Scalar::one().checked_div(self)
    }

    pub fn pow(&self, e: i32) -> Result<Scalar> {
        if e < 0 {
            return self.recip()?.pow(-e);
        }
        let e = e as u32;
        // Coprimality is preserved by powers.
        let lc = self.den.pow(e);
        Ok(Scalar {
            num: self.num.pow(e),
            den: lc,
        })
    }

    pub fn scale(&self, k: &BigRational) -> Scalar {
        Scalar {
            num: self.num.scale(k),
            den: if k.is_zero() { Poly::one() } else { self.den.clone() },
        }
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &Point) -> Result<BigRational> {
        let lookup = |s: &str| point.get(s).cloned();
        let n = self
            .num
            .eval(&lookup)
            .map_err(|s| Error::UnboundSymbol(s.to_string()))?;
        let d = self
            .den
            .eval(&lookup)
            .map_err(|s| Error::UnboundSymbol(s.to_string()))?;
        if d.is_zero() {
            return Err(Error::PoleAtPoint(self.to_string()));
        }
        Ok(n / d)
    }

    /// Simultaneous substitution of symbols by scalars.
    pub fn substitute(&self, bindings: &BTreeMap<String, Scalar>) -> Result<Scalar> {
        if !self.symbols().iter().any(|s| bindings.contains_key(&**s)) {
            return Ok(self.clone());
        }
        let n = subst_poly(&self.num, bindings)?;
        let d = subst_poly(&self.den, bindings)?;
        n.checked_div(&d)
    }

    /// Substitutes rational values for whichever symbols the point binds.
    pub fn partial_eval(&self, point: &Point) -> Result<Scalar> {
        let bindings: BTreeMap<String, Scalar> = self
            .symbols()
            .iter()
            .filter_map(|s| point.get(s).map(|v| (s.to_string(), Scalar::from_rational(v.clone()))))
            .collect();
        self.substitute(&bindings).map_err(|e| match e {
            Error::ZeroDivision => Error::PoleAtPoint(self.to_string()),
            other => other,
        })
    }

    /// Formal partial derivative with respect to a symbol.
    pub fn partial(&self, var: &str) -> Scalar {
        let dn = self.num.derivative(var);
        if self.den.is_constant() {
            return Scalar {
                num: dn,
                den: self.den.clone(),
            };
        }
        let dd = self.den.derivative(var);
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Scalar::from_fraction(num, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    /// Splits `self = coeff * var + rest` when `self` is affine in `var`.
    pub fn affine_in(&self, var: &str) -> Option<(Scalar, Scalar)> {
        if self.den.contains_var(var) || self.num.degree_in(var) > 1 {
            return None;
        }
        let mut cs = self.num.coefficients_in(var);
        let coeff = if cs.len() > 1 { cs.pop().unwrap() } else { Poly::zero() };
        let rest = cs.pop().unwrap_or_default();
        Some((
            Scalar::from_fraction(coeff, self.den.clone()).expect("denominator"),
            Scalar::from_fraction(rest, self.den.clone()).expect("denominator"),
        ))
    }

    /// Total degree of a polynomial scalar in the given symbols.
    pub fn degree_in_symbols(&self, vars: &BTreeSet<String>) -> Option<u32> {
        if self.den.vars().iter().any(|v| vars.contains(&**v)) {
            return None;
        }
        Some(
            self.num
                .terms()
                .map(|(m, _)| {
                    m.factors()
                        .iter()
                        .filter(|(v, _)| vars.contains(&**v))
                        .map(|(_, e)| *e)
                        .sum::<u32>()
                })
                .max()
                .unwrap_or(0),
        )
    }

    /// True when printing needs parentheses as a factor.
    pub(crate) fn is_compound(&self) -> bool {
        !self.den.is_one() || self.num.num_terms() > 1
    }

    /// True when the printed form starts with a minus sign.
    pub(crate) fn is_negative_term(&self) -> bool {
        self.den.is_one() && self.num.num_terms() == 1 && self.num.leading_coeff().is_negative()
    }
}

fn subst_poly(p: &Poly, bindings: &BTreeMap<String, Scalar>) -> Result<Scalar> {
    let mut cache: BTreeMap<(Symbol, u32), Scalar> = BTreeMap::new();
    let mut acc = Scalar::zero();
    for (m, c) in p.terms() {
        let mut t = Scalar::from_rational(c.clone());
        for (v, e) in m.factors() {
            let f = match bindings.get(&**v) {
                Some(s) => {
                    if let Some(f) = cache.get(&(v.clone(), *e)) {
                        f.clone()
                    } else {
                        let f = s.pow(*e as i32)?;
                        cache.insert((v.clone(), *e), f.clone());
                        f
                    }
                }
                None => {
                    Scalar::from_poly(Poly::from_term(Monomial::var(v.clone()), BigRational::one())).pow(*e as i32)?
                }
            };
            t = &t * &f;
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = self.num.add(&rhs.num);
            if self.den.is_one() {
                return Scalar {
                    num,
                    den: self.den.clone(),
                };
            }
            return Scalar::from_fraction(num, self.den.clone()).expect("nonzero");
        }
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        Scalar::from_fraction(num, self.den.mul(&rhs.den)).expect("nonzero")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar {
                num: self.num.mul(&rhs.num),
                den: Poly::one(),
            };
        }
        Scalar::from_fraction(self.num.mul(&rhs.num), self.den.mul(&rhs.den)).expect("nonzero")
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(c: BigRational) -> Self {
        Scalar::from_rational(c)
    }
}

/// A total assignment of rational values to base symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Point(BTreeMap<String, BigRational>);

impl Point {
    pub fn new() -> Self {
        Point::default()
    }

    pub fn get(&self, name: &str) -> Option<&BigRational> {
        self.0.get(name)
    }

    pub fn insert(&mut self, name: impl Into<String>, value: BigRational) {
        self.0.insert(name.into(), value);
    }

    pub fn with(mut self, name: &str, value: i64) -> Self {
        self.insert(name, BigRational::from_integer(value.into()));
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BigRational)> {
        self.0.iter()
    }

    pub fn remove(&mut self, name: &str) -> Option<BigRational> {
        self.0.remove(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }
}

impl FromIterator<(String, BigRational)> for Point {
    fn from_iter<T: IntoIterator<Item = (String, BigRational)>>(iter: T) -> Self {
        Point(iter.into_iter().collect())
    }
}

pub fn format_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn format_monomial(m: &Monomial) -> String {
    m.factors()
        .iter()
        .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}**{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

/// Writes one term without its sign.
fn format_term(m: &Monomial, c: &BigRational) -> String {
    let c = c.abs();
    if m.is_one() {
        return format_rational(&c);
    }
    let mut s = String::new();
    if !c.numer().is_one() {
        s.push_str(&c.numer().to_string());
        s.push('*');
    }
    s.push_str(&format_monomial(m));
    if !c.denom().is_one() {
        s.push('/');
        s.push_str(&c.denom().to_string());
    }
    s
}

pub(crate) fn format_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        s.push_str(&format_term(m, c));
    }
    s
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = format_poly(&self.num);
        if self.den.is_one() {
            return f.write_str(&n);
        }
        let n = if self.num.num_terms() > 1 { format!("({n})") } else { n };
        let d = format_poly(&self.den);
        let single = self.den.num_terms() == 1
            && self
                .den
                .leading()
                .is_some_and(|(m, _)| m.factors().len() == 1 && m.degree() == 1);
        if single {
            write!(f, "{n}/{d}")
        } else {
            write!(f, "{n}/({d})")
        }
    }
}
