//! Differential forms expanded in a coframe.
//!
//! A [`DForm`] of degree `k` is a map from strictly increasing index tuples
//! `I = (i1 < ... < ik)` to nonzero scalar coefficients, standing for
//! `sum_I c_I theta^i1 ^ ... ^ theta^ik`. Exterior derivative needs the
//! structure equations and lives on [`crate::coframe::Manifold`].

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{Point, Scalar};

pub type MultiIndex = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DForm {
    degree: usize,
    terms: BTreeMap<MultiIndex, Scalar>,
}

/// Sign of merging two sorted disjoint index lists, or `None` if they share an index.
pub(crate) fn merge_sign(a: &[usize], b: &[usize]) -> Option<(bool, MultiIndex)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut inversions = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            // b[j] jumps over the remaining a's.
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    Some((inversions % 2 == 1, out))
}

impl DForm {
    pub fn zero(degree: usize) -> Self {
        DForm {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(c: Scalar) -> Self {
        let mut f = DForm::zero(0);
        f.add_term(Vec::new(), c);
        f
    }

    /// The coframe element `theta^i` (0-based).
    pub fn basis(i: usize) -> Self {
        let mut f = DForm::zero(1);
        f.add_term(vec![i], Scalar::one());
        f
    }

    /// `c * theta^I` for an arbitrary (unsorted) index list, sorting with sign.
    pub fn monomial(indices: &[usize], c: Scalar) -> Self {
        let mut f = DForm::zero(indices.len());
        let mut idx = indices.to_vec();
        let mut neg = false;
        // insertion sort counting swaps
        for i in 1..idx.len() {
            let mut j = i;
            while j > 0 && idx[j - 1] > idx[j] {
                idx.swap(j - 1, j);
                neg = !neg;
                j -= 1;
            }
        }
        if idx.windows(2).any(|w| w[0] == w[1]) {
            return f;
        }
        f.add_term(idx, if neg { -c } else { c });
        f
    }

    pub fn from_terms(degree: usize, terms: impl IntoIterator<Item = (MultiIndex, Scalar)>) -> Self {
        let mut f = DForm::zero(degree);
        for (i, c) in terms {
            debug_assert_eq!(i.len(), degree);
            f.add_term(i, c);
        }
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, idx: &[usize]) -> Scalar {
        self.terms.get(idx).cloned().unwrap_or_default()
    }

    /// The coefficient of a 0-form.
    pub fn as_scalar(&self) -> Option<Scalar> {
        (self.degree == 0).then(|| self.coeff(&[]))
    }

    pub(crate) fn add_term(&mut self, idx: MultiIndex, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &DForm) -> Result<DForm> {
        if self.is_zero() {
            return Ok(DForm {
                degree: other.degree,
                terms: other.terms.clone(),
            });
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.degree != other.degree {
            return Err(Error::DegreeError(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(i.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DForm) -> Result<DForm> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DForm {
        DForm {
            degree: self.degree,
            terms: self.terms.iter().map(|(i, c)| (i.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Scalar) -> DForm {
        let mut out = DForm::zero(self.degree);
        for (i, c) in &self.terms {
            out.add_term(i.clone(), c * k);
        }
        out
    }

    pub fn wedge(&self, other: &DForm) -> DForm {
        let mut out = DForm::zero(self.degree + other.degree);
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                if let Some((neg, idx)) = merge_sign(i, j) {
                    let c = a * b;
                    out.add_term(idx, if neg { -c } else { c });
                }
            }
        }
        out
    }

    /// Interior product with a vector given by its components in the dual frame.
    pub fn hook(&self, v: &[Scalar]) -> Result<DForm> {
        if self.degree == 0 {
            return Err(Error::DegreeError("cannot insert a vector into a 0-form".into()));
        }
        let mut out = DForm::zero(self.degree - 1);
        for (idx, c) in &self.terms {
            for (pos, &i) in idx.iter().enumerate() {
                let vi = v
                    .get(i)
                    .ok_or_else(|| Error::Dimension(format!("vector has {} components", v.len())))?;
                if vi.is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(pos);
                let t = c * vi;
                out.add_term(rest, if pos % 2 == 1 { -t } else { t });
            }
        }
        Ok(out)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<DForm> {
        let mut out = DForm::zero(self.degree);
        for (i, c) in &self.terms {
            out.add_term(i.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn substitute(&self, bindings: &BTreeMap<String, Scalar>) -> Result<DForm> {
        self.map_coeffs(|c| c.substitute(bindings))
    }

    /// Replaces every `theta^i` by `images[i]` (1-forms on some other index space).
    pub fn pullback(&self, images: &[DForm]) -> DForm {
        let mut out = DForm::zero(self.degree);
        for (idx, c) in &self.terms {
            let mut acc = DForm::scalar(c.clone());
            for &i in idx {
                acc = acc.wedge(&images[i]);
                if acc.is_zero() {
                    break;
                }
            }
            for (j, d) in acc.terms {
                out.add_term(j, d);
            }
        }
        out
    }

    /// Largest coframe index used, plus one.
    pub fn span_dim(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|i| i.iter())
            .map(|i| i + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, p: &Point) -> Result<NumForm> {
        let mut terms = BTreeMap::new();
        for (i, c) in &self.terms {
            let v = c.eval(p)?;
            if !v.is_zero() {
                terms.insert(i.clone(), v);
            }
        }
        Ok(NumForm {
            degree: self.degree,
            terms,
        })
    }

    /// Exact alternating multilinear evaluation on `k` vectors at a point.
    pub fn eval_on_vectors(&self, p: &Point, vs: &[TangentVector]) -> Result<BigRational> {
        if vs.len() != self.degree {
            return Err(Error::Dimension(format!(
                "{}-form evaluated on {} vectors",
                self.degree,
                vs.len()
            )));
        }
        Ok(self.eval(p)?.eval_on(vs))
    }

    /// Pullback to the subspace spanned by `basis`, in the dual basis of that subspace.
    pub fn restrict_to_subspace(&self, basis: &[TangentVector], p: &Point) -> Result<NumForm> {
        if let Some(n) = basis.first().map(|v| v.dim()) {
            let m: linalg::Matrix<BigRational> = basis.iter().map(|v| v.0.clone()).collect();
            if linalg::rank(&m) < basis.len() {
                return Err(Error::DependentBasis);
            }
            debug_assert!(basis.iter().all(|v| v.dim() == n));
        }
        Ok(self.eval(p)?.restrict(basis))
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> FormDisplay<'a> {
        FormDisplay { form: self, names }
    }
}

pub struct FormDisplay<'a> {
    form: &'a DForm,
    names: &'a [String],
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.form.is_zero() {
            return f.write_str("0");
        }
        for (n, (idx, c)) in self.form.terms.iter().enumerate() {
            let basis = idx
                .iter()
                .map(|&i| self.names.get(i).cloned().unwrap_or_else(|| format!("e{i}")))
                .collect::<Vec<_>>()
                .join("^");
            let neg = c.is_negative_term();
            let mag = if neg { -c } else { c.clone() };
            if n == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if basis.is_empty() {
                if mag.is_compound() {
                    write!(f, "({mag})")?;
                } else {
                    write!(f, "{mag}")?;
                }
            } else if mag.is_one() {
                f.write_str(&basis)?;
            } else if mag.is_compound() {
                write!(f, "({mag})*{basis}")?;
            } else {
                write!(f, "{mag}*{basis}")?;
            }
        }
        Ok(())
    }
}

/// A tangent vector at a point, in components dual to the coframe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentVector(pub Vec<BigRational>);

impl TangentVector {
    pub fn zeros(n: usize) -> Self {
        TangentVector(vec![BigRational::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = TangentVector::zeros(n);
        v.0[i] = BigRational::one();
        v
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        TangentVector(xs.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_scalars(&self) -> Vec<Scalar> {
        self.0.iter().cloned().map(Scalar::from_rational).collect()
    }

    pub fn add_scaled(&self, k: &BigRational, other: &TangentVector) -> TangentVector {
        TangentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + k * b).collect())
    }
}

/// A form with rational coefficients: the value of a [`DForm`] at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumForm {
    degree: usize,
    terms: BTreeMap<MultiIndex, BigRational>,
}

impl NumForm {
    pub fn new(degree: usize, terms: impl IntoIterator<Item = (MultiIndex, BigRational)>) -> Self {
        let mut out: BTreeMap<MultiIndex, BigRational> = BTreeMap::new();
        for (i, c) in terms {
            debug_assert_eq!(i.len(), degree);
            *out.entry(i).or_insert_with(BigRational::zero) += c;
        }
        out.retain(|_, c| !c.is_zero());
        NumForm { degree, terms: out }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &[usize]) -> BigRational {
        self.terms.get(idx).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval_on(&self, vs: &[TangentVector]) -> BigRational {
        let mut acc = BigRational::zero();
        for (idx, c) in &self.terms {
            let m: linalg::Matrix<BigRational> = vs
                .iter()
                .map(|v| idx.iter().map(|&i| v.0[i].clone()).collect())
                .collect();
            let d = if idx.is_empty() {
                BigRational::one()
            } else {
                linalg::det(&m)
            };
            acc += c * d;
        }
        acc
    }

    /// `v` inserted in the first slot.
    pub fn hook(&self, v: &TangentVector) -> NumForm {
        let mut terms: BTreeMap<MultiIndex, BigRational> = BTreeMap::new();
        for (idx, c) in &self.terms {
            for (pos, &i) in idx.iter().enumerate() {
                if v.0[i].is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(pos);
                let t = c * &v.0[i];
                let e = terms.entry(rest).or_insert_with(BigRational::zero);
                if pos % 2 == 1 {
                    *e -= t;
                } else {
                    *e += t;
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        NumForm {
            degree: self.degree.saturating_sub(1),
            terms,
        }
    }

    /// Components of a 1-form as a row vector of length `n`.
    pub fn covector(&self, n: usize) -> Vec<BigRational> {
        let mut row = vec![BigRational::zero(); n];
        if self.degree == 1 {
            for (idx, c) in &self.terms {
                row[idx[0]] = c.clone();
            }
        }
        row
    }

    /// Pullback to `span(basis)` expressed in the dual basis of `basis`.
    pub fn restrict(&self, basis: &[TangentVector]) -> NumForm {
        let k = basis.len();
        let mut terms = BTreeMap::new();
        if self.degree <= k {
            for sub in subsets(k, self.degree) {
                let vs: Vec<TangentVector> = sub.iter().map(|&i| basis[i].clone()).collect();
                let v = self.eval_on(&vs);
                if !v.is_zero() {
                    terms.insert(sub, v);
                }
            }
        }
        NumForm {
            degree: self.degree,
            terms,
        }
    }
}

/// All strictly increasing `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}
