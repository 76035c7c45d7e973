//! Exterior differential systems with an independence condition.

use num_rational::BigRational;
use num_traits::Zero;

use crate::coframe::Manifold;
use crate::error::{Error, Result};
use crate::forms::{subsets, DForm, NumForm, TangentVector};
use crate::linalg;
use crate::scalar::Point;

/// A differential ideal given by generators, together with the dimension `p`
/// of the integral manifolds sought and an independence condition
/// `omega^1 ^ ... ^ omega^p != 0` made of coframe elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExteriorSystem {
    name: String,
    manifold: Manifold,
    generators: Vec<DForm>,
    closure: Vec<DForm>,
    p: usize,
    independence: Vec<usize>,
}

impl ExteriorSystem {
    /// Builds the system and its algebraic closure up to degree `p`.
    ///
    /// The closure holds every nonzero generator of degree at most `p` and the
    /// exterior derivative of each one of degree below `p`.
    pub fn new(
        name: impl Into<String>,
        manifold: Manifold,
        generators: Vec<DForm>,
        p: usize,
        independence: Vec<usize>,
    ) -> Result<Self> {
        let n = manifold.dim();
        if independence.len() != p {
            return Err(Error::BadIndependenceCondition(format!(
                "{} forms given for p = {p}",
                independence.len()
            )));
        }
        if p > n {
            return Err(Error::BadIndependenceCondition(format!("p = {p} exceeds dim {n}")));
        }
        let mut seen = independence.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != p || seen.iter().any(|&i| i >= n) {
            return Err(Error::BadIndependenceCondition(
                "independence forms must be distinct coframe elements".into(),
            ));
        }
        for g in &generators {
            if g.degree() == 0 && !g.is_zero() {
                return Err(Error::DegreeZeroGenerator(g.display(manifold.coframe()).to_string()));
            }
            if g.span_dim() > n {
                return Err(Error::Dimension("generator uses a coframe index out of range".into()));
            }
        }
        let mut closure: Vec<DForm> = Vec::new();
        let mut push = |f: DForm| {
            if !f.is_zero() && f.degree() <= p && !closure.contains(&f) {
                closure.push(f);
            }
        };
        for g in &generators {
            if g.degree() > p || g.is_zero() {
                continue;
            }
            push(g.clone());
            if g.degree() < p {
                push(manifold.d(g)?);
            }
        }
        closure.sort_by_key(|f| f.degree());
        Ok(ExteriorSystem {
            name: name.into(),
            manifold,
            generators,
            closure,
            p,
            independence,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn generators(&self) -> &[DForm] {
        &self.generators
    }

    /// Generators and their differentials, by degree, restricted to degree `<= p`.
    pub fn closure(&self) -> &[DForm] {
        &self.closure
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.manifold.dim()
    }

    /// Coframe indices of the independence forms.
    pub fn independence(&self) -> &[usize] {
        &self.independence
    }

    /// Coframe indices not in the independence condition, in coframe order.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.dim()).filter(|i| !self.independence.contains(i)).collect()
    }

    /// The closure evaluated at a point.
    pub fn closure_at(&self, point: &Point) -> Result<Vec<NumForm>> {
        self.closure.iter().map(|f| f.eval(point)).collect()
    }
}

/// A point together with a `p`-plane in its tangent space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralElement {
    pub point: Point,
    pub basis: Vec<TangentVector>,
}

/// Why a plane fails to be integral: the closure form (by index) and the
/// basis vectors on which it does not vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub form: usize,
    pub vectors: Vec<usize>,
    pub value: BigRational,
}

impl IntegralElement {
    pub fn new(point: Point, basis: Vec<TangentVector>) -> Self {
        IntegralElement { point, basis }
    }

    /// The plane spanned by `e_j = d/d omega^j + sum_r a[r][j] d/d pi^r`, where
    /// `pi` runs over the coframe elements outside the independence condition.
    pub fn from_chart(sys: &ExteriorSystem, point: Point, a: &[Vec<BigRational>]) -> Result<Self> {
        let pi = sys.complement();
        if a.len() != pi.len() || a.iter().any(|r| r.len() != sys.p()) {
            return Err(Error::Dimension(format!(
                "chart matrix must be {} x {}",
                pi.len(),
                sys.p()
            )));
        }
        let n = sys.dim();
        let basis = (0..sys.p())
            .map(|j| {
                let mut v = TangentVector::zeros(n);
                v.0[sys.independence()[j]] = BigRational::from_integer(1.into());
                for (r, &i) in pi.iter().enumerate() {
                    v.0[i] = a[r][j].clone();
                }
                v
            })
            .collect();
        Ok(IntegralElement { point, basis })
    }

    /// Chart coordinates `a = Pi * Omega^{-1}` of the plane, or `NotAGraph`
    /// when the independence forms are degenerate on it.
    pub fn chart(&self, sys: &ExteriorSystem) -> Result<Vec<Vec<BigRational>>> {
        let p = sys.p();
        if self.basis.len() != p {
            return Err(Error::Dimension(format!("{} basis vectors, p = {p}", self.basis.len())));
        }
        // Omega[j][k] = omega^j(v_k); solve Omega^T X = Pi^T row by row.
        let omega: linalg::Matrix<BigRational> = (0..p)
            .map(|k| sys.independence().iter().map(|&i| self.basis[k].0[i].clone()).collect())
            .collect();
        if linalg::det(&omega).is_zero() {
            return Err(Error::NotAGraph);
        }
        let pi = sys.complement();
        let mut out = Vec::new();
        for &i in &pi {
            // a_r Omega = Pi_r where Omega is indexed [k][j].
            let rhs: Vec<BigRational> = (0..p).map(|k| self.basis[k].0[i].clone()).collect();
            let sol = linalg::solve_affine(&omega, &rhs, p, None).map_err(|_| Error::NotAGraph)?;
            let mut row = vec![BigRational::zero(); p];
            for (c, v, _) in sol.solved {
                row[c] = v;
            }
            out.push(row);
        }
        Ok(out)
    }
}

/// Checks that every closure form vanishes on the plane. `Ok(None)` means
/// integral; `Ok(Some(w))` names a form and vectors where it does not.
pub fn integral_witness(sys: &ExteriorSystem, e: &IntegralElement) -> Result<Option<Witness>> {
    let n = sys.dim();
    if e.basis.len() != sys.p() || e.basis.iter().any(|v| v.dim() != n) {
        return Err(Error::Dimension(format!("need {} vectors of length {n}", sys.p())));
    }
    let m: linalg::Matrix<BigRational> = e.basis.iter().map(|v| v.0.clone()).collect();
    if linalg::rank(&m) < e.basis.len() {
        return Err(Error::DependentBasis);
    }
    for (fi, f) in sys.closure_at(&e.point)?.iter().enumerate() {
        for sub in subsets(e.basis.len(), f.degree()) {
            let vs: Vec<TangentVector> = sub.iter().map(|&i| e.basis[i].clone()).collect();
            let v = f.eval_on(&vs);
            if !v.is_zero() {
                return Ok(Some(Witness {
                    form: fi,
                    vectors: sub,
                    value: v,
                }));
            }
        }
    }
    Ok(None)
}

pub fn is_integral_element(sys: &ExteriorSystem, e: &IntegralElement) -> Result<bool> {
    Ok(integral_witness(sys, e)?.is_none())
}
