//! Linearization at an integral element on a coordinate manifold: the
//! linearized operator on normal jets, the tableau, and the symbol.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::coframe::Manifold;
use crate::eds::{ExteriorSystem, IntegralElement};
use crate::error::{Error, Result};
use crate::forms::{merge_sign, subsets, DForm, MultiIndex, NumForm};
use crate::linalg::{self, Matrix};
use crate::scalar::{format_rational, Point, Scalar};

/// Values `v^a` and first derivatives `dv^a/dx^j` of a section of the normal
/// bundle at the base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalJet {
    pub values: Vec<BigRational>,
    pub derivatives: Vec<Vec<BigRational>>,
}

impl NormalJet {
    pub fn zero(q: usize, p: usize) -> Self {
        NormalJet {
            values: vec![BigRational::zero(); q],
            derivatives: vec![vec![BigRational::zero(); p]; q],
        }
    }
}

/// The closure of a system rewritten in coordinates `x, y' = y - a x` in
/// which the integral element is `dy' = 0`. Indices `0..p` are `dx`,
/// `p..p+q` are `dy'`.
#[derive(Clone, Debug)]
pub struct Linearization {
    pub p: usize,
    pub q: usize,
    point: Point,
    forms: Vec<DForm>,
    manifold: Manifold,
    /// Coframe index of `dy` behind each `y'` direction.
    ys: Vec<usize>,
}

impl Linearization {
    pub fn new(sys: &ExteriorSystem, e: &IntegralElement) -> Result<Self> {
        let m = sys.manifold();
        if !m.is_coordinate() {
            return Err(Error::NotCoordinateManifold);
        }
        let a = e.chart(sys)?;
        let (p, n) = (sys.p(), sys.dim());
        let pi = sys.complement();
        let mut images = vec![DForm::zero(1); n];
        for (j, &w) in sys.independence().iter().enumerate() {
            images[w] = DForm::basis(j);
        }
        for (r, &i) in pi.iter().enumerate() {
            let mut f = DForm::basis(p + r);
            for (j, x) in a[r].iter().enumerate().take(p) {
                let t = DForm::basis(j).scale(&Scalar::from_rational(x.clone()));
                f = f.add(&t)?;
            }
            images[i] = f;
        }
        Ok(Linearization {
            p,
            q: n - p,
            point: e.point.clone(),
            forms: sys.closure().iter().map(|f| f.pullback(&images)).collect(),
            manifold: m.clone(),
            ys: pi,
        })
    }

    /// `c_{Ia}` terms: (form index, I, a, coefficient) for each term with
    /// exactly one `dy'`, which sorts last.
    fn mixed_terms(&self) -> Vec<(usize, MultiIndex, usize, &Scalar)> {
        let mut out = Vec::new();
        for (fi, f) in self.forms.iter().enumerate() {
            for (idx, c) in f.terms() {
                let ny = idx.iter().filter(|&&i| i >= self.p).count();
                if ny == 1 {
                    let k = idx.len();
                    out.push((fi, idx[..k - 1].to_vec(), idx[k - 1] - self.p, c));
                }
            }
        }
        out
    }

    /// `L_v theta |_E = dv^a/dx^j c_{Ia} dx^I ^ dx^j + v^a dc_I/dy^a dx^I`
    /// for each closure form.
    pub fn operator(&self, jet: &NormalJet) -> Result<Vec<NumForm>> {
        let mut out: Vec<Vec<(MultiIndex, BigRational)>> = vec![Vec::new(); self.forms.len()];
        for (fi, i, a, c) in self.mixed_terms() {
            let c = c.eval(&self.point)?;
            for j in 0..self.p {
                let dv = &jet.derivatives[a][j];
                if dv.is_zero() {
                    continue;
                }
                if let Some((neg, idx)) = merge_sign(&i, &[j]) {
                    let t = &c * dv;
                    out[fi].push((idx, if neg { -t } else { t }));
                }
            }
        }
        for (fi, f) in self.forms.iter().enumerate() {
            for (idx, c) in f.terms() {
                if idx.iter().any(|&i| i >= self.p) {
                    continue;
                }
                let grad = self.manifold.d_scalar(c)?;
                for (a, &y) in self.ys.iter().enumerate() {
                    if jet.values[a].is_zero() {
                        continue;
                    }
                    let dc = grad.coeff(&[y]).eval(&self.point)?;
                    out[fi].push((idx.clone(), dc * &jet.values[a]));
                }
            }
        }
        Ok(self
            .forms
            .iter()
            .zip(out)
            .map(|(f, t)| NumForm::new(f.degree(), t))
            .collect())
    }

    /// Matrix of `A -> (A theta)|_E` on `A in E* (x) T/E`; columns indexed
    /// `a * p + j`, rows by (closure form, increasing index set on E).
    pub fn tableau(&self) -> Result<Tableau> {
        let rows = self.row_labels();
        let mut matrix = vec![vec![BigRational::zero(); self.q * self.p]; rows.len()];
        for (fi, i, a, c) in self.mixed_terms() {
            let c = c.eval(&self.point)?;
            for j in 0..self.p {
                if let Some((neg, idx)) = merge_sign(&i, &[j]) {
                    let r = rows.iter().position(|(f, s)| *f == fi && *s == idx).expect("row");
                    let e = &mut matrix[r][a * self.p + j];
                    if neg {
                        *e -= &c;
                    } else {
                        *e += &c;
                    }
                }
            }
        }
        let rank = linalg::rank(&matrix);
        Ok(Tableau {
            kernel_dim: self.q * self.p - rank,
            rank,
            matrix,
        })
    }

    fn row_labels(&self) -> Vec<(usize, MultiIndex)> {
        self.forms
            .iter()
            .enumerate()
            .flat_map(|(fi, f)| subsets(self.p, f.degree()).into_iter().map(move |s| (fi, s)))
            .collect()
    }

    /// Stacked matrix of `v -> xi ^ (v -| theta)|_E` over the closure forms,
    /// for `v` in the normal directions; `xi` may be symbolic.
    pub fn symbol_matrix(&self, xi: &[Scalar]) -> Result<Matrix<Scalar>> {
        if xi.len() != self.p {
            return Err(Error::Dimension(format!(
                "covector has {} components, E has dimension {}",
                xi.len(),
                self.p
            )));
        }
        let rows = self.row_labels();
        let mut matrix = vec![vec![Scalar::zero(); self.q]; rows.len()];
        for (fi, i, a, c) in self.mixed_terms() {
            let c = Scalar::from_rational(c.eval(&self.point)?);
            let c = if i.len() % 2 == 1 { -c } else { c };
            for (l, x) in xi.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                if let Some((neg, idx)) = merge_sign(&[l], &i) {
                    let r = rows.iter().position(|(f, s)| *f == fi && *s == idx).expect("row");
                    let t = &c * x;
                    matrix[r][a] = &matrix[r][a] + &(if neg { -t } else { t });
                }
            }
        }
        matrix.retain(|r| r.iter().any(|x| !x.is_zero()));
        Ok(matrix)
    }

    pub fn symbol(&self, xi: &[BigRational]) -> Result<Matrix<BigRational>> {
        let xs: Vec<Scalar> = xi.iter().cloned().map(Scalar::from_rational).collect();
        Ok(self
            .symbol_matrix(&xs)?
            .iter()
            .map(|r| r.iter().map(|x| x.as_constant().expect("numeric")).collect())
            .collect())
    }

    /// Whether `xi` is characteristic, with the kernel dimension of the symbol.
    pub fn is_characteristic(&self, xi: &[BigRational]) -> Result<(bool, usize)> {
        if xi.iter().all(Zero::is_zero) {
            return Err(Error::Dimension("the zero covector defines no hyperplane".into()));
        }
        let k = self.q - linalg::rank(&self.symbol(xi)?);
        Ok((k > 0, k))
    }

    /// A polynomial in `xi1..xip` vanishing at exactly the real characteristic
    /// covectors: the determinant of the symbol when it is square, otherwise
    /// the determinant of `sigma^T sigma`.
    pub fn characteristic_polynomial(&self) -> Result<(Scalar, bool)> {
        let xi: Vec<Scalar> = (1..=self.p).map(|i| Scalar::symbol(&format!("xi{i}"))).collect();
        let s = self.symbol_matrix(&xi)?;
        if s.len() == self.q {
            return Ok((linalg::det(&s), true));
        }
        let gram: Matrix<Scalar> = (0..self.q)
            .map(|i| {
                (0..self.q)
                    .map(|j| s.iter().fold(Scalar::zero(), |acc, r| &acc + &(&r[i] * &r[j])))
                    .collect()
            })
            .collect();
        Ok((linalg::det(&gram), false))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    pub matrix: Matrix<BigRational>,
    pub rank: usize,
    pub kernel_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacteristicSample {
    pub xi: Vec<String>,
    pub characteristic: bool,
    pub kernel_dim: usize,
}

impl CharacteristicSample {
    pub fn new(xi: &[BigRational], (characteristic, kernel_dim): (bool, usize)) -> Self {
        CharacteristicSample {
            xi: xi.iter().map(format_rational).collect(),
            characteristic,
            kernel_dim,
        }
    }
}
