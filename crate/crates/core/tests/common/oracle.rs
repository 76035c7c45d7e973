//! Brute-force reference computations on integral elements.

use cartan::dsl::Document;
use cartan::forms::subsets;
use cartan::linalg;
use cartan::{ExteriorSystem, IntegralElement, NumForm, TangentVector};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{fixture, q};

pub struct Setup {
    pub sys: ExteriorSystem,
    pub e: IntegralElement,
    pub a: Vec<Vec<BigRational>>,
}

pub fn setup(name: &str) -> Setup {
    let doc: Document = fixture(name);
    let sys = doc.system().unwrap().clone();
    let seed = doc.seed.unwrap_or(0);
    let a = match doc.integral_element().unwrap() {
        Some(e) => e.chart(&sys).unwrap(),
        None => cartan::involution::find_integral_element(&sys, &doc.point(), seed).unwrap(),
    };
    let e = IntegralElement::from_chart(&sys, doc.point(), &a).unwrap();
    Setup { sys, e, a }
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    q(rng.gen_range(-9..=9), rng.gen_range(1..=5))
}

pub fn random_xi(rng: &mut ChaCha8Rng, p: usize) -> Vec<BigRational> {
    loop {
        let xi: Vec<BigRational> = (0..p).map(|_| random_rational(rng)).collect();
        if xi.iter().any(|x| !x.is_zero()) {
            return xi;
        }
    }
}

/// The graph basis `e_j = d/d omega_j + sum_r a_rj d/d pi_r` of the element.
pub fn graph_basis(s: &Setup) -> Vec<TangentVector> {
    let n = s.sys.dim();
    let pi = s.sys.complement();
    s.sys
        .independence()
        .iter()
        .enumerate()
        .map(|(j, &w)| {
            let mut v = vec![BigRational::zero(); n];
            v[w] = BigRational::one();
            for (r, &i) in pi.iter().enumerate() {
                v[i] = s.a[r][j].clone();
            }
            TangentVector(v)
        })
        .collect()
}

/// Dimension of `{w : theta(w, h_S) = 0}` minus `p`, where `h` spans the
/// hyperplane `xi = 0` of the element: the extra room for integral
/// elements through that hyperplane besides the element itself.
pub fn extension_excess(s: &Setup, xi: &[BigRational]) -> usize {
    let n = s.sys.dim();
    let p = s.sys.p();
    let e = graph_basis(s);
    let l = xi.iter().position(|x| !x.is_zero()).unwrap();
    let h: Vec<TangentVector> = (0..p)
        .filter(|&k| k != l)
        .map(|k| TangentVector((0..n).map(|i| &xi[l] * &e[k].0[i] - &xi[k] * &e[l].0[i]).collect()))
        .collect();
    let closure: Vec<NumForm> = s.sys.closure_at(&s.e.point).unwrap();
    let mut rows = Vec::new();
    for f in &closure {
        for sub in subsets(h.len(), f.degree() - 1) {
            let row: Vec<BigRational> = (0..n)
                .map(|i| {
                    let mut vs = vec![TangentVector::unit(n, i)];
                    vs.extend(sub.iter().map(|&k| h[k].clone()));
                    f.eval_on(&vs)
                })
                .collect();
            rows.push(row);
        }
    }
    n - linalg::rank(&rows) - p
}
