use super::FormalGroup;
use crate::error::Result;
use crate::padic::{RingElem, RingSpec};
use crate::series::TruncSeries;

/// A two-variable series truncated at total degree `D`, stored by
/// homogeneous pieces: `hom[k][i]` is the coefficient of `X^i Y^(k-i)`.
#[derive(Clone, Debug)]
pub struct BiSeries {
    spec: RingSpec,
    hom: Vec<Vec<RingElem>>,
    n_eff: u32,
}

impl BiSeries {
    pub fn cap(&self) -> usize {
        self.hom.len()
    }

    pub fn n_eff(&self) -> u32 {
        self.n_eff
    }

    /// Coefficient of `X^i Y^j`.
    pub fn coeff(&self, i: usize, j: usize) -> RingElem {
        if i + j >= self.hom.len() {
            return self.spec.zero().with_prec(0);
        }
        self.hom[i + j][i].with_prec(self.n_eff)
    }

    /// `F(Y, X) = F(X, Y)` at the known precision.
    pub fn is_symmetric(&self) -> bool {
        self.hom.iter().enumerate().all(|(k, h)| (0..=k).all(|i| h[i].with_prec(self.n_eff) == h[k - i].with_prec(self.n_eff)))
    }

    /// `dF/dY (X, 0)`.
    pub fn d2_at_zero(&self) -> TruncSeries {
        let d = self.hom.len();
        let cs: Vec<RingElem> = (0..d - 1).map(|i| self.hom[i + 1][i].clone()).collect();
        TruncSeries::from_coeffs(&self.spec, &cs, d - 1).with_n_eff(self.n_eff)
    }

    /// `F(a(X), b(X))`; `a` and `b` must have zero constant term.
    pub fn eval(&self, a: &TruncSeries, b: &TruncSeries) -> Result<TruncSeries> {
        let d = self.hom.len().min(a.cap()).min(b.cap());
        for s in [a, b] {
            if !s.coeff(0).is_zero() {
                return Err(crate::Error::Domain("group law arguments need zero constant term".into()));
            }
        }
        let mut apow = vec![TruncSeries::one(&self.spec, d)];
        let mut bpow = vec![TruncSeries::one(&self.spec, d)];
        for k in 1..d {
            apow.push(apow[k - 1].mul(&a.truncate(d)));
            bpow.push(bpow[k - 1].mul(&b.truncate(d)));
        }
        // sum over j of b^j * (sum_i c_ij a^i)
        let mut out = TruncSeries::zero(&self.spec, d);
        for j in 0..d {
            let mut inner = TruncSeries::zero(&self.spec, d);
            for i in 0..d - j {
                let c = &self.hom[i + j][i];
                if !c.is_zero() {
                    inner = inner.add(&apow[i].scale(c));
                }
            }
            if !inner.is_zero() {
                out = out.add(&inner.mul(&bpow[j]));
            }
        }
        Ok(out.with_n_eff(self.n_eff.min(a.n_eff()).min(b.n_eff())))
    }
}

/// Product of homogeneous polynomials given by coefficient lists in `X`.
fn hom_mul(a: &[RingElem], b: &[RingElem], spec: &RingSpec) -> Vec<RingElem> {
    let mut out = vec![spec.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = out[i + j].add_ref(&x.mul_ref(y));
            }
        }
    }
    out
}

/// Solves `f(F(X, Y)) = F(f(X), f(Y))` degree by degree:
/// `(pi - pi^k) F_k = [sum_{m<k} F_m(f, f)]_k - sum_{j>=2} f_j [F^j]_k`.
pub(super) fn solve_law(g: &FormalGroup) -> Result<BiSeries> {
    let spec = g.spec().clone();
    let d = g.cap();
    let degf = g.f_poly().len() - 1;
    let fc: Vec<Vec<RingElem>> = g.fpow.iter().map(|s| s.coeffs()).collect();
    let mut hom: Vec<Vec<RingElem>> = vec![vec![spec.zero()], vec![spec.one(), spec.one()]];
    // pw[j][k]: homogeneous degree-k part of F^j
    let zero_hom = |k: usize| vec![spec.zero(); k + 1];
    let mut pw: Vec<Vec<Vec<RingElem>>> = vec![Vec::new(); degf + 1];
    for row in pw.iter_mut().skip(2) {
        row.push(zero_hom(0));
        row.push(zero_hom(1));
    }
    for k in 2..d {
        for j in 2..=degf {
            let mut acc = zero_hom(k);
            for m in 1..=(k + 1).saturating_sub(j) {
                let prev = if j == 2 { &hom[k - m] } else { &pw[j - 1][k - m] };
                let prod = hom_mul(&hom[m], prev, &spec);
                for (a, b) in acc.iter_mut().zip(prod) {
                    *a = a.add_ref(&b);
                }
            }
            pw[j].push(acc);
        }
        let mut rhs = zero_hom(k);
        for (m, hm) in hom.iter().enumerate().take(k).skip(1) {
            for (i, c) in hm.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let jy = m - i;
                // c * f^i(X) * f^jy(Y), degree-k part
                for a in i..=(k - jy) {
                    let x = &fc[i][a];
                    let y = &fc[jy][k - a];
                    if x.is_zero() || y.is_zero() {
                        continue;
                    }
                    rhs[a] = rhs[a].add_ref(&c.mul_ref(&x.mul_ref(y)));
                }
            }
        }
        for j in 2..=degf {
            let fj = &g.f_poly()[j];
            if fj.is_zero() {
                continue;
            }
            for (a, b) in rhs.iter_mut().zip(&pw[j][k]) {
                *a = a.sub_ref(&fj.mul_ref(b));
            }
        }
        let fk: Result<Vec<RingElem>> = rhs.iter().map(|x| g.div_step(x, k)).collect();
        hom.push(fk?);
    }
    Ok(BiSeries { spec, hom, n_eff: g.n_eff() })
}
