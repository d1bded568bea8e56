//! Quotients `R[w]/(m(w))` by a monic polynomial, generic over [`Ring`].
//!
//! Nesting gives the torsion tower (`O'_m` as an extension of `O'_{m-1}`),
//! and `R = TruncSeries` gives series-valued quotients for coefficientwise
//! norms.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{RingElem, Valuation};
use crate::ring::{adjugate, det, Ring};

/// `R[w]/(w^k + m_{k-1} w^{k-1} + ... + m_0)`.
#[derive(Debug)]
pub struct QuotRing<R: Ring> {
    /// Non-leading coefficients `m_0, ..., m_{k-1}` of the monic modulus.
    modulus: Vec<R>,
    zero: R,
    one: R,
}

#[derive(Clone)]
pub struct QuotElem<R: Ring> {
    ring: Arc<QuotRing<R>>,
    c: Vec<R>,
}

impl<R: Ring> fmt::Debug for QuotElem<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quot{:?}", self.c)
    }
}

impl<R: Ring> PartialEq for QuotElem<R> {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c
    }
}

impl<R: Ring> QuotRing<R> {
    /// The quotient by the monic polynomial whose non-leading coefficients
    /// are `modulus` (lowest first).
    pub fn new(modulus: Vec<R>) -> Arc<Self> {
        assert!(!modulus.is_empty(), "modulus must have positive degree");
        let zero = modulus[0].zero_like();
        let one = modulus[0].one_like();
        Arc::new(QuotRing { modulus, zero, one })
    }

    pub fn degree(&self) -> usize {
        self.modulus.len()
    }

    pub fn modulus(&self) -> &[R] {
        &self.modulus
    }

    pub fn base_zero(&self) -> &R {
        &self.zero
    }
}

/// Reduces a coefficient vector modulo the monic modulus.
fn reduce<R: Ring>(ring: &QuotRing<R>, mut v: Vec<R>) -> Vec<R> {
    let k = ring.degree();
    while v.len() > k {
        let t = v.pop().unwrap();
        if t.is_zero_r() {
            continue;
        }
        let base = v.len() - k;
        for (j, m) in ring.modulus.iter().enumerate() {
            v[base + j] = v[base + j].sub_r(&t.mul_r(m));
        }
    }
    v.resize(k, ring.zero.clone());
    v
}

impl<R: Ring> QuotElem<R> {
    pub fn from_coeffs(ring: &Arc<QuotRing<R>>, c: Vec<R>) -> Self {
        QuotElem { ring: ring.clone(), c: reduce(ring, c) }
    }

    pub fn from_base(ring: &Arc<QuotRing<R>>, x: R) -> Self {
        Self::from_coeffs(ring, vec![x])
    }

    /// The class of `w`.
    pub fn gen(ring: &Arc<QuotRing<R>>) -> Self {
        Self::from_coeffs(ring, vec![ring.zero.clone(), ring.one.clone()])
    }

    pub fn ring(&self) -> &Arc<QuotRing<R>> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[R] {
        &self.c
    }

    /// The constant coordinate if every other coordinate vanishes.
    pub fn as_base(&self) -> Option<R> {
        self.c[1..].iter().all(|x| x.is_zero_r()).then(|| self.c[0].clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a.add_r(b)).collect();
        QuotElem { ring: self.ring.clone(), c }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a.sub_r(b)).collect();
        QuotElem { ring: self.ring.clone(), c }
    }

    pub fn neg(&self) -> Self {
        QuotElem { ring: self.ring.clone(), c: self.c.iter().map(|a| a.neg_r()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let k = self.c.len();
        let mut v = vec![self.ring.zero.clone(); 2 * k - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero_r() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if b.is_zero_r() {
                    continue;
                }
                v[i + j] = v[i + j].add_r(&a.mul_r(b));
            }
        }
        QuotElem { ring: self.ring.clone(), c: reduce(&self.ring, v) }
    }

    pub fn scale(&self, x: &R) -> Self {
        QuotElem { ring: self.ring.clone(), c: self.c.iter().map(|a| a.mul_r(x)).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut r = self.one_like();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    /// Matrix of multiplication by `self` in the basis `1, w, ..., w^{k-1}`
    /// (column `j` holds the coordinates of `self * w^j`).
    pub fn mul_matrix(&self) -> Vec<Vec<R>> {
        let k = self.c.len();
        let w = Self::gen(&self.ring);
        let mut cols = Vec::with_capacity(k);
        let mut cur = self.clone();
        for _ in 0..k {
            cols.push(cur.c.clone());
            cur = cur.mul(&w);
        }
        (0..k).map(|i| (0..k).map(|j| cols[j][i].clone()).collect()).collect()
    }

    /// Norm to the base ring: the determinant of multiplication.
    pub fn norm(&self) -> R {
        det(&self.mul_matrix())
    }

    /// `(adj, N)` with `self * adj = N` and `N` in the base ring.
    pub fn adjugate_norm(&self) -> (Self, R) {
        let m = self.mul_matrix();
        let a = adjugate(&m);
        // self * (adj applied to e_0) = det * e_0
        let col: Vec<R> = a.iter().map(|row| row[0].clone()).collect();
        (QuotElem { ring: self.ring.clone(), c: col }, det(&m))
    }

    /// Evaluates the polynomial with base coefficients `p` at `self`.
    pub fn eval_poly(&self, p: &[R]) -> Self {
        let mut acc = self.zero_like();
        for c in p.iter().rev() {
            acc = acc.mul(self);
            acc.c[0] = acc.c[0].add_r(c);
        }
        acc
    }

    /// Substitutes `w -> image` (an element of another quotient ring over
    /// the same base).
    pub fn substitute(&self, image: &QuotElem<R>) -> QuotElem<R> {
        image.eval_poly(&self.c)
    }
}

impl QuotElem<RingElem> {
    /// Exact division in a quotient over a field order: `self / d`.
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        let (adj, n) = d.adjugate_norm();
        let num = self.mul(&adj);
        if n.is_zero() {
            return Err(Error::Precision("divisor has vanishing norm at this precision".into()));
        }
        let c: Result<Vec<RingElem>> = num.c.iter().map(|x| x.div_exact(&n)).collect();
        Ok(QuotElem { ring: self.ring.clone(), c: c? })
    }

    /// Smallest coordinate valuation (a lower bound for the valuation of the
    /// element).
    pub fn min_coord_valuation(&self) -> Valuation {
        self.c.iter().map(|x| x.valuation()).min().unwrap_or(Valuation::Infinite)
    }

    pub fn with_prec(&self, k: u32) -> Self {
        QuotElem { ring: self.ring.clone(), c: self.c.iter().map(|x| x.with_prec(k)).collect() }
    }

    pub fn prec(&self) -> u32 {
        self.c.iter().map(|x| x.prec()).min().unwrap_or(0)
    }
}

impl<R: Ring> Ring for QuotElem<R> {
    fn zero_like(&self) -> Self {
        QuotElem { ring: self.ring.clone(), c: vec![self.ring.zero.clone(); self.c.len()] }
    }
    fn one_like(&self) -> Self {
        Self::from_base(&self.ring, self.ring.one.clone())
    }
    fn add_r(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_r(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_r(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn neg_r(&self) -> Self {
        self.neg()
    }
    fn is_zero_r(&self) -> bool {
        self.c.iter().all(|x| x.is_zero_r())
    }
}

/// Truncated products and compositions for series with coefficients in an
/// arbitrary [`Ring`], stored as coefficient vectors.
pub mod gseries {
    use crate::ring::Ring;

    pub fn mul<R: Ring>(a: &[R], b: &[R], d: usize) -> Vec<R> {
        let zero = a[0].zero_like();
        let mut out = vec![zero; d];
        for (i, x) in a.iter().enumerate().take(d) {
            if x.is_zero_r() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(d - i) {
                if y.is_zero_r() {
                    continue;
                }
                out[i + j] = out[i + j].add_r(&x.mul_r(y));
            }
        }
        out
    }

    /// `outer(inner)` by Horner, for a polynomial `outer` with coefficients
    /// mapped into `R` by `lift`.
    pub fn compose<R: Ring, S>(outer: &[S], inner: &[R], d: usize, lift: impl Fn(&S) -> R) -> Vec<R> {
        let zero = inner[0].zero_like();
        let mut acc = vec![zero; d];
        for c in outer.iter().rev() {
            acc = mul(&acc, inner, d);
            acc[0] = acc[0].add_r(&lift(c));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::RingSpec;

    #[test]
    fn quadratic_quotient_matches_ring() {
        // Z_5[w]/(w^2 + 2): the norm of a + b w is a^2 + 2 b^2
        let s = RingSpec::zp(5, 6).unwrap();
        let q = QuotRing::new(vec![s.from_int(2), s.zero()]);
        let x = QuotElem::from_coeffs(&q, vec![s.from_int(3), s.from_int(4)]);
        assert_eq!(x.norm(), s.from_int(9 + 2 * 16));
        let w = QuotElem::gen(&q);
        assert_eq!(w.mul(&w), QuotElem::from_base(&q, s.from_int(-2)));
        let (adj, n) = x.adjugate_norm();
        assert_eq!(x.mul(&adj), QuotElem::from_base(&q, n));
    }

    #[test]
    fn exact_division() {
        let s = RingSpec::zp(3, 8).unwrap();
        // w^2 + 3: w is a uniformizer of a ramified extension
        let q = QuotRing::new(vec![s.from_int(3), s.zero()]);
        let w = QuotElem::gen(&q);
        let a = QuotElem::from_coeffs(&q, vec![s.from_int(5), s.from_int(7)]);
        let prod = a.mul(&w);
        let back = prod.div_exact(&w).unwrap();
        assert_eq!(back, a.with_prec(back.prec()));
        assert!(back.prec() >= 7);
    }

    #[test]
    fn nested_norm() {
        // (Z_7[u]/(u^2 - 3))[v]/(v^2 - u): norm of v down one level is -u
        let s = RingSpec::zp(7, 5).unwrap();
        let q1 = QuotRing::new(vec![s.from_int(-3), s.zero()]);
        let u = QuotElem::gen(&q1);
        let zero1 = u.zero_like();
        let q2 = QuotRing::new(vec![u.neg(), zero1]);
        let v = QuotElem::gen(&q2);
        assert_eq!(v.norm(), u.neg());
        assert_eq!(v.norm().norm(), s.from_int(-3));
    }
}
