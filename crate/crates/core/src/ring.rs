//! A minimal commutative-ring interface shared by scalars, series and
//! quotient rings, plus division-free linear algebra over it.

use std::fmt::Debug;

use crate::padic::RingElem;

pub trait Ring: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add_r(&self, o: &Self) -> Self;
    fn sub_r(&self, o: &Self) -> Self;
    fn mul_r(&self, o: &Self) -> Self;
    fn neg_r(&self) -> Self;
    fn is_zero_r(&self) -> bool;
}

impl Ring for RingElem {
    fn zero_like(&self) -> Self {
        self.spec().zero()
    }
    fn one_like(&self) -> Self {
        self.spec().one()
    }
    fn add_r(&self, o: &Self) -> Self {
        self.add_ref(o)
    }
    fn sub_r(&self, o: &Self) -> Self {
        self.sub_ref(o)
    }
    fn mul_r(&self, o: &Self) -> Self {
        self.mul_ref(o)
    }
    fn neg_r(&self) -> Self {
        self.neg_ref()
    }
    fn is_zero_r(&self) -> bool {
        self.is_zero()
    }
}

/// Characteristic polynomial `det(xI - A) = x^n + c_1 x^{n-1} + ... + c_n`
/// by Berkowitz's division-free algorithm; returns `[1, c_1, ..., c_n]`.
pub fn char_poly<R: Ring>(a: &[Vec<R>]) -> Vec<R> {
    let n = a.len();
    assert!(n > 0 && a.iter().all(|r| r.len() == n), "square matrix expected");
    let one = a[0][0].one_like();
    let zero = a[0][0].zero_like();
    let mut vect = vec![one.clone(), a[0][0].neg_r()];
    for r in 1..n {
        // column of the Toeplitz matrix for the leading (r+1) x (r+1) block
        let mut col = vec![zero.clone(); r + 2];
        col[0] = one.clone();
        col[1] = a[r][r].neg_r();
        let mut v: Vec<R> = (0..r).map(|i| a[i][r].clone()).collect();
        for c in col.iter_mut().skip(2) {
            let mut dot = zero.clone();
            for (j, vj) in v.iter().enumerate() {
                dot = dot.add_r(&a[r][j].mul_r(vj));
            }
            *c = dot.neg_r();
            let nv: Vec<R> = (0..r)
                .map(|i| {
                    let mut s = zero.clone();
                    for (j, vj) in v.iter().enumerate() {
                        s = s.add_r(&a[i][j].mul_r(vj));
                    }
                    s
                })
                .collect();
            v = nv;
        }
        let mut next = vec![zero.clone(); r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            let mut s = zero.clone();
            for j in 0..=i.min(r) {
                s = s.add_r(&col[i - j].mul_r(&vect[j]));
            }
            *slot = s;
        }
        vect = next;
    }
    vect
}

/// Determinant by Berkowitz (no divisions, so it works over any of the
/// truncated rings in this crate).
pub fn det<R: Ring>(a: &[Vec<R>]) -> R {
    let n = a.len();
    let cp = char_poly(a);
    if n.is_multiple_of(2) {
        cp[n].clone()
    } else {
        cp[n].neg_r()
    }
}

pub fn mat_mul<R: Ring>(a: &[Vec<R>], b: &[Vec<R>]) -> Vec<Vec<R>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let zero = a[0][0].zero_like();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = zero.clone();
                    for t in 0..k {
                        s = s.add_r(&a[i][t].mul_r(&b[t][j]));
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Adjugate via Cayley-Hamilton: `adj(A) = (-1)^{n+1} (A^{n-1} + c_1 A^{n-2} + ... + c_{n-1} I)`.
pub fn adjugate<R: Ring>(a: &[Vec<R>]) -> Vec<Vec<R>> {
    let n = a.len();
    let cp = char_poly(a);
    let zero = a[0][0].zero_like();
    let one = a[0][0].one_like();
    let ident: Vec<Vec<R>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { one.clone() } else { zero.clone() }).collect()).collect();
    // Horner: B = I; B = B*A + c_k I
    let mut b = ident.clone();
    for c in cp.iter().take(n).skip(1) {
        b = mat_mul(&b, a);
        for (i, row) in b.iter_mut().enumerate() {
            row[i] = row[i].add_r(c);
        }
    }
    if n.is_multiple_of(2) {
        b.iter().map(|r| r.iter().map(|x| x.neg_r()).collect()).collect()
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::RingSpec;

    fn m(spec: &RingSpec, rows: &[&[i64]]) -> Vec<Vec<RingElem>> {
        rows.iter().map(|r| r.iter().map(|&x| spec.from_int(x)).collect()).collect()
    }

    #[test]
    fn berkowitz_small() {
        let s = RingSpec::zp(7, 6).unwrap();
        assert_eq!(det(&m(&s, &[&[3]])), s.from_int(3));
        assert_eq!(det(&m(&s, &[&[1, 2], &[3, 4]])), s.from_int(-2));
        let a = m(&s, &[&[2, -1, 0, 3], &[1, 4, 2, 0], &[0, 5, 1, 1], &[2, 2, -3, 1]]);
        assert_eq!(det(&a), s.from_int(115));
    }

    #[test]
    fn adjugate_identity() {
        let s = RingSpec::zp(5, 8).unwrap();
        let a = m(&s, &[&[2, -1, 7], &[1, 4, 2], &[3, 5, 1]]);
        let d = det(&a);
        let prod = mat_mul(&a, &adjugate(&a));
        for (i, row) in prod.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert_eq!(*x, if i == j { d.clone() } else { s.zero() });
            }
        }
    }
}
