//! Characteristic ideals of torsion modules over `Lambda = O[[T]]`, given as
//! cokernels of square presentation matrices.
//!
//! The characteristic ideal of `coker(M)` is generated by `det M`; its
//! Weierstrass data `(mu, lambda, P)` is a complete invariant of the ideal.


use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{RingSpec, RingSpecJson};
use crate::series::{weierstrass_prep, SeriesJson, TruncSeries, WeierstrassData};

/// A square matrix over `O[[T]]` with nonzero determinant at working
/// precision; it presents the torsion module `Lambda^n / M Lambda^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaPresentation {
    base: RingSpec,
    cap: usize,
    rows: Vec<Vec<TruncSeries>>,
}

impl LambdaPresentation {
    /// Checks shape and rings, truncates every entry to the smallest cap,
    /// and rejects matrices whose determinant vanishes at working precision.
    pub fn new(rows: Vec<Vec<TruncSeries>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("a presentation must be a nonempty square matrix".into()));
        }
        let base = rows[0][0].spec().clone();
        if rows.iter().flatten().any(|s| s.spec() != &base) {
            return Err(Error::RingMismatch("entries over different rings".into()));
        }
        let cap = rows.iter().flatten().map(|s| s.cap()).min().expect("nonempty");
        let rows = rows.into_iter().map(|r| r.into_iter().map(|s| s.truncate(cap)).collect()).collect();
        let pres = LambdaPresentation { base, cap, rows };
        if pres.det().is_zero() {
            return Err(Error::Domain("the determinant is zero at working precision: the module is not torsion".into()));
        }
        Ok(pres)
    }

    pub fn identity(spec: &RingSpec, n: usize, cap: usize) -> Result<Self> {
        Self::diagonal(&vec![TruncSeries::one(spec, cap); n])
    }

    pub fn diagonal(entries: &[TruncSeries]) -> Result<Self> {
        let n = entries.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { entries[i].clone() } else { zero_like(&entries[i]) }).collect())
            .collect();
        Self::new(rows)
    }

    /// `[[A, C], [0, B]]`: the middle term of `0 -> coker A -> coker M -> coker B -> 0`.
    pub fn block_triangular(a: &Self, b: &Self, c: &[Vec<TruncSeries>]) -> Result<Self> {
        let (na, nb) = (a.size(), b.size());
        if c.len() != na || c.iter().any(|r| r.len() != nb) {
            return Err(Error::Domain(format!("the off-diagonal block must be {na} x {nb}")));
        }
        let z = TruncSeries::zero(&a.base, a.cap.min(b.cap));
        let mut rows = Vec::with_capacity(na + nb);
        for i in 0..na {
            rows.push(a.rows[i].iter().chain(&c[i]).cloned().collect());
        }
        for i in 0..nb {
            rows.push(std::iter::repeat_n(z.clone(), na).chain(b.rows[i].iter().cloned()).collect());
        }
        Self::new(rows)
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }
    pub fn cap(&self) -> usize {
        self.cap
    }
    pub fn spec(&self) -> &RingSpec {
        &self.base
    }
    pub fn rows(&self) -> &[Vec<TruncSeries>] {
        &self.rows
    }

    /// Laplace expansion along the rows, shared over column subsets:
    /// `D[S]` is the determinant of the first `|S|` rows on columns `S`.
    pub fn det(&self) -> TruncSeries {
        let n = self.size();
        assert!(n <= 16, "determinant by subset expansion is limited to 16 x 16");
        let mut d: Vec<Option<TruncSeries>> = vec![None; 1 << n];
        d[0] = Some(TruncSeries::one(&self.base, self.cap));
        for s in 0..(1usize << n) {
            let Some(cur) = d[s].take() else { continue };
            let row = s.count_ones() as usize;
            if row == n {
                d[s] = Some(cur);
                continue;
            }
            for j in (0..n).filter(|j| s & (1 << j) == 0) {
                // sign from the columns of S to the right of j
                let above = (s >> (j + 1)).count_ones();
                let mut term = cur.mul(&self.rows[row][j]);
                if above % 2 == 1 {
                    term = term.neg();
                }
                let t = s | (1 << j);
                d[t] = Some(match d[t].take() {
                    Some(acc) => acc.add(&term),
                    None => term,
                });
            }
        }
        d[(1 << n) - 1].take().expect("full set reached")
    }

    /// Multiplies by random elementary matrices on both sides: row and
    /// column additions with random series multipliers, swaps, and scaling
    /// by random unit series. The determinant changes by a unit.
    pub fn scramble<R: Rng>(&self, ops: usize, rng: &mut R) -> Self {
        let n = self.size();
        let mut m = self.rows.clone();
        for _ in 0..ops {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let by_rows = rng.gen_bool(0.5);
            match rng.gen_range(0..4) {
                0 if n > 1 => swap(&mut m, i, j, by_rows),
                1 => {
                    let u = random_unit(&self.base, self.cap, rng);
                    for k in 0..n {
                        let (r, c) = if by_rows { (i, k) } else { (k, i) };
                        m[r][c] = m[r][c].mul(&u);
                    }
                }
                _ if i != j => {
                    let r = TruncSeries::random(&self.base, self.cap, rng);
                    for k in 0..n {
                        let ((ti, tj), (si, sj)) = if by_rows { ((i, k), (j, k)) } else { ((k, i), (k, j)) };
                        let add = m[si][sj].mul(&r);
                        m[ti][tj] = m[ti][tj].add(&add);
                    }
                }
                _ => {}
            }
        }
        LambdaPresentation { base: self.base.clone(), cap: self.cap, rows: m }
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            ring: self.base.to_json(),
            entries: self.rows.iter().map(|r| r.iter().map(|s| s.to_json()).collect()).collect(),
        }
    }

    pub fn from_json(j: &MatrixJson) -> Result<Self> {
        let spec = RingSpec::from_json(&j.ring)?;
        let rows: Result<Vec<Vec<TruncSeries>>> =
            j.entries.iter().map(|r| r.iter().map(TruncSeries::from_json).collect()).collect();
        let pres = Self::new(rows?)?;
        if pres.base != spec {
            return Err(Error::Format("entry rings differ from the declared ring".into()));
        }
        Ok(pres)
    }
}

/// Serialized presentation: the ring and a row-major matrix of series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub ring: RingSpecJson,
    pub entries: Vec<Vec<SeriesJson>>,
}

fn zero_like(s: &TruncSeries) -> TruncSeries {
    TruncSeries::zero(s.spec(), s.cap())
}

fn swap(m: &mut [Vec<TruncSeries>], i: usize, j: usize, by_rows: bool) {
    if i == j {
        return;
    }
    if by_rows {
        m.swap(i, j);
    } else {
        for r in m.iter_mut() {
            r.swap(i, j);
        }
    }
}

fn random_unit<R: Rng>(spec: &RingSpec, cap: usize, rng: &mut R) -> TruncSeries {
    let s = TruncSeries::random(spec, cap, rng);
    if s.coeff(0).is_unit() {
        s
    } else {
        s.add(&TruncSeries::one(spec, cap))
    }
}

/// The characteristic ideal of `coker(M)`: `det M` prepared as
/// `p^mu P(T) U(T)`.
///
/// `det M` is known mod `T^D`. Modulo `P` the power `T^lambda` lies in the
/// maximal ideal, so the tail `T^D h` changes `P` only modulo
/// `pi^floor(D / lambda)`; the reported digits are capped accordingly.
pub fn char_ideal(pres: &LambdaPresentation) -> Result<WeierstrassData> {
    let det = pres.det();
    if det.is_zero() {
        return Err(Error::Domain("zero determinant at working precision".into()));
    }
    let mut w = weierstrass_prep(&det)?;
    if w.lambda > 0 {
        let e = pres.base.ramification_index() as usize;
        w.n_eff = w.n_eff.min((pres.cap / w.lambda / e) as u32);
    }
    Ok(w)
}

/// `0 -> coker A -> coker M -> coker B -> 0` with `M = [[A, C], [0, B]]`.
#[derive(Clone, Debug)]
pub struct ExactSequence {
    pub sub: LambdaPresentation,
    pub middle: LambdaPresentation,
    pub quotient: LambdaPresentation,
}

impl ExactSequence {
    pub fn block(sub: LambdaPresentation, quotient: LambdaPresentation, off_diagonal: &[Vec<TruncSeries>]) -> Result<Self> {
        let middle = LambdaPresentation::block_triangular(&sub, &quotient, off_diagonal)?;
        Ok(ExactSequence { sub, middle, quotient })
    }

    pub fn block_diagonal(sub: LambdaPresentation, quotient: LambdaPresentation) -> Result<Self> {
        let z = TruncSeries::zero(sub.spec(), sub.cap().min(quotient.cap()));
        let c = vec![vec![z; quotient.size()]; sub.size()];
        Self::block(sub, quotient, &c)
    }
}

/// Outcome of comparing `char(middle)` with `char(sub) char(quotient)`.
#[derive(Clone, Debug)]
pub struct Additivity {
    pub sub: WeierstrassData,
    pub middle: WeierstrassData,
    pub quotient: WeierstrassData,
    /// Digits to which the distinguished polynomials were compared.
    pub digits: u32,
    pub mu_ok: bool,
    pub lambda_ok: bool,
    pub distinguished_ok: bool,
}

impl Additivity {
    pub fn holds(&self) -> bool {
        self.mu_ok && self.lambda_ok && self.distinguished_ok
    }
}

/// Checks multiplicativity of characteristic ideals on a short exact
/// sequence: `mu` and `lambda` add, and the distinguished polynomial of the
/// middle term is the product of the outer ones modulo `p^digits`.
pub fn additivity_check(seq: &ExactSequence) -> Result<Additivity> {
    let sub = char_ideal(&seq.sub)?;
    let middle = char_ideal(&seq.middle)?;
    let quotient = char_ideal(&seq.quotient)?;
    let digits = sub.n_eff.min(middle.n_eff).min(quotient.n_eff);
    let mu_ok = middle.mu == sub.mu + quotient.mu;
    let lambda_ok = middle.lambda == sub.lambda + quotient.lambda;
    let distinguished_ok = lambda_ok && {
        let d = middle.lambda + 1;
        let prod = sub.distinguished_series(d).mul(&quotient.distinguished_series(d));
        prod.with_n_eff(digits) == middle.distinguished_series(d).with_n_eff(digits)
    };
    Ok(Additivity { sub, middle, quotient, digits, mu_ok, lambda_ok, distinguished_ok })
}
