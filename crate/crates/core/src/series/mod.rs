//! Truncated power series over the coefficient rings of [`crate::padic`].
//!
//! A [`TruncSeries`] stores `D` coefficients (the degree cap) and a single
//! effective precision `N_eff`: every coefficient is known modulo
//! `p^N_eff`. Arithmetic takes the minimum of the operand caps and
//! precisions and never reads past the cap.

mod hurwitz;
mod roots;
mod scaled;
mod weierstrass;

pub use hurwitz::HurwitzSeries;
pub use roots::{mu_lambda_by_roots, RootsReport};
pub use scaled::ScaledSeries;
pub use weierstrass::{weierstrass_prep, WeierstrassData};

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::elem::{mul_acc, raw_mul};
use crate::padic::{RingElem, RingSpec, RingSpecJson, Valuation};
use crate::ring::Ring;

pub const DEFAULT_CAP: usize = 64;

#[derive(Clone)]
pub struct TruncSeries {
    spec: RingSpec,
    d: usize,
    n_eff: u32,
    data: Vec<u128>,
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.spec.rank();
        let mut first = true;
        for k in 0..self.d {
            let c = &self.data[k * r..(k + 1) * r];
            if c.iter().all(|&x| x == 0) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if r == 1 {
                write!(f, "{}", c[0])?;
            } else {
                write!(f, "{:?}", c)?;
            }
            if k > 0 {
                write!(f, "*X^{k}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(X^{}, p^{})", self.d, self.n_eff)
    }
}

impl PartialEq for TruncSeries {
    /// Equality modulo `(p^min N_eff, X^min D)`.
    fn eq(&self, o: &Self) -> bool {
        if self.spec != o.spec {
            return false;
        }
        let r = self.spec.rank();
        let d = self.d.min(o.d);
        let pk = self.spec.p_pow(self.n_eff.min(o.n_eff));
        self.data[..d * r].iter().zip(&o.data[..d * r]).all(|(a, b)| a % pk == b % pk)
    }
}

impl TruncSeries {
    pub fn zero(spec: &RingSpec, d: usize) -> Self {
        assert!(d >= 1, "degree cap must be positive");
        TruncSeries { spec: spec.clone(), d, n_eff: spec.prec(), data: vec![0; d * spec.rank()] }
    }

    pub fn one(spec: &RingSpec, d: usize) -> Self {
        Self::constant(&spec.one(), d)
    }

    /// The series `X`.
    pub fn x(spec: &RingSpec, d: usize) -> Self {
        Self::monomial(&spec.one(), 1, d)
    }

    pub fn constant(c: &RingElem, d: usize) -> Self {
        Self::monomial(c, 0, d)
    }

    pub fn monomial(c: &RingElem, k: usize, d: usize) -> Self {
        let mut s = Self::zero(c.spec(), d);
        if k < d {
            s.set(k, c);
        }
        s.n_eff = c.prec();
        s.canon();
        s
    }

    pub fn from_coeffs(spec: &RingSpec, coeffs: &[RingElem], d: usize) -> Self {
        let mut s = Self::zero(spec, d);
        let mut n = spec.prec();
        for (k, c) in coeffs.iter().enumerate().take(d) {
            assert!(c.spec() == spec, "coefficient ring mismatch");
            s.set(k, c);
            n = n.min(c.prec());
        }
        s.n_eff = n;
        s.canon();
        s
    }

    pub fn from_ints(spec: &RingSpec, coeffs: &[i64], d: usize) -> Self {
        let cs: Vec<RingElem> = coeffs.iter().map(|&c| spec.from_int(c)).collect();
        Self::from_coeffs(spec, &cs, d)
    }

    pub(crate) fn from_raw(spec: &RingSpec, d: usize, n_eff: u32, data: Vec<u128>) -> Self {
        debug_assert_eq!(data.len(), d * spec.rank());
        let mut s = TruncSeries { spec: spec.clone(), d, n_eff: n_eff.min(spec.prec()), data };
        s.canon();
        s
    }

    fn canon(&mut self) {
        if self.n_eff < self.spec.prec() {
            let pk = self.spec.p_pow(self.n_eff);
            for c in self.data.iter_mut() {
                *c %= pk;
            }
        }
    }

    fn set(&mut self, k: usize, c: &RingElem) {
        let r = self.spec.rank();
        self.data[k * r..(k + 1) * r].copy_from_slice(c.coords());
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }
    /// The degree cap `D`: coefficients of `X^k` for `k < D` are stored.
    pub fn cap(&self) -> usize {
        self.d
    }
    pub fn n_eff(&self) -> u32 {
        self.n_eff
    }
    pub(crate) fn raw(&self) -> &[u128] {
        &self.data
    }
    pub(crate) fn raw_coeff(&self, k: usize) -> &[u128] {
        let r = self.spec.rank();
        &self.data[k * r..(k + 1) * r]
    }

    pub fn coeff(&self, k: usize) -> RingElem {
        if k >= self.d {
            return self.spec.zero().with_prec(0);
        }
        self.spec.from_residues(self.raw_coeff(k).to_vec(), self.n_eff).expect("rank")
    }

    pub fn coeffs(&self) -> Vec<RingElem> {
        (0..self.d).map(|k| self.coeff(k)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&c| c == 0)
    }

    fn coeff_is_zero(&self, k: usize) -> bool {
        self.raw_coeff(k).iter().all(|&c| c == 0)
    }

    /// Index of the first nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        (0..self.d).find(|&k| !self.coeff_is_zero(k))
    }

    /// Index of the last nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        (0..self.d).rev().find(|&k| !self.coeff_is_zero(k))
    }

    /// Truncates to a smaller cap.
    pub fn truncate(&self, d: usize) -> Self {
        let d = d.min(self.d).max(1);
        let r = self.spec.rank();
        Self::from_raw(&self.spec, d, self.n_eff, self.data[..d * r].to_vec())
    }

    /// Raises the cap by declaring the new coefficients zero. Only meaningful
    /// for series that are known to be polynomials of degree below the old
    /// cap.
    pub fn extend_exact(&self, d: usize) -> Self {
        if d <= self.d {
            return self.truncate(d);
        }
        let mut data = self.data.clone();
        data.resize(d * self.spec.rank(), 0);
        Self::from_raw(&self.spec, d, self.n_eff, data)
    }

    pub fn with_n_eff(&self, n: u32) -> Self {
        Self::from_raw(&self.spec, self.d, n.min(self.n_eff), self.data.clone())
    }

    pub(crate) fn assume_n_eff(&self, n: u32) -> Self {
        TruncSeries { spec: self.spec.clone(), d: self.d, n_eff: n.min(self.spec.prec()), data: self.data.clone() }
    }

    fn check(&self, o: &Self) {
        assert!(self.spec == o.spec, "series ring mismatch: {:?} vs {:?}", self.spec, o.spec);
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let d = self.d.min(o.d);
        let r = self.spec.rank();
        let md = &self.spec.0.md;
        let data = (0..d * r).map(|i| md.add(self.data[i], o.data[i])).collect();
        Self::from_raw(&self.spec, d, self.n_eff.min(o.n_eff), data)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check(o);
        let d = self.d.min(o.d);
        let r = self.spec.rank();
        let md = &self.spec.0.md;
        let data = (0..d * r).map(|i| md.sub(self.data[i], o.data[i])).collect();
        Self::from_raw(&self.spec, d, self.n_eff.min(o.n_eff), data)
    }

    pub fn neg(&self) -> Self {
        let md = &self.spec.0.md;
        let data = self.data.iter().map(|&c| md.neg(c)).collect();
        Self::from_raw(&self.spec, self.d, self.n_eff, data)
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let d = self.d.min(o.d);
        self.mul_to(o, d)
    }

    /// Product truncated at `d` (which must not exceed either cap).
    fn mul_to(&self, o: &Self, d: usize) -> Self {
        let r = self.spec.rank();
        let mut out = vec![0u128; d * r];
        let ob = o.degree().map_or(0, |x| x + 1).min(d);
        for i in 0..d {
            if self.coeff_is_zero(i) {
                continue;
            }
            let a = &self.data[i * r..(i + 1) * r];
            for j in 0..ob.min(d - i) {
                let b = &o.data[j * r..(j + 1) * r];
                if b.iter().all(|&x| x == 0) {
                    continue;
                }
                mul_acc(&self.spec, a, b, &mut out[(i + j) * r..(i + j + 1) * r]);
            }
        }
        Self::from_raw(&self.spec, d, self.n_eff.min(o.n_eff), out)
    }

    pub fn scale(&self, c: &RingElem) -> Self {
        let r = self.spec.rank();
        let mut out = vec![0u128; self.d * r];
        for k in 0..self.d {
            if !self.coeff_is_zero(k) {
                let prod = raw_mul(&self.spec, self.raw_coeff(k), c.coords());
                out[k * r..(k + 1) * r].copy_from_slice(&prod);
            }
        }
        Self::from_raw(&self.spec, self.d, self.n_eff.min(c.prec()), out)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&self.spec.from_int(k))
    }

    /// Multiplies by `X^k`, keeping the cap.
    pub fn shift_up(&self, k: usize) -> Self {
        let r = self.spec.rank();
        let mut data = vec![0u128; self.d * r];
        if k < self.d {
            data[k * r..].copy_from_slice(&self.data[..(self.d - k) * r]);
        }
        Self::from_raw(&self.spec, self.d, self.n_eff, data)
    }

    /// Drops the first `k` coefficients and divides by `X^k`; the cap shrinks
    /// by `k`.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if k >= self.d {
            return Err(Error::Cap(format!("shift by {k} exhausts cap {}", self.d)));
        }
        let r = self.spec.rank();
        Ok(Self::from_raw(&self.spec, self.d - k, self.n_eff, self.data[k * r..].to_vec()))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut r = Self::one(&self.spec, self.d);
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

    /// Formal derivative; the cap drops by one.
    pub fn derive(&self) -> Self {
        if self.d == 1 {
            return Self::zero(&self.spec, 1).with_n_eff(self.n_eff);
        }
        let r = self.spec.rank();
        let md = &self.spec.0.md;
        let mut out = vec![0u128; (self.d - 1) * r];
        for k in 1..self.d {
            let kk = md.from_i128(k as i128);
            for t in 0..r {
                out[(k - 1) * r + t] = md.mul(self.data[k * r + t], kk);
            }
        }
        Self::from_raw(&self.spec, self.d - 1, self.n_eff, out)
    }

    /// Multiplicative inverse; the constant term must be a unit.
    pub fn invert(&self) -> Result<Self> {
        let b0 = self.coeff(0).inverse().map_err(|_| {
            Error::Domain("series inverse needs a unit constant term".into())
        })?;
        let r = self.spec.rank();
        let md = &self.spec.0.md;
        let mut out = vec![0u128; self.d * r];
        out[..r].copy_from_slice(b0.coords());
        let mut acc = vec![0u128; r];
        for k in 1..self.d {
            acc.iter_mut().for_each(|x| *x = 0);
            for i in 1..=k {
                let a = &self.data[i * r..(i + 1) * r];
                if a.iter().all(|&x| x == 0) {
                    continue;
                }
                mul_acc(&self.spec, a, &out[(k - i) * r..(k - i + 1) * r], &mut acc);
            }
            let v = raw_mul(&self.spec, &acc, b0.coords());
            for t in 0..r {
                out[k * r + t] = md.neg(v[t]);
            }
        }
        Ok(Self::from_raw(&self.spec, self.d, self.n_eff, out))
    }

    /// Composition `self(inner)`. The inner constant term must have positive
    /// valuation. When it is nonzero, the tail of `self` beyond its cap
    /// contributes terms of valuation `>= (D - j) v(c)` to degree `j`, so the
    /// result cap shrinks to keep `N_eff` digits exact.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check(inner);
        let c = inner.coeff(0);
        let mut d = self.d.min(inner.d);
        if !c.is_zero() {
            let vc = match c.valuation() {
                Valuation::Finite(v) if v > Ratio::from_integer(0) => v,
                Valuation::Infinite => Ratio::from_integer(1),
                _ => return Err(Error::Domain("compose: inner constant term is a unit".into())),
            };
            let n = self.n_eff.min(inner.n_eff) as i64;
            let loss = (Ratio::from_integer(n) / vc).ceil().to_integer() as usize;
            if loss >= self.d {
                return Err(Error::Precision(format!(
                    "compose: cap {} cannot absorb a constant term of valuation {vc}",
                    self.d
                )));
            }
            d = d.min(self.d - loss);
        }
        Ok(self.compose_horner(inner, d))
    }

    /// Composition treating `self` as an exact polynomial of degree below its
    /// cap (no tail); `inner` may have any constant term of positive valuation
    /// or even a unit constant term.
    pub fn compose_poly(&self, inner: &Self) -> Self {
        self.check(inner);
        self.compose_horner(inner, inner.d)
    }

    fn compose_horner(&self, inner: &Self, d: usize) -> Self {
        let inner = inner.truncate(d);
        let top = match self.degree() {
            Some(t) => t,
            None => return Self::zero(&self.spec, d).with_n_eff(self.n_eff.min(inner.n_eff)),
        };
        let mut acc = Self::constant(&self.coeff(top), d);
        for k in (0..top).rev() {
            acc = acc.mul(&inner);
            let r = self.spec.rank();
            let md = &self.spec.0.md;
            for t in 0..r {
                acc.data[t] = md.add(acc.data[t], self.data[k * r + t]);
            }
        }
        acc.with_n_eff(self.n_eff.min(inner.n_eff))
    }

    /// Compositional inverse of a series `a_1 X + a_2 X^2 + ...` with `a_1` a
    /// unit, by Newton iteration.
    pub fn reverse(&self) -> Result<Self> {
        if !self.coeff(0).is_zero() {
            return Err(Error::Domain("reversion needs zero constant term".into()));
        }
        let a1 = self.coeff(1);
        let a1i = a1.inverse().map_err(|_| Error::Domain("reversion needs a unit linear term".into()))?;
        let d = self.d;
        let x = Self::x(&self.spec, d);
        let df = self.derive();
        let mut g = x.scale(&a1i);
        let mut good = 2usize;
        while good < d {
            let err = self.compose(&g)?.sub(&x);
            let dfg = df.compose(&g.truncate(d - 1))?.extend_exact(d);
            // err has zero constant term, so the unknown top coefficient of
            // the padded derivative never contributes.
            let corr = err.mul(&dfg.invert()?);
            g = g.sub(&corr);
            good *= 2;
        }
        Ok(g)
    }

    /// Evaluation at `x` (in this ring or an extension of it) treating the
    /// series as truncated: the value is exact modulo
    /// `p^min(N_eff, floor(D v(x)))`.
    pub fn eval(&self, x: &RingElem) -> Result<RingElem> {
        let v = match x.valuation() {
            Valuation::Infinite => None,
            Valuation::Finite(v) if v > Ratio::from_integer(0) => Some(v),
            Valuation::Finite(v) => {
                return Err(Error::Domain(format!("eval needs v(x) > 0, got {v}")))
            }
        };
        let val = self.eval_poly(x)?;
        let guaranteed = match v {
            None => self.n_eff,
            Some(v) => {
                let t = (Ratio::from_integer(self.d as i64) * v).floor().to_integer();
                (t.max(0) as u32).min(self.n_eff)
            }
        };
        Ok(val.with_prec(guaranteed))
    }

    /// Horner evaluation of the stored coefficients as an exact polynomial.
    pub fn eval_poly(&self, x: &RingElem) -> Result<RingElem> {
        let target = x.spec();
        let mut acc = target.zero();
        for k in (0..self.d).rev() {
            acc = acc.mul_ref(x);
            if !self.coeff_is_zero(k) {
                acc = acc.add_ref(&self.coeff(k).embed(target)?);
            }
        }
        Ok(acc.with_prec(self.n_eff.min(x.prec())))
    }

    /// Coefficientwise embedding into a larger ring.
    pub fn embed(&self, target: &RingSpec) -> Result<Self> {
        let cs: Result<Vec<RingElem>> = self.coeffs().iter().map(|c| c.embed(target)).collect();
        Ok(Self::from_coeffs(target, &cs?, self.d).with_n_eff(self.n_eff))
    }

    /// Coefficientwise descent to a sub-ring.
    pub fn descend(&self, target: &RingSpec) -> Result<Self> {
        let cs: Result<Vec<RingElem>> = self.coeffs().iter().map(|c| c.descend(target)).collect();
        Ok(Self::from_coeffs(target, &cs?, self.d).with_n_eff(self.n_eff))
    }

    /// Exact division of every coefficient by `p^s`.
    pub fn div_p_pow(&self, s: u32) -> Result<Self> {
        if s > self.n_eff {
            return Err(Error::Precision(format!("dividing by p^{s} at N_eff {}", self.n_eff)));
        }
        let ps = self.spec.p_pow(s);
        if let Some(i) = self.data.iter().position(|&c| c % ps != 0) {
            return Err(Error::NotDivisible(format!(
                "coefficient {} not divisible by p^{s}",
                i / self.spec.rank()
            )));
        }
        let data = self.data.iter().map(|&c| c / ps).collect();
        Ok(Self::from_raw(&self.spec, self.d, self.n_eff - s, data))
    }

    /// Smallest valuation among the coefficients (`Infinite` for zero).
    pub fn min_valuation(&self) -> Valuation {
        (0..self.d).map(|k| self.coeff(k).valuation()).min().unwrap_or(Valuation::Infinite)
    }

    /// Series whose coefficients are arbitrary residues, for tests and
    /// examples.
    pub fn random<R: rand::Rng>(spec: &RingSpec, d: usize, rng: &mut R) -> Self {
        let m = spec.modulus();
        let data = (0..d * spec.rank()).map(|_| rng.gen_range(0..m)).collect();
        Self::from_raw(spec, d, spec.prec(), data)
    }

    pub fn to_json(&self) -> SeriesJson {
        let r = self.spec.rank();
        SeriesJson {
            spec: self.spec.to_json(),
            d: self.d,
            n_eff: self.n_eff,
            coeffs: (0..self.d).map(|k| self.data[k * r..(k + 1) * r].to_vec()).collect(),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self> {
        let spec = RingSpec::from_json(&j.spec)?;
        if j.coeffs.len() > j.d || j.d == 0 {
            return Err(Error::Format("coefficient count exceeds D".into()));
        }
        let mut data = vec![0u128; j.d * spec.rank()];
        for (k, c) in j.coeffs.iter().enumerate() {
            if c.len() != spec.rank() || c.iter().any(|&x| x >= spec.modulus()) {
                return Err(Error::Format(format!("bad coefficient {k}")));
            }
            data[k * spec.rank()..(k + 1) * spec.rank()].copy_from_slice(c);
        }
        Ok(Self::from_raw(&spec, j.d, j.n_eff, data))
    }
}

/// Serialized series: `{"spec":…, "D":64, "N_eff":8, "coeffs":[[…],…]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub spec: RingSpecJson,
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "N_eff")]
    pub n_eff: u32,
    pub coeffs: Vec<Vec<u128>>,
}

impl Ring for TruncSeries {
    fn zero_like(&self) -> Self {
        Self::zero(&self.spec, self.d)
    }
    fn one_like(&self) -> Self {
        Self::one(&self.spec, self.d)
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
        self.is_zero()
    }
}
