use std::fmt;

use super::TruncSeries;
use crate::error::{Error, Result};
use crate::padic::modular::vp;
use crate::padic::{RingElem, RingSpec};

/// A series with bounded denominators: the value is `numer / p^pdenom`.
///
/// The value is known modulo `p^(numer.n_eff - pdenom)`; this can be
/// negative, in which case nothing is known.
#[derive(Clone)]
pub struct ScaledSeries {
    pub numer: TruncSeries,
    pub pdenom: u32,
}

impl fmt::Debug for ScaledSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / p^{}", self.numer, self.pdenom)
    }
}

impl PartialEq for ScaledSeries {
    /// Equality of values modulo the common known precision.
    fn eq(&self, o: &Self) -> bool {
        let s = self.pdenom.max(o.pdenom);
        let a = self.numer.scale_p_pow(s - self.pdenom);
        let b = o.numer.scale_p_pow(s - o.pdenom);
        a == b
    }
}

impl TruncSeries {
    /// Multiplies by `p^k`; precision grows by `k` up to the ring limit.
    pub(crate) fn scale_p_pow(&self, k: u32) -> TruncSeries {
        if k == 0 {
            return self.clone();
        }
        let spec = self.spec();
        if k >= spec.prec() {
            return TruncSeries::zero(spec, self.cap());
        }
        let pk = spec.p_pow(k);
        let md = &spec.0.md;
        let data = self.raw().iter().map(|&c| md.mul(c, pk)).collect();
        TruncSeries::from_raw(spec, self.cap(), (self.n_eff() + k).min(spec.prec()), data)
    }
}

impl ScaledSeries {
    pub fn integral(s: TruncSeries) -> Self {
        ScaledSeries { numer: s, pdenom: 0 }
    }

    pub fn spec(&self) -> &RingSpec {
        self.numer.spec()
    }

    pub fn cap(&self) -> usize {
        self.numer.cap()
    }

    /// Number of `p`-adic digits of the value that are known (may be
    /// negative).
    pub fn value_prec(&self) -> i64 {
        self.numer.n_eff() as i64 - self.pdenom as i64
    }

    /// Removes common factors of `p` between numerator and denominator.
    pub fn normalize(&self) -> Self {
        let mut out = self.clone();
        while out.pdenom > 0 && out.numer.n_eff() > 0 {
            match out.numer.div_p_pow(1) {
                Ok(q) => {
                    out.numer = q;
                    out.pdenom -= 1;
                }
                Err(_) => break,
            }
        }
        out
    }

    /// The value as an integral series, or the index of the first
    /// coefficient that is not integral.
    pub fn try_integral(&self) -> Result<TruncSeries> {
        let n = self.normalize();
        if n.pdenom == 0 {
            return Ok(n.numer);
        }
        let idx = (0..n.cap()).find(|&k| n.numer.coeff(k).content() == Some(0)).unwrap_or(0);
        Err(Error::Integrality {
            index: idx,
            detail: format!("coefficient carries p^-{} at known precision {}", n.pdenom, n.value_prec()),
        })
    }

    /// Coefficient `k` as `(numerator, p-exponent of the denominator)`.
    pub fn coeff(&self, k: usize) -> (RingElem, u32) {
        (self.numer.coeff(k), self.pdenom)
    }

    /// Coefficient `k` if it is integral at the known precision.
    pub fn integral_coeff(&self, k: usize) -> Result<RingElem> {
        let c = self.numer.coeff(k);
        if self.pdenom == 0 {
            return Ok(c);
        }
        c.div_p_pow(self.pdenom).map_err(|_| Error::Integrality {
            index: k,
            detail: format!("coefficient has a p^-{} denominator", self.pdenom),
        })
    }

    fn align(&self, o: &Self) -> (TruncSeries, TruncSeries, u32) {
        let s = self.pdenom.max(o.pdenom);
        (self.numer.scale_p_pow(s - self.pdenom), o.numer.scale_p_pow(s - o.pdenom), s)
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b, s) = self.align(o);
        ScaledSeries { numer: a.add(&b), pdenom: s }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (a, b, s) = self.align(o);
        ScaledSeries { numer: a.sub(&b), pdenom: s }
    }

    pub fn neg(&self) -> Self {
        ScaledSeries { numer: self.numer.neg(), pdenom: self.pdenom }
    }

    pub fn mul(&self, o: &Self) -> Self {
        ScaledSeries { numer: self.numer.mul(&o.numer), pdenom: self.pdenom + o.pdenom }
    }

    pub fn scale(&self, c: &RingElem) -> Self {
        ScaledSeries { numer: self.numer.scale(c), pdenom: self.pdenom }
    }

    /// Divides the value by `p^k`.
    pub fn div_p_pow(&self, k: u32) -> Self {
        ScaledSeries { numer: self.numer.clone(), pdenom: self.pdenom + k }
    }

    /// `self(inner)` for an integral inner series.
    pub fn compose_right(&self, inner: &TruncSeries) -> Result<Self> {
        Ok(ScaledSeries { numer: self.numer.compose(inner)?, pdenom: self.pdenom })
    }

    /// Formal derivative.
    pub fn derive(&self) -> Self {
        ScaledSeries { numer: self.numer.derive(), pdenom: self.pdenom }
    }

    /// Term-by-term antiderivative with zero constant term,
    /// `sum a_k X^(k+1) / (k+1)`; the cap grows by one.
    pub fn integrate(&self) -> Self {
        let spec = self.spec().clone();
        let d = self.cap() + 1;
        let p = spec.p();
        let s = (1..d).map(|k| vp(k as u128, p).unwrap_or(0)).max().unwrap_or(0);
        let md = &spec.0.md;
        let r = spec.rank();
        let mut data = vec![0u128; d * r];
        for k in 1..d {
            let v = vp(k as u128, p).unwrap_or(0);
            let unit = (k as u128) / spec.p_pow(v);
            let ui = md.inv(unit % spec.modulus()).expect("unit part of an integer");
            let factor = if s - v >= spec.prec() { 0 } else { md.mul(ui, spec.p_pow(s - v)) };
            let src = self.numer.raw_coeff(k - 1);
            for t in 0..r {
                data[k * r + t] = md.mul(src[t], factor);
            }
        }
        let numer = TruncSeries::from_raw(&spec, d, self.numer.n_eff(), data);
        ScaledSeries { numer, pdenom: self.pdenom + s }
    }

    pub fn truncate(&self, d: usize) -> Self {
        ScaledSeries { numer: self.numer.truncate(d), pdenom: self.pdenom }
    }

    /// Evaluation at `x`; the result is `(numerator value, p-exponent)`.
    pub fn eval(&self, x: &RingElem) -> Result<(RingElem, u32)> {
        Ok((self.numer.eval(x)?, self.pdenom))
    }
}

impl TruncSeries {
    /// Formal logarithm of a series with constant term 1, as the integral of
    /// `g'/g`.
    pub fn formal_log(&self) -> Result<ScaledSeries> {
        if !self.coeff(0).is_one() {
            return Err(Error::Domain("formal_log needs constant term 1".into()));
        }
        let lg = self.derive().mul(&self.truncate(self.cap() - 1).invert()?);
        Ok(ScaledSeries::integral(lg).integrate().truncate(self.cap()).normalize())
    }

    /// Formal exponential of a series with zero constant term. The result is
    /// returned as a scaled series; when the exponential is integral,
    /// [`ScaledSeries::try_integral`] recovers it.
    pub fn formal_exp(&self) -> Result<ScaledSeries> {
        ScaledSeries::integral(self.clone()).formal_exp()
    }
}

impl ScaledSeries {
    /// `exp` of a series with zero constant term whose derivative is
    /// integral (for instance a formal logarithm).
    pub fn formal_exp(&self) -> Result<ScaledSeries> {
        if !self.numer.coeff(0).is_zero() {
            return Err(Error::Domain("formal_exp needs zero constant term".into()));
        }
        let h = self.derive().try_integral().map_err(|_| {
            Error::Domain("formal_exp needs an integral derivative".into())
        })?;
        let e = super::HurwitzSeries::solve_linear(&h, self.cap());
        Ok(e.to_scaled())
    }
}
