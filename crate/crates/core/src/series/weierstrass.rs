use num_rational::Ratio;

use super::TruncSeries;
use crate::error::{Error, Result};
use crate::padic::{RingElem, Valuation};

/// `f = p^mu * P * U` with `P` distinguished of degree `lambda` and `U` a
/// unit series.
///
/// `mu` is measured with `v(p) = 1`, so it is a half-integer in ramified
/// rings.
#[derive(Clone, Debug)]
pub struct WeierstrassData {
    pub mu: Ratio<i64>,
    pub lambda: usize,
    /// Coefficients of `P`, lowest first; the last one is 1.
    pub distinguished: Vec<RingElem>,
    pub unit: TruncSeries,
    /// Digits to which `P` and `U` are known.
    pub n_eff: u32,
}

impl WeierstrassData {
    /// The distinguished polynomial as a series with the given cap.
    pub fn distinguished_series(&self, d: usize) -> TruncSeries {
        TruncSeries::from_coeffs(self.unit.spec(), &self.distinguished, d).with_n_eff(self.n_eff)
    }

    /// `p^mu * P * U`, for comparing against the input.
    pub fn reconstruct(&self) -> TruncSeries {
        let d = self.unit.cap();
        let spec = self.unit.spec();
        let pu = self.distinguished_series(d).mul(&self.unit);
        let e = spec.ramification_index() as i64;
        let k = (self.mu * e).to_integer() as u64;
        pu.scale(&spec.uniformizer().pow(k))
    }
}

/// Divides every coefficient by the `k`-th power of the uniformizer.
fn div_uniformizer_pow(f: &TruncSeries, k: u32) -> Result<TruncSeries> {
    let spec = f.spec();
    if !spec.is_ramified_quad() {
        return f.div_p_pow(k);
    }
    // pi^2 = p * unit when the trace vanishes; otherwise divide one step at
    // a time
    let mut cs = f.coeffs();
    for _ in 0..k {
        for c in cs.iter_mut() {
            *c = c.div_uniformizer()?;
        }
    }
    let n = cs.iter().map(|c| c.prec()).min().unwrap_or(f.n_eff());
    Ok(TruncSeries::from_coeffs(spec, &cs, f.cap()).with_n_eff(n))
}

/// Weierstrass preparation of a nonzero series over `Z_p` or a quadratic
/// ring of integers.
///
/// The input is read as a polynomial of degree below its cap. The
/// distinguished part comes from the fixed-point iteration
/// `R = A / U mod X^lambda`, `U = B - (R U) div X^lambda`, where `A` and
/// `X^lambda B` are the low and high parts of `f / p^mu`.
pub fn weierstrass_prep(f: &TruncSeries) -> Result<WeierstrassData> {
    let spec = f.spec().clone();
    let mu = match f.min_valuation() {
        Valuation::Infinite => {
            return Err(Error::Precision("all coefficients vanish at this precision".into()))
        }
        Valuation::Finite(v) => v,
    };
    let e = spec.ramification_index() as i64;
    let emu = (mu * e).to_integer();
    if Ratio::from_integer(emu) != mu * e {
        return Err(Error::Domain(format!("valuation {mu} is not a multiple of 1/{e}")));
    }
    let g = div_uniformizer_pow(f, emu as u32)?;
    let n = g.n_eff();
    let d = g.cap();
    let lambda = (0..d)
        .find(|&k| g.coeff(k).is_unit())
        .ok_or_else(|| Error::Cap(format!("lambda exceeds degree cap {d}")))?;

    let iters = e as usize * n as usize + 1;
    let w = d + lambda * (iters + 1);
    let gw = g.extend_exact(w);
    let a = gw.truncate(lambda.max(1));
    let a = if lambda == 0 { TruncSeries::zero(&spec, 1) } else { a };
    let b = gw.shift_down(lambda)?;

    let mut u = b.clone();
    let mut r = TruncSeries::zero(&spec, lambda.max(1));
    if lambda > 0 {
        for _ in 0..iters {
            r = a.mul(&u.truncate(lambda).invert()?);
            let ru = r.extend_exact(u.cap()).mul(&u);
            let high = ru.shift_down(lambda)?;
            u = b.truncate(high.cap()).sub(&high);
        }
    }
    let unit = u.truncate(d).with_n_eff(n);
    let mut distinguished: Vec<RingElem> = (0..lambda).map(|k| r.coeff(k).with_prec(n)).collect();
    distinguished.push(spec.one());
    Ok(WeierstrassData { mu, lambda, distinguished, unit, n_eff: n })
}
