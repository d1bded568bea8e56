use num_rational::Ratio;

use super::{interpolate, CompatibleSystem};
use crate::error::{Error, Result};
use crate::lubin_tate::{coleman_norm, q_coordinate, FormalGroup, NormMethod, Variant};
use crate::measures::{GroupTag, Measure};
use crate::padic::{RingElem, Valuation};
use crate::series::{ScaledSeries, TruncSeries};

/// The Iwasawa logarithm of a unit as `(numer, k)` with value `numer / p^k`:
/// `log c = p^-k log((c / omega(c))^(p^k))`, with `k` the least exponent
/// putting the argument inside the convergence disc. `log omega(c) = 0`.
pub fn unit_log(c: &RingElem) -> Result<(RingElem, u32)> {
    let w = c.teichmuller()?;
    let mut u = c.mul_ref(&w.inverse()?);
    let one = c.spec().one();
    let bound = Ratio::new(1, c.spec().p() as i64 - 1);
    let mut k = 0u32;
    loop {
        match u.sub_ref(&one).valuation() {
            Valuation::Infinite => return Ok((c.spec().zero().with_prec(u.prec()), 0)),
            Valuation::Finite(v) if v > bound => break,
            _ => {}
        }
        u = u.pow(c.spec().p());
        k += 1;
        if k > 8 {
            return Err(Error::NoConvergence("unit log: 1-unit power does not enter the log disc".into()));
        }
    }
    Ok((u.padic_log()?, k))
}

/// `tilde-log g = log g - (1/q) sum_{w in F[f]} log g(X [+] w)`, with its
/// `X`-derivative certificate.
#[derive(Clone, Debug)]
pub struct TildeLog {
    /// The value, with `p` in denominators as computed.
    pub value: ScaledSeries,
    /// `partial (tilde-log g) = (lambda')^-1 d/dX (tilde-log g)`, where
    /// `lambda' dX` is the invariant differential.
    pub derivative: ScaledSeries,
    /// First coefficient of the value that is not integral.
    pub first_nonintegral: Option<usize>,
    /// First coefficient of the derivative that is not integral.
    pub derivative_first_nonintegral: Option<usize>,
}

impl TildeLog {
    pub fn is_integral(&self) -> bool {
        self.first_nonintegral.is_none()
    }
    pub fn derivative_integral(&self) -> bool {
        self.derivative_first_nonintegral.is_none()
    }

    /// The value as an integral series once both the derivative and the
    /// value pass; otherwise the offending coefficient.
    pub fn certify(&self) -> Result<TruncSeries> {
        if let Some(k) = self.derivative_first_nonintegral {
            return Err(Error::Integrality { index: k, detail: "partial(tilde-log g) is not integral".into() });
        }
        self.value.try_integral()
    }
}

fn first_bad(s: &ScaledSeries) -> Option<usize> {
    match s.try_integral() {
        Ok(_) => None,
        Err(Error::Integrality { index, .. }) => Some(index),
        Err(_) => Some(0),
    }
}

fn log_derivative_of(g: &TruncSeries) -> Result<TruncSeries> {
    let d = g.cap();
    Ok(g.derive().mul(&g.truncate(d - 1).invert()?))
}

/// Computes `tilde-log g` for a unit series `g` read as an exact polynomial
/// of degree below its cap.
///
/// The translate sum is `log((N_f g) o f)`, formed from the product of the
/// translates that the norm operator builds. For a fixed point this is the
/// `log(g^phi o f)` form. Constants are killed: `N_f c = c^q`.
pub fn tilde_log(grp: &FormalGroup, g: &TruncSeries) -> Result<TildeLog> {
    let d = g.cap();
    let c0 = g.coeff(0);
    if !c0.is_unit() {
        return Err(Error::Domain("tilde-log needs a unit series".into()));
    }
    let spec = g.spec();
    let r = crate::padic::modular::vp(grp.q() as u128, spec.p()).expect("q is a power of p");
    let prod = coleman_norm(grp, g, NormMethod::ConjugateProduct)?.product.truncate(d);
    let c1 = prod.coeff(0);

    let l1 = g.scale(&c0.inverse()?).formal_log()?;
    let l2 = prod.scale(&c1.inverse()?).formal_log()?;
    let (n0, k0) = unit_log(&c0)?;
    let (n1, k1) = unit_log(&c1)?;
    let k0c = ScaledSeries { numer: TruncSeries::constant(&n0, d), pdenom: k0 };
    let k1c = ScaledSeries { numer: TruncSeries::constant(&n1, d), pdenom: k1 + r };
    let value = l1.add(&k0c).sub(&l2.div_p_pow(r)).sub(&k1c).normalize();

    let dl1 = ScaledSeries::integral(log_derivative_of(g)?);
    let dl2 = ScaledSeries::integral(log_derivative_of(&prod)?).div_p_pow(r);
    if grp.cap() < d - 1 {
        return Err(Error::Cap(format!("the invariant differential is known to X^{}, need X^{}", grp.cap(), d - 1)));
    }
    let inv_diff = grp.log_derivative()?.truncate(d - 1).invert()?;
    let derivative = dl1.sub(&dl2).mul(&ScaledSeries::integral(inv_diff)).normalize();

    Ok(TildeLog {
        first_nonintegral: first_bad(&value),
        derivative_first_nonintegral: first_bad(&derivative),
        value,
        derivative,
    })
}

/// `mu^0(g)`: `tilde-log g` moved to the multiplicative coordinate
/// `T = Q - 1` and read as a measure on the units.
///
/// The multiplicative group already uses `T = X`. Otherwise the coordinate
/// change is `X = theta^{-1}(T)` for `Omega = 1`, which must be integral.
/// The result is tagged `OKpUnits` over a quadratic ring and `ZpUnits` over
/// `Z_p`; [`Measure::new`] then checks that it is fixed by `tilde`.
pub fn mu_zero(grp: &FormalGroup, g: &TruncSeries) -> Result<Measure> {
    let h = tilde_log(grp, g)?.certify()?;
    let spec = grp.spec();
    let h_t = match grp.variant() {
        Variant::Multiplicative => h,
        Variant::Default => {
            let qc = q_coordinate(grp, &spec.one())?;
            let inv = qc.theta_inv.ok_or_else(|| Error::Integrality {
                index: qc.first_nonintegral.unwrap_or(0),
                detail: "the coordinate change theta is not integral for Omega = 1".into(),
            })?;
            let cap = h.cap().min(inv.cap());
            h.truncate(cap).compose(&inv.truncate(cap))?
        }
    };
    let tag = if spec.has_quad() { GroupTag::OKpUnits } else { GroupTag::ZpUnits };
    Measure::new(h_t, tag)
}

/// `mu^0` of a compatible system: the Coleman series from [`interpolate`],
/// taken as an exact polynomial with cap `D` of the group, then [`mu_zero`].
pub fn mu_zero_pipeline(grp: &FormalGroup, sys: &CompatibleSystem) -> Result<Measure> {
    let it = interpolate(sys)?;
    let g = it.series.extend_exact(grp.cap().max(it.series.cap()));
    mu_zero(grp, &g)
}
