use super::FormalGroup;
use crate::error::{Error, Result};
use crate::padic::{RingElem, Valuation};
use crate::series::{ScaledSeries, TruncSeries};

/// The multiplicative coordinate `Q = 1 + theta(X)` attached to a group and
/// a unit `Omega`, defined by `log(1 + theta(X)) = Omega^{-1} log_F(X)`.
///
/// Integrality of `theta` is checked, not assumed: when `theta` has a
/// denominator the conjugated Frobenius `f_Q` and its congruence are left
/// unset and the first offending coefficient is recorded.
#[derive(Clone, Debug)]
pub struct QCoordinate {
    pub omega: RingElem,
    /// `theta` as computed, possibly with `p` in denominators.
    pub theta_scaled: ScaledSeries,
    /// `theta` when integral at the achieved precision.
    pub theta: Option<TruncSeries>,
    /// First coefficient of `theta` that is not integral.
    pub first_nonintegral: Option<usize>,
    pub theta_inv: Option<TruncSeries>,
    /// `f_Q = theta o f o theta^{<-1>}` in the variable `T = Q - 1`.
    pub f_q: Option<TruncSeries>,
    /// Whether `f_Q(T) = T^q mod p` holds at the achieved precision.
    pub congruence: Option<bool>,
}

impl QCoordinate {
    /// Digits to which `f_Q` is known (0 when it was not formed).
    pub fn achieved_n_eff(&self) -> u32 {
        self.f_q.as_ref().map_or(0, |s| s.n_eff())
    }

    /// The congruence verdict, or an error when it could not be certified.
    pub fn certify(&self) -> Result<bool> {
        self.congruence.ok_or_else(|| match self.first_nonintegral {
            Some(k) => Error::Integrality { index: k, detail: "theta is not integral".into() },
            None => Error::Precision("f_Q is not known to one digit".into()),
        })
    }
}

/// Builds `theta = exp(Omega^{-1} log_F) - 1`, its inverse, `f_Q` and the
/// congruence `f_Q(T) = T^q mod p`.
pub fn q_coordinate(g: &FormalGroup, omega: &RingElem) -> Result<QCoordinate> {
    let oi = omega.inverse().map_err(|_| Error::Domain("Omega must be a unit".into()))?;
    let spec = g.spec();
    let d = g.cap();
    let scaled_log = g.log()?.scale(&oi);
    let e = scaled_log.formal_exp()?;
    let theta_scaled = e.sub(&ScaledSeries::integral(TruncSeries::one(spec, d))).normalize();
    let (theta, first_nonintegral) = match theta_scaled.try_integral() {
        Ok(t) => (Some(t), None),
        Err(Error::Integrality { index, .. }) => (None, Some(index)),
        Err(e) => return Err(e),
    };
    let mut out = QCoordinate {
        omega: omega.clone(),
        theta_scaled,
        theta: theta.clone(),
        first_nonintegral,
        theta_inv: None,
        f_q: None,
        congruence: None,
    };
    let Some(theta) = theta else { return Ok(out) };
    if theta.n_eff() == 0 {
        return Ok(out);
    }
    let inv = theta.reverse()?;
    let inner = g.f().truncate(d).compose_poly(&inv);
    let fq = theta.compose(&inner)?;
    if fq.n_eff() >= 1 {
        let q = g.q() as usize;
        let target = TruncSeries::monomial(&spec.one(), q, fq.cap());
        let diff = fq.sub(&target);
        let ok = (0..diff.cap()).all(|k| match diff.coeff(k).with_prec(1).valuation() {
            Valuation::Infinite => true,
            Valuation::Finite(v) => v >= num_rational::Ratio::from_integer(1),
        });
        out.congruence = Some(ok);
    }
    out.theta_inv = Some(inv);
    out.f_q = Some(fq);
    Ok(out)
}
