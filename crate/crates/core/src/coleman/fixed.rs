use crate::error::{Error, Result};
use crate::lubin_tate::{coleman_norm, FormalGroup, NormMethod};
use crate::padic::Valuation;
use crate::series::TruncSeries;

/// A series with `N_f g = g` modulo `(p^digits, X^D)`.
#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub series: TruncSeries,
    pub iterations: usize,
    /// Valuation of `N_f g_k - g_k` at each step: the convergence rate.
    pub history: Vec<Valuation>,
    pub digits: u32,
}

/// Iterates `g -> N_f g` from a unit seed until `N_f g = g` modulo
/// `(p^digits, X^D)`.
///
/// `N_f g = g mod P` for every unit `g`, and `g = g' mod P^k` gives
/// `N_f g = N_f g' mod P^(k+1)`, so the iterates converge `P`-adically at
/// one step of the maximal ideal per round. Each iterate is taken as an exact
/// polynomial of degree below `D`: the convergence is checked on computed
/// values, never inferred from precision bookkeeping.
pub fn norm_fixed_point(g: &FormalGroup, seed: &TruncSeries, digits: u32, max_iter: usize) -> Result<FixedPoint> {
    if !seed.coeff(0).is_unit() {
        return Err(Error::Domain("the seed must be a unit series".into()));
    }
    let target = Valuation::int(digits as i64);
    let mut cur = seed.clone();
    let mut history = Vec::new();
    for it in 1..=max_iter {
        let next = coleman_norm(g, &cur, NormMethod::ConjugateProduct)?.norm;
        if next.n_eff() < digits {
            return Err(Error::Precision(format!(
                "N_f g is known to {} digits, {digits} requested",
                next.n_eff()
            )));
        }
        let diff = next.sub(&cur.truncate(next.cap())).with_n_eff(digits);
        let v = diff.min_valuation();
        history.push(v);
        if v >= target {
            return Ok(FixedPoint { series: next, iterations: it, history, digits });
        }
        cur = next.assume_n_eff(g.spec().prec());
    }
    Err(Error::NoConvergence(format!(
        "N_f iteration did not stabilize mod p^{digits} within {max_iter} rounds (last defect {:?})",
        history.last()
    )))
}
