use num_rational::Ratio;

use super::TruncSeries;
use crate::error::{Error, Result};
use crate::padic::Valuation;

/// Valuations of `prod_zeta f(zeta - 1)` over primitive `p^n`-th roots of
/// unity, and the `(mu, lambda)` they determine.
#[derive(Clone, Debug)]
pub struct RootsReport {
    /// `(n, phi(p^n), ord_p of the product)`.
    pub levels: Vec<(u32, u64, Ratio<i64>)>,
    pub mu: Ratio<i64>,
    pub lambda: Ratio<i64>,
    /// Smallest level from which every row satisfies
    /// `ord = mu * phi + lambda`.
    pub n0: u32,
}

fn phi(p: u64, n: u32) -> u64 {
    (p - 1) * p.pow(n - 1)
}

/// Computes `ord_p prod_{zeta primitive p^n-th} f(zeta - 1)` for each level
/// in `levels` and fits `mu * phi(p^n) + lambda` through the last two.
///
/// Each value `f(zeta - 1)` is computed in the ring with `zeta_{p^n}`
/// adjoined. In a field all conjugates share one valuation; otherwise the
/// norm to the quadratic subring is taken.
pub fn mu_lambda_by_roots(f: &TruncSeries, levels: std::ops::RangeInclusive<u32>) -> Result<RootsReport> {
    let spec = f.spec();
    let p = spec.p();
    let mut rows = Vec::new();
    for n in levels {
        if n == 0 {
            continue;
        }
        let c = spec.adjoin_zeta(n)?;
        let x = c.zeta()?.sub_ref(&c.one());
        let val = f.embed(&c)?.eval(&x)?;
        let ph = phi(p, n);
        let ord = if c.is_field_order() {
            match val.valuation() {
                Valuation::Finite(v) if v < Ratio::from_integer(val.prec() as i64) => {
                    v * Ratio::from_integer(ph as i64)
                }
                _ => {
                    return Err(Error::Precision(format!(
                        "f(zeta_{{p^{n}}} - 1) vanishes modulo p^{}",
                        val.prec()
                    )))
                }
            }
        } else {
            let nm = val.norm_to_quad()?;
            match nm.valuation() {
                Valuation::Finite(v) if v < Ratio::from_integer(nm.prec() as i64) => v,
                _ => {
                    return Err(Error::Precision(format!(
                        "norm of f(zeta_{{p^{n}}} - 1) vanishes modulo p^{}",
                        nm.prec()
                    )))
                }
            }
        };
        rows.push((n, ph, ord));
    }
    if rows.len() < 2 {
        return Err(Error::Domain("need at least two levels to separate mu and lambda".into()));
    }
    let (_, ph1, o1) = rows[rows.len() - 2];
    let (_, ph2, o2) = rows[rows.len() - 1];
    let mu = (o2 - o1) / Ratio::from_integer(ph2 as i64 - ph1 as i64);
    let lambda = o2 - mu * Ratio::from_integer(ph2 as i64);
    let fits = |&(_, ph, o): &(u32, u64, Ratio<i64>)| o == mu * Ratio::from_integer(ph as i64) + lambda;
    let mut n0 = rows[rows.len() - 2].0;
    for row in rows.iter().rev() {
        if fits(row) {
            n0 = row.0;
        } else {
            break;
        }
    }
    Ok(RootsReport { levels: rows, mu, lambda, n0 })
}
