use super::tower::{poly_compose, poly_mul};
use super::FormalGroup;
use crate::error::{Error, Result};
use crate::padic::RingElem;
use crate::series::TruncSeries;

/// The distinguished factors `pibar_m` of `[pi^m]_f / [pi^{m-1}]_f` for
/// `m <= n` and the products `omega_n^+ = X prod_{m even} pibar_m`,
/// `omega_n^- = X prod_{m odd} pibar_m`, `omega~_n^{+-} = omega_n^{+-} / X`.
/// All are exact polynomials, lowest coefficient first.
#[derive(Clone, Debug)]
pub struct OmegaPolys {
    pub n: u32,
    /// `pibar[m - 1] = pibar_m`.
    pub pibar: Vec<Vec<RingElem>>,
    pub plus: Vec<RingElem>,
    pub minus: Vec<RingElem>,
    pub plus_tilde: Vec<RingElem>,
    pub minus_tilde: Vec<RingElem>,
}

/// Builds the `omega` family. For `f = pi X + X^q` (and the multiplicative
/// `f`) the ratio `[pi^m] / [pi^{m-1}] = (f / X) o f^{o(m-1)}` is already a
/// distinguished polynomial, so `pibar_m = pibar_1 o f^{o(m-1)}` exactly.
pub fn omega_polys(g: &FormalGroup, n: u32) -> Result<OmegaPolys> {
    let spec = g.spec();
    let f = g.f_poly();
    let x = vec![spec.zero(), spec.one()];
    let mut pibar: Vec<Vec<RingElem>> = Vec::new();
    let mut plus_tilde = vec![spec.one()];
    let mut minus_tilde = vec![spec.one()];
    let mut cur = f[1..].to_vec();
    for m in 1..=n {
        if m > 1 {
            cur = poly_compose(&cur, f);
        }
        if !is_distinguished(&cur) {
            return Err(Error::Domain(format!("pibar_{m} is not distinguished")));
        }
        if m % 2 == 0 {
            plus_tilde = poly_mul(&plus_tilde, &cur);
        } else {
            minus_tilde = poly_mul(&minus_tilde, &cur);
        }
        pibar.push(cur.clone());
    }
    Ok(OmegaPolys {
        n,
        pibar,
        plus: poly_mul(&x, &plus_tilde),
        minus: poly_mul(&x, &minus_tilde),
        plus_tilde,
        minus_tilde,
    })
}

fn is_distinguished(p: &[RingElem]) -> bool {
    let (lead, rest) = p.split_last().expect("nonempty");
    lead.is_one() && rest.iter().all(|c| !c.is_unit())
}

impl OmegaPolys {
    /// A polynomial as a series with cap `d`; fails if its degree reaches
    /// the cap.
    pub fn series(poly: &[RingElem], d: usize) -> Result<TruncSeries> {
        if poly.len() > d {
            return Err(Error::Cap(format!("degree {} polynomial needs a cap above {d}", poly.len() - 1)));
        }
        Ok(TruncSeries::from_coeffs(poly[0].spec(), poly, d))
    }

    /// `omega_n^+ omega~_n^-` (which also equals `omega~_n^+ omega_n^-`).
    pub fn product(&self) -> Vec<RingElem> {
        poly_mul(&self.plus, &self.minus_tilde)
    }
}

/// Outcome of comparing `omega_{2n}^+ omega~_{2n}^-` with `[a]_f` up to a
/// unit series.
#[derive(Clone, Debug, serde::Serialize)]
pub struct FactorizationCheck {
    pub n: u32,
    /// Degree of `omega_{2n}^+ omega~_{2n}^-`.
    pub degree: usize,
    pub cap: usize,
    /// Digits to which the comparison was made.
    pub digits: u32,
    /// `omega_{2n}^+ omega~_{2n}^- = omega~_{2n}^+ omega_{2n}^-`.
    pub cross_products_agree: bool,
    /// The product equals `[pi^{2n}]_f = f^{o 2n}` exactly.
    pub equals_pi_power: bool,
    /// Index of the first unit coefficient of `[a]_f` (its Weierstrass degree).
    pub endo_lambda: Option<usize>,
    /// `product * U = [a]_f` modulo `(p^digits, X^cap)` for the explicit unit
    /// `U = V(product)`, where `[u]_f(Y) = Y V(Y)` and `a = u pi^{2n}`.
    pub unit_match: bool,
    /// All of the above hold.
    pub matches: bool,
}

/// Checks `omega_{2n}^+ omega~_{2n}^- = omega~_{2n}^+ omega_{2n}^- = unit * [a]_f`
/// modulo `(p^digits, X^cap)`.
///
/// Both sides vanish exactly on the `pi^{2n}`-torsion only when `a` has
/// valuation `2n v(pi)`; the Weierstrass degree of `[a]_f` is compared first.
/// When it agrees, `a = u pi^{2n}` and `[a]_f = [u]_f o f^{o 2n}`, which gives
/// the unit explicitly.
pub fn check_factorization(g: &FormalGroup, n: u32, a: &RingElem, cap: usize, digits: u32) -> Result<FactorizationCheck> {
    let spec = g.spec();
    let om = omega_polys(g, 2 * n)?;
    let prod = om.product();
    let cross = prod == poly_mul(&om.plus_tilde, &om.minus);
    let degree = prod.len() - 1;
    if degree >= cap {
        return Err(Error::Cap(format!("product has degree {degree}, cap is {cap}")));
    }
    let pp = g.pi_power(2 * n, degree + 1);
    let equals_pi_power = pp.coeffs() == prod;
    let endo = g.endomorphism_to(a, cap)?;
    if endo.n_eff() < digits {
        return Err(Error::Precision(format!("[a]_f known to {} digits, {digits} requested", endo.n_eff())));
    }
    let endo = endo.with_n_eff(digits);
    let endo_lambda = (0..cap).find(|&k| endo.coeff(k).is_unit());
    let mut unit_match = false;
    if endo_lambda == Some(degree) {
        // a = u pi^{2n}
        let mut u = a.clone();
        for _ in 0..2 * n {
            u = u.div_exact(g.pi())?;
        }
        let eu = g.endomorphism_to(&u, cap)?;
        let v = eu.shift_down(1)?.extend_exact(cap);
        let p_series = TruncSeries::from_coeffs(spec, &prod, cap);
        let unit = v.compose(&p_series)?;
        unit_match = p_series.mul(&unit).with_n_eff(digits) == endo;
    }
    Ok(FactorizationCheck {
        n,
        degree,
        cap,
        digits,
        cross_products_agree: cross,
        equals_pi_power,
        endo_lambda,
        unit_match,
        matches: cross && equals_pi_power && unit_match,
    })
}
