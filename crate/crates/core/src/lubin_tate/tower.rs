use std::sync::Arc;

use num_rational::Ratio;

use super::FormalGroup;
use crate::error::{Error, Result};
use crate::padic::{RingElem, RingSpec};
use crate::quotient::{QuotElem, QuotRing};
use crate::series::TruncSeries;

/// `O'_m = O[X]/(pibar_m(X))` with designated generator `alpha_m`, the class
/// of `X`.
#[derive(Clone, Debug)]
pub struct Level {
    m: u32,
    /// Monic `pibar_m`, lowest coefficient first.
    pibar: Vec<RingElem>,
    ring: Arc<QuotRing<RingElem>>,
    /// `v(alpha_m)` with `v(p) = 1`.
    v_alpha: Ratio<i64>,
}

impl Level {
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn degree(&self) -> usize {
        self.pibar.len() - 1
    }
    pub fn pibar(&self) -> &[RingElem] {
        &self.pibar
    }
    pub fn ring(&self) -> &Arc<QuotRing<RingElem>> {
        &self.ring
    }
    pub fn v_alpha(&self) -> Ratio<i64> {
        self.v_alpha
    }
    pub fn alpha(&self) -> QuotElem<RingElem> {
        QuotElem::gen(&self.ring)
    }
    pub fn elem(&self, coords: Vec<RingElem>) -> QuotElem<RingElem> {
        QuotElem::from_coeffs(&self.ring, coords)
    }
    pub fn from_base(&self, x: &RingElem) -> QuotElem<RingElem> {
        QuotElem::from_base(&self.ring, x.clone())
    }

    /// `g(alpha_m)` for `g` read as an exact polynomial.
    pub fn eval_poly(&self, g: &TruncSeries) -> QuotElem<RingElem> {
        self.alpha().eval_poly(&g.coeffs())
    }

    /// `g(alpha_m)` for a truncated series: exact modulo
    /// `p^min(N_eff, floor(D v(alpha_m)))`, since the basis `1, alpha_m, ...`
    /// is integral and `v` takes distinct values on its terms.
    pub fn eval_series(&self, g: &TruncSeries) -> QuotElem<RingElem> {
        let t = (Ratio::from_integer(g.cap() as i64) * self.v_alpha).floor().to_integer();
        let k = (t.max(0) as u32).min(g.n_eff());
        self.eval_poly(g).with_prec(k)
    }
}

/// The torsion tower `O'_1, ..., O'_M` of a formal group, with inclusions
/// `O'_{m-1} -> O'_m` given by `X -> f(X)`.
#[derive(Clone, Debug)]
pub struct TorsionTower {
    spec: RingSpec,
    q: u64,
    f_poly: Vec<RingElem>,
    levels: Vec<Level>,
}

impl TorsionTower {
    /// Builds levels `1..=depth`. `pibar_1 = f(X)/X` and
    /// `pibar_m = pibar_{m-1}(f(X))`, both exact monic polynomials whose
    /// non-leading coefficients lie in the maximal ideal.
    pub fn new(g: &FormalGroup, depth: u32) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Domain("tower depth must be at least 1".into()));
        }
        let q = g.q();
        let top = (q - 1).saturating_mul(q.checked_pow(depth - 1).unwrap_or(u64::MAX));
        let budget = (depth as u64).saturating_mul(top);
        if budget > g.cap() as u64 {
            return Err(Error::Cap(format!("tower depth {depth} needs M (q-1) q^(M-1) = {budget} within the cap {}", g.cap())));
        }
        Ok(Self::build(g, depth))
    }

    pub(crate) fn build(g: &FormalGroup, depth: u32) -> Self {
        let spec = g.spec().clone();
        let e = spec.ramification_index() as i64;
        let f_poly = g.f_poly().to_vec();
        let mut levels: Vec<Level> = Vec::new();
        let mut pibar = f_poly[1..].to_vec();
        for m in 1..=depth {
            if m > 1 {
                pibar = poly_compose(&pibar, &f_poly);
            }
            debug_assert!(pibar.last().is_some_and(|c| c.is_one()), "f is monic");
            let deg = (pibar.len() - 1) as i64;
            let ring = QuotRing::new(pibar[..pibar.len() - 1].to_vec());
            levels.push(Level { m, pibar: pibar.clone(), ring, v_alpha: Ratio::new(1, e * deg) });
        }
        TorsionTower { spec, q: g.q(), f_poly, levels }
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }
    /// Level `m` (1-based).
    pub fn level(&self, m: u32) -> &Level {
        &self.levels[m as usize - 1]
    }
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// `f(alpha_m)` in `O'_m`, the image of `alpha_{m-1}`.
    pub fn f_of_alpha(&self, m: u32) -> QuotElem<RingElem> {
        self.level(m).alpha().eval_poly(&self.f_poly)
    }

    /// The inclusion `O'_{m-1} -> O'_m`, `alpha_{m-1} -> f(alpha_m)`.
    pub fn include(&self, m: u32, x: &QuotElem<RingElem>) -> QuotElem<RingElem> {
        x.substitute(&self.f_of_alpha(m))
    }

    /// Checks `pibar_{m-1}(f(alpha_m)) = 0` in `O'_m`, so that the inclusion
    /// is well defined and sends `alpha_{m-1}` to `f(alpha_m)`.
    pub fn check_inclusion(&self, m: u32) -> bool {
        if m < 2 {
            return true;
        }
        self.f_of_alpha(m).eval_poly(self.level(m - 1).pibar()).coeffs().iter().all(|c| c.is_zero())
    }

    /// The norm `O'_m -> O'_{m-1}` (to the base ring `O` for `m = 1`, returned
    /// as a constant of level 1's base), computed as a `q x q` determinant in
    /// `O'_{m-1}[Y]/(f(Y) - alpha_{m-1})`.
    pub fn norm_down(&self, m: u32, x: &QuotElem<RingElem>) -> Result<NormValue> {
        if m == 1 {
            return Ok(NormValue::Base(x.norm()));
        }
        let lower = self.level(m - 1);
        let alpha = lower.alpha();
        let mut modulus: Vec<QuotElem<RingElem>> = self.f_poly[..self.f_poly.len() - 1].iter().map(|c| lower.from_base(c)).collect();
        modulus[0] = modulus[0].sub(&alpha);
        let rel = QuotRing::new(modulus);
        let coeffs: Vec<QuotElem<RingElem>> = x.coeffs().iter().map(|c| lower.from_base(c)).collect();
        let y = QuotElem::from_coeffs(&rel, coeffs);
        Ok(NormValue::Level(y.norm()))
    }
}

/// Result of [`TorsionTower::norm_down`].
#[derive(Clone, Debug, PartialEq)]
pub enum NormValue {
    Base(RingElem),
    Level(QuotElem<RingElem>),
}

impl NormValue {
    pub fn as_level(&self) -> Option<&QuotElem<RingElem>> {
        match self {
            NormValue::Level(x) => Some(x),
            NormValue::Base(_) => None,
        }
    }
    pub fn as_base(&self) -> Option<&RingElem> {
        match self {
            NormValue::Base(x) => Some(x),
            NormValue::Level(_) => None,
        }
    }
}

/// `a(b(X))` for exact polynomials.
pub(crate) fn poly_compose(a: &[RingElem], b: &[RingElem]) -> Vec<RingElem> {
    let zero = b[0].spec().zero();
    let mut acc = vec![zero.clone()];
    for c in a.iter().rev() {
        acc = poly_mul(&acc, b);
        acc[0] = acc[0].add_ref(c);
    }
    while acc.len() > 1 && acc.last().is_some_and(|c| c.is_zero()) {
        acc.pop();
    }
    acc
}

/// Product of exact polynomials.
pub(crate) fn poly_mul(a: &[RingElem], b: &[RingElem]) -> Vec<RingElem> {
    crate::quotient::gseries::mul(a, b, a.len() + b.len() - 1)
}
