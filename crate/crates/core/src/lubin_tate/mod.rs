//! Lubin-Tate formal groups over `Z_p` and quadratic rings: group law,
//! endomorphisms, logarithm, the torsion tower, Coleman's norm operator,
//! the `omega` polynomials and the multiplicative coordinate `Q`.
//!
//! Series that are defined by commuting with the Frobenius polynomial
//! (`F`, `[a]_f`, `log_F`) are solved degree by degree from recursions whose
//! leading coefficient is `pi - pi^k`. Each step divides by `pi`, so the
//! results carry `N_eff = N - guard` with `guard = floor(log_q(D - 1)) + 2`
//! digits held back (see [`FormalGroup::guard`]).

mod bivariate;
mod norm;
mod omega;
mod qcoord;
mod tower;

pub use bivariate::BiSeries;
pub use norm::{coleman_norm, descend_composition, norm_product, torsion_translate, ColemanNorm, NormMethod};
pub use omega::{check_factorization, omega_polys, FactorizationCheck, OmegaPolys};
pub use qcoord::{q_coordinate, QCoordinate};
pub use tower::{Level, NormValue, TorsionTower};

use std::sync::OnceLock;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::padic::{RingElem, RingSpec, Valuation};
use crate::series::{HurwitzSeries, ScaledSeries, TruncSeries};

/// Which Frobenius polynomial defines the group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `f = pi X + X^q`.
    Default,
    /// `f = (1 + X)^p - 1` over `Z_p`, the multiplicative group.
    Multiplicative,
}

/// A Lubin-Tate formal group attached to `(pi, f)` with relative degree 1.
pub struct FormalGroup {
    spec: RingSpec,
    pi: RingElem,
    q: u64,
    cap: usize,
    variant: Variant,
    /// Coefficients of the polynomial `f`, lowest first.
    f_poly: Vec<RingElem>,
    f: TruncSeries,
    fpow: Vec<TruncSeries>,
    /// `(adj(pi), s, u^{-1})` with `pi * adj = p^s u`.
    pi_div: (RingElem, u32, RingElem),
    law: OnceLock<Result<BiSeries>>,
    log: OnceLock<Result<ScaledSeries>>,
    exp: OnceLock<Result<ScaledSeries>>,
}

impl std::fmt::Debug for FormalGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FormalGroup({:?}, pi={:?}, q={}, D={}, {:?})", self.spec, self.pi, self.q, self.cap, self.variant)
    }
}

/// Builds the formal group of `f = pi X + X^q` (or the multiplicative
/// group) with series caps `cap`.
pub fn build_group(spec: &RingSpec, pi: &RingElem, q: u64, cap: usize, variant: Variant) -> Result<FormalGroup> {
    FormalGroup::new(spec, pi, q, cap, variant)
}

/// The torsion tower `O'_1, ..., O'_depth` of `g`.
pub fn build_tower(g: &FormalGroup, depth: u32) -> Result<TorsionTower> {
    TorsionTower::new(g, depth)
}

impl FormalGroup {
    pub fn new(spec: &RingSpec, pi: &RingElem, q: u64, cap: usize, variant: Variant) -> Result<Self> {
        if pi.spec() != spec {
            return Err(Error::RingMismatch("pi must lie in the base ring".into()));
        }
        if spec.has_cyclotomic() {
            return Err(Error::InvalidRing("formal groups live over Z_p or a quadratic ring".into()));
        }
        let e = spec.ramification_index() as i64;
        if pi.valuation() != Valuation::Finite(Ratio::new(1, e)) {
            return Err(Error::Domain(format!("pi must be a uniformizer, v(pi) = {}", pi.valuation())));
        }
        if q != spec.residue_size() {
            return Err(Error::Domain(format!("q = {q} differs from the residue field size {}", spec.residue_size())));
        }
        if cap < 2 {
            return Err(Error::Cap("formal group caps must be at least 2".into()));
        }
        let f_poly: Vec<RingElem> = match variant {
            Variant::Default => {
                let mut c = vec![spec.zero(); q as usize + 1];
                c[1] = pi.clone();
                c[q as usize] = c[q as usize].add_ref(&spec.one());
                c
            }
            Variant::Multiplicative => {
                if spec.has_quad() || *pi != spec.from_int(spec.p() as i64) {
                    return Err(Error::Domain("the multiplicative group needs Z_p and pi = p".into()));
                }
                let p = spec.p() as usize;
                let mut c = vec![spec.zero(); p + 1];
                let mut b: i64 = 1;
                for (k, ck) in c.iter_mut().enumerate().skip(1) {
                    b = b * (p as i64 + 1 - k as i64) / k as i64;
                    *ck = spec.from_int(b);
                }
                c
            }
        };
        let f = TruncSeries::from_coeffs(spec, &f_poly, cap);
        let mut fpow = vec![TruncSeries::one(spec, cap)];
        for m in 1..cap {
            let next = fpow[m - 1].mul(&f);
            fpow.push(next);
        }
        // pi in Z_p divides directly; otherwise through its norm
        let rational = pi.coords()[1..].iter().all(|&c| c == 0);
        let (adj, nrm) = if rational { (spec.one(), pi.clone()) } else { pi.adjugate_norm() };
        let n0 = nrm.descend(&RingSpec::zp(spec.p(), spec.prec())?)?;
        let s = crate::padic::modular::vp(n0.coords()[0], spec.p())
            .ok_or_else(|| Error::Precision("norm of pi vanishes".into()))?;
        let u = spec.from_u128(n0.coords()[0] / spec.p_pow(s));
        let pi_div = (adj, s, u.inverse()?);
        Ok(FormalGroup {
            spec: spec.clone(),
            pi: pi.clone(),
            q,
            cap,
            variant,
            f_poly,
            f,
            fpow,
            pi_div,
            law: OnceLock::new(),
            log: OnceLock::new(),
            exp: OnceLock::new(),
        })
    }

    /// The default group over `spec` with its own uniformizer and residue
    /// size.
    pub fn default_for(spec: &RingSpec, cap: usize) -> Result<Self> {
        Self::new(spec, &spec.uniformizer(), spec.residue_size(), cap, Variant::Default)
    }

    /// The multiplicative group over `Z_p`.
    pub fn multiplicative(spec: &RingSpec, cap: usize) -> Result<Self> {
        Self::new(spec, &spec.from_int(spec.p() as i64), spec.p(), cap, Variant::Multiplicative)
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }
    pub fn pi(&self) -> &RingElem {
        &self.pi
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn cap(&self) -> usize {
        self.cap
    }
    pub fn variant(&self) -> Variant {
        self.variant
    }
    /// The Frobenius polynomial `f` (exact, degree `q`).
    pub fn f(&self) -> &TruncSeries {
        &self.f
    }
    pub fn f_poly(&self) -> &[RingElem] {
        &self.f_poly
    }

    /// Digits held back for the divisions by `pi` in the degree recursions.
    pub fn guard(&self) -> u32 {
        let mut g = 0u32;
        let mut t = 1u64;
        while t.saturating_mul(self.q) <= (self.cap as u64).saturating_sub(1) {
            t *= self.q;
            g += 1;
        }
        g + 2
    }

    /// `N_eff` of the recursively solved series.
    pub fn n_eff(&self) -> u32 {
        self.spec.prec().saturating_sub(self.guard())
    }

    /// `x / pi` keeping nominal precision; `x` must be divisible.
    pub(crate) fn div_pi(&self, x: &RingElem) -> Result<RingElem> {
        let (adj, s, ui) = &self.pi_div;
        Ok(x.mul_ref(adj).div_p_pow_raw(*s)?.mul_ref(ui).assume_prec(self.spec.prec()))
    }

    /// Valuation gained per degree when reducing modulo the monic `f` from
    /// the top: `min_{j<q} v(f_j) / (q - j)`.
    pub(crate) fn division_rate(&self) -> Ratio<i64> {
        let q = self.f_poly.len() - 1;
        self.f_poly[..q]
            .iter()
            .enumerate()
            .filter_map(|(j, c)| c.valuation().finite().map(|v| v / Ratio::from_integer((q - j) as i64)))
            .min()
            .unwrap_or(Ratio::from_integer(1))
    }

    /// `x / (pi - pi^k)` keeping nominal precision; `x` must be divisible.
    fn div_step(&self, x: &RingElem, k: usize) -> Result<RingElem> {
        let (adj, s, ui) = &self.pi_div;
        let y = x.mul_ref(adj).div_p_pow_raw(*s)?.mul_ref(ui);
        let unit = self.spec.one().sub_ref(&self.pi.pow(k as u64 - 1));
        Ok(y.mul_ref(&unit.inverse()?).assume_prec(self.spec.prec()))
    }

    /// `f^{o m}`, the endomorphism `[pi^m]_f` (exact polynomial, truncated
    /// at `cap`).
    pub fn pi_power(&self, m: u32, cap: usize) -> TruncSeries {
        let f = self.f.extend_exact(cap.max(self.cap)).truncate(cap);
        let mut g = TruncSeries::x(&self.spec, cap);
        for _ in 0..m {
            g = f.compose_poly(&g);
        }
        g
    }

    /// The endomorphism `[a]_f`, the unique series with linear term `a`
    /// commuting with `f`.
    pub fn endomorphism(&self, a: &RingElem) -> Result<TruncSeries> {
        self.endomorphism_to(a, self.cap)
    }

    /// `[a]_f` with a custom cap (up to the group cap).
    pub fn endomorphism_to(&self, a: &RingElem, cap: usize) -> Result<TruncSeries> {
        let d = cap.min(self.cap);
        let spec = &self.spec;
        let degf = self.f_poly.len() - 1;
        let mut e = vec![spec.zero(); d];
        if d > 1 {
            e[1] = a.with_prec(spec.prec()).assume_prec(spec.prec());
        }
        // pw[j][k] = [E^j]_k for j >= 2
        let mut pw = vec![vec![spec.zero(); d]; degf + 1];
        for k in 2..d {
            for j in 2..=degf {
                let mut acc = spec.zero();
                for m in 1..=(k + 1).saturating_sub(j) {
                    let prev = if j == 2 { &e[k - m] } else { &pw[j - 1][k - m] };
                    if !e[m].is_zero() && !prev.is_zero() {
                        acc = acc.add_ref(&e[m].mul_ref(prev));
                    }
                }
                pw[j][k] = acc;
            }
            let mut rhs = spec.zero();
            for m in 1..k {
                let c = self.fpow[m].coeff(k);
                if !e[m].is_zero() && !c.is_zero() {
                    rhs = rhs.add_ref(&e[m].mul_ref(&c));
                }
            }
            for j in 2..=degf {
                if !self.f_poly[j].is_zero() {
                    rhs = rhs.sub_ref(&self.f_poly[j].mul_ref(&pw[j][k]));
                }
            }
            e[k] = self.div_step(&rhs, k)?;
        }
        Ok(TruncSeries::from_coeffs(spec, &e, d).with_n_eff(self.n_eff()))
    }

    /// The group law `F(X, Y)`.
    pub fn law(&self) -> Result<&BiSeries> {
        self.law
            .get_or_init(|| bivariate::solve_law(self))
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// `F(a(X), b(X))` for series without constant terms.
    pub fn add_series(&self, a: &TruncSeries, b: &TruncSeries) -> Result<TruncSeries> {
        self.law()?.eval(a, b)
    }

    /// `log_F'(X) = 1 / dF/dY(X, 0)`, an integral unit series.
    pub fn log_derivative(&self) -> Result<TruncSeries> {
        self.law()?.d2_at_zero().invert()
    }

    /// The logarithm, solved from `log_F(f(X)) = pi log_F(X)`.
    pub fn log(&self) -> Result<&ScaledSeries> {
        self.log.get_or_init(|| self.solve_log()).as_ref().map_err(|e| e.clone())
    }

    fn solve_log(&self) -> Result<ScaledSeries> {
        let spec = &self.spec;
        let d = self.cap;
        let s = self.guard() - 1;
        if s >= spec.prec() {
            return Err(Error::Precision("logarithm denominators exceed the precision".into()));
        }
        let mut l = vec![spec.zero(); d];
        l[1] = spec.from_u128(spec.p_pow(s));
        for k in 2..d {
            let mut rhs = spec.zero();
            for m in 1..k {
                let c = self.fpow[m].coeff(k);
                if !l[m].is_zero() && !c.is_zero() {
                    rhs = rhs.add_ref(&l[m].mul_ref(&c));
                }
            }
            l[k] = self.div_step(&rhs, k).map_err(|_| {
                Error::Integrality { index: k, detail: "logarithm denominator exceeds the scaling".into() }
            })?;
        }
        let numer = TruncSeries::from_coeffs(spec, &l, d).with_n_eff(self.n_eff());
        Ok(ScaledSeries { numer, pdenom: s }.normalize())
    }

    /// The exponential, the compositional inverse of `log_F`, from
    /// `E' = dF/dY(E, 0)`.
    pub fn exp(&self) -> Result<&ScaledSeries> {
        self.exp
            .get_or_init(|| {
                let u = self.law()?.d2_at_zero();
                let one = TruncSeries::one(&self.spec, self.cap);
                Ok(HurwitzSeries::solve_autonomous(&one, &u, self.cap).to_scaled())
            })
            .as_ref()
            .map_err(|e| e.clone())
    }
}

#[cfg(test)]
mod tests;
