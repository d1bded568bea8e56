use num_rational::Ratio;

use super::elem::{RingElem, Valuation};
use super::modular::vp_u64;
use super::spec::RingSpec;
use crate::error::{Error, Result};

impl RingElem {
    /// The Teichmüller representative: the unique `(q-1)`-th root of unity
    /// congruent to `self` modulo the maximal ideal.
    pub fn teichmuller(&self) -> Result<RingElem> {
        if !self.is_unit() {
            return Err(Error::Domain(format!("teichmuller of non-unit {self:?}")));
        }
        let q = self.spec.residue_size();
        let limit = self.spec.prec() * self.spec.ramification_index() + 8;
        let mut t = self.clone();
        for _ in 0..limit {
            let next = t.pow(q);
            if next == t {
                return Ok(t);
            }
            t = next;
        }
        Err(Error::NoConvergence("teichmuller iteration".into()))
    }

    /// The Frobenius automorphism of an unramified quadratic ring.
    pub fn frobenius(&self) -> Result<RingElem> {
        if !self.spec.is_unramified_quad() || self.spec.has_cyclotomic() {
            return Err(Error::Domain("frobenius needs an unramified quadratic ring".into()));
        }
        Ok(super::elem::Automorphism { conj: true, a: 1 }.apply(self))
    }

    /// Product of all conjugates over `Z_p` (lands in the `Z_p` coordinate).
    pub fn norm_to_base(&self) -> RingElem {
        self.adjugate_norm().1
    }

    /// Sum of all conjugates over `Z_p`.
    pub fn trace_to_base(&self) -> RingElem {
        let mut acc = self.spec.zero();
        for a in self.spec.automorphisms() {
            acc = acc.add_ref(&a.apply(self));
        }
        acc
    }

    /// Product over the cyclotomic conjugates only: the norm from a
    /// cyclotomic or composite ring down to its quadratic part (or `Z_p`).
    pub fn norm_to_quad(&self) -> Result<RingElem> {
        let mut acc = self.spec.one();
        for a in self.spec.cyclotomic_automorphisms() {
            acc = acc.mul_ref(&a.apply(self));
        }
        acc.descend(&self.spec.quad_part()?)
    }

    fn require_log_domain(x: &RingElem, what: &str) -> Result<Ratio<i64>> {
        let p = x.spec.p() as i64;
        let bound = Ratio::new(1, p - 1);
        match x.valuation() {
            Valuation::Infinite => Ok(Ratio::from_integer(x.prec as i64)),
            Valuation::Finite(v) if v > bound => Ok(v),
            Valuation::Finite(v) => Err(Error::Domain(format!(
                "{what} needs valuation > 1/(p-1), got {v}"
            ))),
        }
    }

    /// `log(u) = sum (-1)^(k+1) (u-1)^k / k` for `v(u-1) > 1/(p-1)`.
    ///
    /// Each term is divided exactly by `p^{v_p(k)}`; the result carries the
    /// worst precision among the terms.
    pub fn padic_log(&self) -> Result<RingElem> {
        let x = self.sub_ref(&self.spec.one());
        let v = Self::require_log_domain(&x, "log")?;
        let p = self.spec.p();
        let n = self.prec as i64;
        let mut acc = self.spec.zero();
        let mut xk = self.spec.one();
        let mut k: u64 = 1;
        loop {
            // every later term has valuation >= k v - log_p k >= n
            let logk = (k as f64).ln() / (p as f64).ln();
            if (Ratio::from_integer(k as i64) * v).to_integer() as f64 - logk > n as f64 + 1.0 {
                break;
            }
            xk = xk.mul_ref(&x);
            let s = vp_u64(k, p);
            let unit = (k / p.pow(s)) as i64;
            let term = xk.div_p_pow(s)?;
            let ui = self.spec.from_int(unit).inverse()?;
            let term = term.mul_ref(&ui);
            acc = if k % 2 == 1 { acc.add_ref(&term) } else { acc.sub_ref(&term) };
            k += 1;
            if k > 64 * (n as u64 + 2) * self.spec.ramification_index() as u64 {
                return Err(Error::NoConvergence("log series".into()));
            }
        }
        Ok(acc)
    }

    /// `exp(x) = sum x^k / k!` for `v(x) > 1/(p-1)`.
    pub fn padic_exp(&self) -> Result<RingElem> {
        let v = Self::require_log_domain(self, "exp")?;
        let p = self.spec.p();
        let n = self.prec as i64;
        let mut acc = self.spec.one();
        let mut xk = self.spec.one();
        let mut fact_v: u32 = 0;
        let mut fact_unit = self.spec.one();
        let mut k: u64 = 1;
        // terms have valuation >= k (v - 1/(p-1)) > 0
        let margin = v - Ratio::new(1, p as i64 - 1);
        loop {
            xk = xk.mul_ref(self);
            let s = vp_u64(k, p);
            fact_v += s;
            fact_unit = fact_unit.mul_ref(&self.spec.from_int((k / p.pow(s)) as i64));
            let term = xk.div_p_pow(fact_v)?.mul_ref(&fact_unit.inverse()?);
            acc = acc.add_ref(&term);
            k += 1;
            if (margin * Ratio::from_integer(k as i64)).to_integer() > n + 1 {
                break;
            }
            if k > 4096 {
                return Err(Error::NoConvergence("exp series".into()));
            }
        }
        Ok(acc)
    }
}

impl RingSpec {
    /// Worst-case digit loss `sum_{k<=K} ord_p(k)` for a log/exp series
    /// truncated at `K` terms.
    pub fn log_loss_bound(&self, terms: u64) -> u32 {
        (1..=terms).map(|k| vp_u64(k, self.p())).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::RingKind;

    #[test]
    fn make_ring_examples() {
        let r = RingSpec::ramified(2, 8, -2).unwrap();
        assert_eq!(r.rank(), 2);
        assert_eq!(r.modulus(), 256);
        let pi = r.quad_gen().unwrap();
        assert_eq!(pi.mul_ref(&pi), r.from_int(-2));
        assert_eq!(RingSpec::zp(3, 5).unwrap().modulus(), 243);
        let c = RingSpec::cyclotomic(2, 6, 2).unwrap();
        let z = c.zeta().unwrap();
        assert_eq!(z.mul_ref(&z), c.from_int(-1));
        assert!(RingSpec::zp(4, 3).is_err());
        assert!(RingSpec::new(3, 4, RingKind::RamifiedQuad([0, -9])).is_err());
        assert!(RingSpec::new(3, 4, RingKind::UnramifiedQuad([0, -1])).is_err());
    }

    #[test]
    fn valuation_examples() {
        let r = RingSpec::ramified(2, 8, -2).unwrap();
        assert_eq!(r.quad_gen().unwrap().valuation(), Valuation::Finite(Ratio::new(1, 2)));
        assert_eq!(r.from_int(2).valuation(), Valuation::int(1));
        let c = RingSpec::cyclotomic(2, 6, 2).unwrap();
        let z1 = c.zeta().unwrap().sub_ref(&c.one());
        assert_eq!(z1.valuation(), Valuation::Finite(Ratio::new(1, 2)));
        assert_eq!(z1.mul_ref(&z1), c.zeta().unwrap().scale(-2));
        let c3 = RingSpec::cyclotomic(3, 6, 2).unwrap();
        let w = c3.zeta().unwrap().sub_ref(&c3.one());
        assert_eq!(w.valuation(), Valuation::Finite(Ratio::new(1, 6)));
        assert_eq!(w.pow(6).valuation(), Valuation::int(1));
        assert_eq!(c3.zero().valuation(), Valuation::Infinite);
    }

    #[test]
    fn phi_p_is_shifted_eisenstein() {
        // Phi_p(x+1) = ((x+1)^p - 1)/x: all non-leading coefficients divisible
        // by p, constant term exactly p.
        for p in [3u64, 5, 7] {
            let c = RingSpec::cyclotomic(p, 4, 1).unwrap();
            let z = c.zeta().unwrap().sub_ref(&c.one());
            assert_eq!(z.valuation(), Valuation::Finite(Ratio::new(1, p as i64 - 1)));
            assert_eq!(z.norm_to_base().valuation(), Valuation::int(1));
        }
        let r = RingSpec::ramified(3, 4, -3).unwrap();
        assert_eq!(r.ramification_index(), 2);
    }

    #[test]
    fn teichmuller_and_frobenius() {
        let u = RingSpec::unramified(3, 6).unwrap();
        let one = u.one();
        assert_eq!(one.teichmuller().unwrap(), one);
        let x = u.from_coords(&[2, 1]).unwrap();
        let t = x.teichmuller().unwrap();
        assert_eq!(t.pow(8), one);
        assert_eq!(t.teichmuller().unwrap(), t);
        let f = x.frobenius().unwrap();
        assert_eq!(f.frobenius().unwrap(), x);
        assert!(u.from_int(3).teichmuller().is_err());
        // Frobenius lifts the p-power map on the residue field
        let xp = x.pow(3).with_prec(1);
        assert_eq!(f.with_prec(1), xp);
    }

    #[test]
    fn norm_of_uniformizer() {
        let r = RingSpec::ramified(2, 8, -2).unwrap();
        let n = r.quad_gen().unwrap().norm_to_base();
        assert_eq!(n, r.from_int(2));
        let t = r.quad_gen().unwrap().trace_to_base();
        assert!(t.is_zero());
    }

    #[test]
    fn log_exp_examples() {
        let r = RingSpec::zp(3, 6).unwrap();
        assert!(r.one().padic_log().unwrap().is_zero());
        let u = r.from_int(10);
        let l = u.padic_log().unwrap();
        let back = l.padic_exp().unwrap();
        assert_eq!(back, u);
        assert!(back.prec() >= 6 - r.log_loss_bound(20).min(6));
        let r5 = RingSpec::zp(5, 8).unwrap();
        let a = r5.from_int(6);
        let lhs = a.pow(5).padic_log().unwrap();
        let rhs = a.padic_log().unwrap().scale(5);
        assert_eq!(lhs, rhs);
        assert!(r5.from_int(2).padic_log().is_err());
    }

    #[test]
    fn inverse_in_composite() {
        let c = RingSpec::new(3, 6, RingKind::Composite { quad: Box::new(RingKind::UnramifiedQuad([0, 1])), level: 1 }).unwrap();
        let x = c.from_coords(&[1, 2, 3, 1]).unwrap();
        let xi = x.inverse().unwrap();
        assert_eq!(x.mul_ref(&xi), c.one());
    }

    #[test]
    fn epsilon_formula() {
        assert_eq!(RingSpec::ramified(2, 4, -2).unwrap().epsilon(), 3);
        assert_eq!(RingSpec::ramified(3, 4, -3).unwrap().epsilon(), 2);
        assert_eq!(RingSpec::unramified(5, 4).unwrap().epsilon(), 1);
        assert_eq!(RingSpec::unramified(2, 4).unwrap().epsilon(), 2);
    }
}
