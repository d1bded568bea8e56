use super::{check_group, varsigma, Measure};
use crate::error::{Error, Result};
use crate::padic::{RingElem, RingSpec, Valuation};
use crate::series::TruncSeries;

/// The Fourier data of a measure at level `n`: the values
/// `amice(zeta^s - 1)` for `s` in `Z/p^n`, with `zeta = zeta_{p^n}` adjoined.
pub(super) struct Fourier {
    pub ring: RingSpec,
    pub n: u32,
    pub pn: u128,
    /// `vals[s] = h(zeta^s - 1)`.
    pub vals: Vec<RingElem>,
}

impl Fourier {
    /// Evaluates `h` at every `zeta_{p^n}^s - 1`. The value at a point of
    /// valuation `v` is exact modulo `p^min(N_eff, floor(D v))`.
    pub fn new(h: &TruncSeries, n: u32, ring: &RingSpec) -> Result<Self> {
        let spec = h.spec();
        let p = spec.p() as u128;
        let pn = p.pow(n);
        let top = ring.cyclotomic_level();
        let step = p.pow(top - n) as i64;
        let he = h.embed(ring)?;
        let one = ring.one();
        let mut vals = Vec::with_capacity(pn as usize);
        for s in 0..pn as i64 {
            let x = ring.zeta_pow(s * step)?.sub_ref(&one);
            vals.push(he.eval(&x)?);
        }
        Ok(Fourier { ring: ring.clone(), n, pn, vals })
    }

    /// `zeta_{p^n}^k` in the working ring.
    pub fn zeta(&self, k: u128) -> Result<RingElem> {
        let p = self.ring.p() as u128;
        let step = p.pow(self.ring.cyclotomic_level() - self.n);
        self.ring.zeta_pow(((k % self.pn) * step) as i64)
    }
}

/// All residues of `Z_p` (rank 1) or `O_K` (rank 2) modulo `p^n`, lifted.
pub(super) fn residues(spec: &RingSpec, rank: u32, n: u32) -> Vec<RingElem> {
    let pn = (spec.p() as u128).pow(n);
    let mut out = Vec::new();
    if rank == 1 {
        for a in 0..pn {
            out.push(spec.from_u128(a));
        }
    } else {
        let w = spec.quad_gen().expect("quadratic ring");
        for b in 0..pn {
            for a in 0..pn {
                out.push(spec.from_u128(a).add_ref(&w.mul_ref(&spec.from_u128(b))));
            }
        }
    }
    out
}

pub(super) fn sigma_mod(x: &RingElem, pn: u128) -> u128 {
    let s = varsigma(x).expect("measure rings carry varsigma");
    s.coords()[0] % pn
}

/// Reduces `x` modulo `p^n` coordinatewise, as a lookup key.
pub(super) fn key(x: &RingElem, n: u32) -> Vec<u128> {
    let pn = (x.spec().p() as u128).pow(n);
    x.coords().iter().map(|c| c % pn).collect()
}

/// The Fourier numerator of a coset mass together with the divisibility it
/// must satisfy.
#[derive(Clone, Debug)]
pub struct CosetNumerator {
    /// `sum_j amice(zeta^{varsigma(delta^-1 j)} - 1) zeta^{-varsigma(j)}`,
    /// descended to the base ring.
    pub numerator: RingElem,
    /// `rank * n + denom`: the mass is `numerator / p^required`.
    pub required: u32,
    pub valuation: Valuation,
}

fn check_unit_lift(mu: &Measure, delta: &RingElem) -> Result<RingElem> {
    if delta.spec() != mu.spec() {
        return Err(Error::RingMismatch("delta must lie in the measure's ring".into()));
    }
    if mu.tag().rank() == 1 && delta.coords()[1..].iter().any(|&c| c != 0) {
        return Err(Error::Domain("delta must lie in Z_p for a Z_p measure".into()));
    }
    if !delta.is_unit() {
        return Err(Error::Domain("delta must be a unit".into()));
    }
    delta.inverse()
}

fn working_ring(mu: &Measure, n: u32) -> Result<RingSpec> {
    check_group(mu.spec(), mu.tag())?;
    mu.spec().adjoin_zeta(n)
}

/// Sums `vals[s] zeta^{-t}` over pairs `(s, t)` and descends the result.
fn pair_sum(f: &Fourier, base: &RingSpec, pairs: impl Iterator<Item = (u128, u128)>) -> Result<RingElem> {
    let pn = f.pn as usize;
    let mut cnt = vec![0i64; pn * pn];
    for (s, t) in pairs {
        cnt[s as usize * pn + t as usize] += 1;
    }
    let mut zinv = Vec::with_capacity(pn);
    for t in 0..f.pn {
        zinv.push(f.zeta(f.pn - t)?);
    }
    let mut acc = f.ring.zero();
    for s in 0..pn {
        let mut w = f.ring.zero();
        for t in 0..pn {
            let c = cnt[s * pn + t];
            if c != 0 {
                w = w.add_ref(&zinv[t].scale(c));
            }
        }
        if !w.is_zero() {
            acc = acc.add_ref(&f.vals[s].mul_ref(&w));
        }
    }
    acc.descend(base).map_err(|e| match e {
        Error::Descent(m) => Error::Descent(format!("coset sum did not descend: {m}")),
        e => e,
    })
}

fn divide(num: RingElem, required: u32) -> Result<RingElem> {
    if num.prec() <= required {
        return Err(Error::Precision(format!(
            "coset numerator known mod p^{}, division by p^{required} leaves nothing",
            num.prec()
        )));
    }
    let v = num.valuation();
    num.div_p_pow(required).map_err(|e| match e {
        Error::NotDivisible(_) => Error::NotDivisible(format!(
            "coset numerator has valuation {v} < {required}: the series is not admissible"
        )),
        e => e,
    })
}

fn numerator_with(mu: &Measure, f: &Fourier, delta: &RingElem) -> Result<CosetNumerator> {
    let dinv = check_unit_lift(mu, delta)?;
    let rank = mu.tag().rank();
    let pn = f.pn;
    let js = residues(mu.spec(), rank, f.n);
    let pairs = js.iter().map(|j| (sigma_mod(&dinv.mul_ref(j), pn), sigma_mod(j, pn)));
    let numerator = pair_sum(f, mu.spec(), pairs)?;
    let required = rank * f.n + mu.denom();
    Ok(CosetNumerator { valuation: numerator.valuation(), numerator, required })
}

/// The Fourier numerator of `mu(delta U_n)` before division.
pub fn coset_numerator(mu: &Measure, delta: &RingElem, n: u32) -> Result<CosetNumerator> {
    if n == 0 {
        return Err(Error::Domain("level 0 has no Fourier numerator".into()));
    }
    let ring = working_ring(mu, n)?;
    let f = Fourier::new(mu.amice(), n, &ring)?;
    numerator_with(mu, &f, delta)
}

/// `mu(delta U_n)` with `U_n = 1 + p^n O`:
/// `p^{-rank n} sum_{j in O/p^n} amice(zeta^{varsigma(delta^-1 j)} - 1) zeta^{-varsigma(j)}`.
///
/// `delta` is any unit lift. The division is exact and checked: a numerator
/// of too small a valuation is an error, not a silent loss. At `n = 0` the
/// mass of `U_0` is the constant term.
pub fn coset_mass(mu: &Measure, delta: &RingElem, n: u32) -> Result<RingElem> {
    if n == 0 {
        check_unit_lift(mu, delta)?;
        let c = mu.amice().coeff(0).with_prec(mu.amice().n_eff());
        return divide_level0(c, mu.denom());
    }
    let c = coset_numerator(mu, delta, n)?;
    divide(c.numerator, c.required)
}

fn divide_level0(c: RingElem, denom: u32) -> Result<RingElem> {
    if denom == 0 {
        return Ok(c);
    }
    divide(c, denom)
}

/// Masses of every unit coset `delta U_n`, keyed by the canonical residue
/// lift of `delta`.
pub fn coset_masses(mu: &Measure, n: u32) -> Result<Vec<(RingElem, RingElem)>> {
    let rank = mu.tag().rank();
    let units: Vec<RingElem> = residues(mu.spec(), rank, n.max(1)).into_iter().filter(|x| x.is_unit()).collect();
    if n == 0 {
        let one = mu.spec().one();
        return Ok(vec![(one.clone(), coset_mass(mu, &one, 0)?)]);
    }
    let ring = working_ring(mu, n)?;
    let f = Fourier::new(mu.amice(), n, &ring)?;
    let mut out = Vec::with_capacity(units.len());
    for d in units {
        let c = numerator_with(mu, &f, &d)?;
        out.push((d, divide(c.numerator, c.required)?));
    }
    Ok(out)
}

/// `mu(x + p^n O)` for any residue `x`, units or not:
/// `p^{-rank n} sum_j amice(zeta^{varsigma(j)} - 1) zeta^{-varsigma(j x)}`.
pub fn residue_class_mass(mu: &Measure, x: &RingElem, n: u32) -> Result<RingElem> {
    if n == 0 {
        let c = mu.amice().coeff(0).with_prec(mu.amice().n_eff());
        return divide_level0(c, mu.denom());
    }
    let ring = working_ring(mu, n)?;
    let f = Fourier::new(mu.amice(), n, &ring)?;
    let rank = mu.tag().rank();
    let js = residues(mu.spec(), rank, n);
    let pairs = js.iter().map(|j| (sigma_mod(j, f.pn), sigma_mod(&j.mul_ref(x), f.pn)));
    let num = pair_sum(&f, mu.spec(), pairs)?;
    divide(num, rank * n + mu.denom())
}

/// Mass carried off the units: `amice(0) - sum_delta mu(delta U_1)`.
pub fn mass_off_units(mu: &Measure) -> Result<RingElem> {
    let total = coset_mass(mu, &mu.spec().one(), 0)?;
    let mut acc = total;
    for (_, m) in coset_masses(mu, 1)? {
        acc = acc.sub_ref(&m);
    }
    Ok(acc)
}

/// The Riemann sum `sum_{delta in (O/p^n)^x} varsigma(delta)^k mu(delta U_n)`
/// over canonical lifts.
pub fn riemann_moment(mu: &Measure, k: u32, n: u32) -> Result<RingElem> {
    let mut acc = mu.spec().zero();
    for (d, m) in coset_masses(mu, n)? {
        acc = acc.add_ref(&varsigma(&d)?.pow(k as u64).mul_ref(&m));
    }
    Ok(acc)
}
