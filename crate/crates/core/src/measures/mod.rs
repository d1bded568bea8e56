//! p-adic measures through their Amice transforms.
//!
//! A measure `mu` on `Z_p` is the series `sum_n mu(binom(x, n)) T^n`. A
//! measure on `O_K = Z_p + Z_p w` is recorded by its diagonal series
//! `int (1+T)^{varsigma(x)} dmu(x)`, where `varsigma(a + b w) = a + b` is the
//! coordinate sum of the fixed trivialization. Coset masses on `O_K^x` are
//! recovered by Fourier inversion against the pairing `(j, x) -> varsigma(j x)`,
//! which must be non-degenerate modulo `p`.

mod character;
mod coset;
#[cfg(test)]
mod tests;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{RingElem, RingKind, RingSpec};
use crate::series::{SeriesJson, TruncSeries};

pub use character::{gauss_sum, twist_eval, twist_general, CharDomain, FiniteCharacter, PFraction};
pub use coset::{coset_mass, coset_masses, coset_numerator, mass_off_units, residue_class_mass, riemann_moment, CosetNumerator};

/// The group a measure lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupTag {
    Zp,
    ZpUnits,
    OKp,
    OKpUnits,
}

impl GroupTag {
    pub fn is_units(self) -> bool {
        matches!(self, GroupTag::ZpUnits | GroupTag::OKpUnits)
    }

    /// Rank of the group over `Z_p`.
    pub fn rank(self) -> u32 {
        match self {
            GroupTag::Zp | GroupTag::ZpUnits => 1,
            GroupTag::OKp | GroupTag::OKpUnits => 2,
        }
    }

    /// The tag of the restriction to units.
    pub fn units(self) -> GroupTag {
        match self {
            GroupTag::Zp | GroupTag::ZpUnits => GroupTag::ZpUnits,
            GroupTag::OKp | GroupTag::OKpUnits => GroupTag::OKpUnits,
        }
    }
}

/// A measure `amice / p^denom` on the group named by `tag`.
///
/// `denom` is zero for the integral measures the paper works with; a
/// positive value represents series in `L_p[[T]]` and is what lets the
/// admissibility checks fail on purpose.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    amice: TruncSeries,
    denom: u32,
    tag: GroupTag,
}

impl Measure {
    /// Wraps a series. For the units tags the series must be fixed by
    /// [`tilde`] at the precision it is known to.
    pub fn new(amice: TruncSeries, tag: GroupTag) -> Result<Self> {
        Self::with_denominator(amice, 0, tag)
    }

    pub fn with_denominator(amice: TruncSeries, denom: u32, tag: GroupTag) -> Result<Self> {
        check_group(amice.spec(), tag)?;
        if tag.is_units() {
            let t = tilde(&amice)?;
            if t != amice || t.n_eff() == 0 {
                return Err(Error::Domain("series is not supported on the units: tilde changes it".into()));
            }
        }
        Ok(Measure { amice, denom, tag })
    }

    pub(crate) fn unchecked(amice: TruncSeries, denom: u32, tag: GroupTag) -> Self {
        Measure { amice, denom, tag }
    }

    pub fn amice(&self) -> &TruncSeries {
        &self.amice
    }
    pub fn denom(&self) -> u32 {
        self.denom
    }
    pub fn tag(&self) -> GroupTag {
        self.tag
    }
    pub fn spec(&self) -> &RingSpec {
        self.amice.spec()
    }

    /// `self + o` (same tag; denominators are aligned).
    pub fn add(&self, o: &Measure) -> Result<Measure> {
        if self.tag != o.tag {
            return Err(Error::Domain(format!("cannot add measures on {:?} and {:?}", self.tag, o.tag)));
        }
        let s = self.denom.max(o.denom);
        let a = scale_p(&self.amice, s - self.denom);
        let b = scale_p(&o.amice, s - o.denom);
        Ok(Measure::unchecked(a.add(&b), s, self.tag))
    }

    /// `c * self`.
    pub fn scale(&self, c: &RingElem) -> Measure {
        Measure::unchecked(self.amice.scale(c), self.denom, self.tag)
    }

    /// Restriction to the units: the series-side [`tilde`].
    pub fn tilde(&self) -> Result<Measure> {
        Ok(Measure::unchecked(tilde(&self.amice)?, self.denom, self.tag.units()))
    }

    pub fn to_json(&self) -> MeasureJson {
        MeasureJson { tag: self.tag, denom: self.denom, amice: self.amice.to_json() }
    }

    pub fn from_json(j: &MeasureJson) -> Result<Self> {
        let amice = TruncSeries::from_json(&j.amice)?;
        check_group(amice.spec(), j.tag)?;
        Ok(Measure::unchecked(amice, j.denom, j.tag))
    }
}

/// Serialized measure: the Amice series plus its tag and denominator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureJson {
    pub tag: GroupTag,
    #[serde(default)]
    pub denom: u32,
    pub amice: SeriesJson,
}

fn scale_p(s: &TruncSeries, k: u32) -> TruncSeries {
    if k == 0 {
        return s.clone();
    }
    s.scale(&s.spec().from_u128(s.spec().p_pow(k.min(s.spec().prec()))))
}

/// Measures live over `Z_p` or a quadratic ring; the `O_K` tags need the
/// quadratic ring, and its pairing `varsigma(j x)` must be perfect mod `p`.
pub(crate) fn check_group(spec: &RingSpec, tag: GroupTag) -> Result<()> {
    match spec.kind() {
        RingKind::Zp | RingKind::RamifiedQuad(_) | RingKind::UnramifiedQuad(_) => {}
        k => return Err(Error::Domain(format!("measures need a Z_p or quadratic coefficient ring, got {k:?}"))),
    }
    if tag.rank() == 2 {
        if !spec.has_quad() {
            return Err(Error::Domain("O_K tags need a quadratic ring".into()));
        }
        // Gram determinant of (j, x) -> varsigma(j x) on the basis 1, w
        let w = spec.quad_gen()?;
        let det = varsigma(&w.mul_ref(&w))?.sub_ref(&spec.one());
        if !det.is_unit() {
            return Err(Error::Domain("the pairing varsigma(j x) is degenerate mod p for this basis".into()));
        }
    }
    Ok(())
}

/// The coordinate sum `varsigma(a + b w) = a + b`, as an element of `Z_p`
/// inside the same ring.
pub fn varsigma(x: &RingElem) -> Result<RingElem> {
    let spec = x.spec();
    match spec.kind() {
        RingKind::Zp => Ok(x.clone()),
        RingKind::RamifiedQuad(_) | RingKind::UnramifiedQuad(_) => {
            let s = spec.from_u128(x.coords()[0]).add_ref(&spec.from_u128(x.coords()[1]));
            Ok(s.with_prec(x.prec()))
        }
        k => Err(Error::Domain(format!("varsigma is defined on Z_p and quadratic rings, not {k:?}"))),
    }
}

/// The exponent a point mass at `a` contributes to the diagonal series.
fn dirac_exponent(a: &RingElem, tag: GroupTag) -> Result<RingElem> {
    let c = match tag {
        GroupTag::Zp | GroupTag::ZpUnits => {
            if a.coords()[1..].iter().any(|&c| c != 0) {
                return Err(Error::Domain("a Z_p point mass needs a in Z_p".into()));
            }
            a.clone()
        }
        GroupTag::OKp | GroupTag::OKpUnits => varsigma(a)?,
    };
    if tag.is_units() && !c.is_unit() {
        return Err(Error::Domain(format!("point mass for {tag:?} needs varsigma(a) to be a unit")));
    }
    Ok(c)
}

/// The point mass at `a`: amice `(1+T)^a` on `Z_p`, `(1+T)^{varsigma(a)}` on
/// `O_K`, modulo `T^d`.
///
/// `a` is known modulo `p^prec`, and changing it by `p^prec m` changes the
/// coefficient of `T^k` by a multiple of `binom(p^prec m, k)`, of valuation
/// at least `prec - v_p(k)`; the result carries that loss.
pub fn dirac(a: &RingElem, tag: GroupTag, d: usize) -> Result<Measure> {
    let spec = a.spec();
    check_group(spec, tag)?;
    let c = dirac_exponent(a, tag)?;
    let p = spec.p();
    let mut loss = 0u32;
    let mut t = p;
    while (t as usize) < d {
        loss += 1;
        t = t.saturating_mul(p);
    }
    let prec = c.prec().saturating_sub(loss);
    let base = TruncSeries::from_coeffs(spec, &[spec.one(), spec.one()], d);
    let pk = spec.p_pow(c.prec());
    let e = c.coords()[0] % pk;
    let s = if e <= pk / 2 { pow_u128(&base, e) } else { pow_u128(&base, pk - e).invert()? };
    Ok(Measure::unchecked(s.with_n_eff(prec), 0, tag))
}

fn pow_u128(b: &TruncSeries, mut e: u128) -> TruncSeries {
    let mut r = TruncSeries::one(b.spec(), b.cap());
    let mut b = b.clone();
    while e > 0 {
        if e & 1 == 1 {
            r = r.mul(&b);
        }
        e >>= 1;
        if e > 0 {
            b = b.mul(&b);
        }
    }
    r
}

/// Restriction to `Z_p^x` on the series side:
/// `h~ = h(T) - (1/p) sum_{j<p} h(zeta_p^j (1+T) - 1)`.
///
/// The sum is formed with `zeta_p` adjoined and must descend to the base
/// ring. Each translate has constant term `zeta_p^j - 1` of valuation
/// `1/(p-1)`, so the unknown tail beyond the cap `D` reaches degree `m` with
/// valuation `(D - m)/(p-1)`: the result has cap `D - (p-1) N_eff` and one
/// digit fewer.
pub fn tilde(h: &TruncSeries) -> Result<TruncSeries> {
    let spec = h.spec();
    let p = spec.p();
    let c = spec.adjoin_zeta(1)?;
    let he = h.embed(&c)?;
    let d = h.cap();
    let mut sum: Option<TruncSeries> = None;
    for j in 0..p {
        let z = c.zeta_pow(j as i64)?;
        let inner = TruncSeries::from_coeffs(&c, &[z.sub_ref(&c.one()), z], d);
        let term = he.compose(&inner)?;
        sum = Some(match sum {
            None => term,
            Some(s) => s.add(&term),
        });
    }
    let sum = sum.expect("p >= 2").descend(spec)?;
    let avg = sum.div_p_pow(1).map_err(|e| match e {
        Error::NotDivisible(m) => Error::Descent(format!("translate sum not divisible by p: {m}")),
        e => e,
    })?;
    Ok(h.truncate(avg.cap()).sub(&avg))
}

/// `d/dlog Q = (1+T) d/dT`; the cap drops by one.
pub fn theta_op(h: &TruncSeries) -> TruncSeries {
    let dh = h.derive();
    dh.add(&dh.shift_up(1))
}

/// The moment `int varsigma(x)^k dmu = (theta_op^k amice)(0) / p^denom`.
pub fn moment(mu: &Measure, k: usize) -> Result<RingElem> {
    if k >= mu.amice.cap() {
        return Err(Error::Cap(format!("moment {k} needs a cap above {k}, have {}", mu.amice.cap())));
    }
    let mut h = mu.amice.clone();
    for _ in 0..k {
        h = theta_op(&h);
    }
    let c = h.coeff(0).with_prec(h.n_eff());
    if mu.denom == 0 {
        return Ok(c);
    }
    c.div_p_pow(mu.denom).map_err(|e| match e {
        Error::NotDivisible(_) => Error::NotDivisible(format!("moment {k} is not integral")),
        e => e,
    })
}
