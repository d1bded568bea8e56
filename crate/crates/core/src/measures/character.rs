use std::collections::{HashMap, VecDeque};

use super::coset::{key, residues, sigma_mod, Fourier};
use super::{check_group, theta_op, Measure};
use crate::error::{Error, Result};
use crate::padic::{RingElem, RingSpec};

/// The group a finite character is defined on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharDomain {
    /// `(Z/p^n)^x`.
    Zp,
    /// `(O_K/p^n)^x`.
    OKp,
}

impl CharDomain {
    pub fn rank(self) -> u32 {
        match self {
            CharDomain::Zp => 1,
            CharDomain::OKp => 2,
        }
    }
}

/// A character of `(Z/p^n)^x` or `(O_K/p^n)^x`, tabulated on the whole group
/// from its values on generators.
#[derive(Clone, Debug)]
pub struct FiniteCharacter {
    domain: CharDomain,
    level: u32,
    group: RingSpec,
    target: RingSpec,
    table: HashMap<Vec<u128>, RingElem>,
}

impl FiniteCharacter {
    /// Builds the character with `chi(g) = v` for each `(g, v)` in `gens`.
    ///
    /// The table is filled by walking products of generators; reaching a
    /// residue twice with different values means the data is not
    /// multiplicative (in particular some `chi(g)` has the wrong order), and
    /// failing to reach every unit means the generators do not generate.
    pub fn new(group: &RingSpec, domain: CharDomain, level: u32, gens: &[(RingElem, RingElem)], target: &RingSpec) -> Result<Self> {
        check_domain(group, domain)?;
        let mut table: HashMap<Vec<u128>, RingElem> = HashMap::new();
        table.insert(key(&group.one(), level), target.one());
        if level == 0 {
            return Ok(FiniteCharacter { domain, level, group: group.clone(), target: target.clone(), table });
        }
        for (g, v) in gens {
            if g.spec() != group || v.spec() != target {
                return Err(Error::RingMismatch("generator or value in the wrong ring".into()));
            }
            if !g.is_unit() {
                return Err(Error::Domain("generators must be units".into()));
            }
        }
        let mut queue = VecDeque::from([group.one()]);
        while let Some(x) = queue.pop_front() {
            let vx = table[&key(&x, level)].clone();
            for (g, v) in gens {
                let y = reduce(&x.mul_ref(g), level);
                let vy = vx.mul_ref(v);
                match table.get(&key(&y, level)) {
                    Some(old) if *old != vy => {
                        return Err(Error::Domain("character values are not multiplicative on the group".into()));
                    }
                    Some(_) => {}
                    None => {
                        table.insert(key(&y, level), vy);
                        queue.push_back(y);
                    }
                }
            }
        }
        let size = residues(group, domain.rank(), level).iter().filter(|x| x.is_unit()).count();
        if table.len() != size {
            return Err(Error::Domain(format!("generators reach {} of {size} units", table.len())));
        }
        Ok(FiniteCharacter { domain, level, group: group.clone(), target: target.clone(), table })
    }

    /// The trivial character at the given level.
    pub fn trivial(group: &RingSpec, domain: CharDomain, level: u32, target: &RingSpec) -> Result<Self> {
        check_domain(group, domain)?;
        let one = target.one();
        let mut table = HashMap::new();
        for x in residues(group, domain.rank(), level).into_iter().filter(|x| level == 0 || x.is_unit()) {
            table.insert(key(&x, level), one.clone());
        }
        Ok(FiniteCharacter { domain, level, group: group.clone(), target: target.clone(), table })
    }

    /// `x -> teichmuller(x)^i` on `(O/p)^x`, valued in the group ring itself.
    pub fn teichmuller_power(group: &RingSpec, domain: CharDomain, i: u64) -> Result<Self> {
        check_domain(group, domain)?;
        let mut table = HashMap::new();
        for x in residues(group, domain.rank(), 1).into_iter().filter(|x| x.is_unit()) {
            table.insert(key(&x, 1), x.teichmuller()?.pow(i));
        }
        Ok(FiniteCharacter { domain, level: 1, group: group.clone(), target: group.clone(), table })
    }

    pub fn domain(&self) -> CharDomain {
        self.domain
    }
    pub fn level(&self) -> u32 {
        self.level
    }
    pub fn group(&self) -> &RingSpec {
        &self.group
    }
    pub fn target(&self) -> &RingSpec {
        &self.target
    }

    /// `chi(x)`, zero off the units.
    pub fn eval(&self, x: &RingElem) -> RingElem {
        if !x.is_unit() {
            return self.target.zero();
        }
        self.table.get(&key(x, self.level)).cloned().unwrap_or_else(|| self.target.zero())
    }

    pub fn is_trivial(&self) -> bool {
        self.table.values().all(|v| v.is_one())
    }

    /// The order of the character.
    pub fn order(&self) -> u64 {
        let mut k = 1u64;
        loop {
            if self.table.values().all(|v| v.pow(k).is_one()) {
                return k;
            }
            k += 1;
        }
    }
}

fn check_domain(group: &RingSpec, domain: CharDomain) -> Result<()> {
    let tag = match domain {
        CharDomain::Zp => super::GroupTag::Zp,
        CharDomain::OKp => super::GroupTag::OKp,
    };
    check_group(group, tag)
}

fn reduce(x: &RingElem, n: u32) -> RingElem {
    let pn = (x.spec().p() as u128).pow(n);
    let spec = x.spec();
    let w = if spec.has_quad() { Some(spec.quad_gen().expect("quadratic")) } else { None };
    let mut y = spec.from_u128(x.coords()[0] % pn);
    if let Some(w) = w {
        y = y.add_ref(&w.mul_ref(&spec.from_u128(x.coords()[1] % pn)));
    }
    y
}

/// `numer / p^pdenom`, normalized so that `numer` is not divisible by `p`
/// unless `pdenom = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PFraction {
    pub numer: RingElem,
    pub pdenom: u32,
}

impl PFraction {
    pub fn new(numer: RingElem, pdenom: u32) -> Self {
        let mut f = PFraction { numer, pdenom };
        while f.pdenom > 0 && f.numer.prec() > 0 {
            match f.numer.div_p_pow(1) {
                Ok(x) => {
                    f.numer = x;
                    f.pdenom -= 1;
                }
                Err(_) => break,
            }
        }
        f
    }

    /// The value, when it is integral.
    pub fn integral(&self) -> Option<RingElem> {
        (self.pdenom == 0).then(|| self.numer.clone())
    }
}

/// The ring holding `zeta_{p^n}` and the character values.
fn common_ring(chi: &FiniteCharacter, n: u32) -> Result<RingSpec> {
    let lvl = n.max(chi.target.cyclotomic_level());
    let quad = chi.target.quad_part()?;
    if quad != chi.group && !(quad.kind() == &crate::padic::RingKind::Zp) {
        return Err(Error::RingMismatch("character values must lie over the group ring".into()));
    }
    chi.group.adjoin_zeta(lvl)
}

/// The normalizing constant `|(O_K/P^epsilon)^x| / |(Z/q)^x|` with
/// `q = p` (odd `p`) or `4` (`p = 2`).
fn normalization(group: &RingSpec) -> Result<i64> {
    let qr = group.residue_size() as i64;
    let eps = group.epsilon();
    let num = (qr - 1) * qr.pow(eps - 1);
    let p = group.p() as i64;
    let den = if p == 2 { 2 } else { p - 1 };
    if num % den != 0 {
        return Err(Error::Domain("Gauss sum normalization is not integral".into()));
    }
    Ok(num / den)
}

/// `sum_{x in (O/p^n)^x} chi(x) zeta^{-varsigma(j x)}` in the common ring.
fn char_sum(chi: &FiniteCharacter, f: &Fourier, units: &[RingElem], j: &RingElem) -> Result<RingElem> {
    let mut acc = f.ring.zero();
    for x in units {
        let t = sigma_mod(&j.mul_ref(x), f.pn);
        let v = chi.eval(x).embed(&f.ring)?;
        acc = acc.add_ref(&v.mul_ref(&f.zeta(f.pn - t)?));
    }
    Ok(acc)
}

/// The Gauss sum
/// `tau(chi) = c p^{-rank n} sum_{x in O/p^n} chi(x) zeta_{p^n}^{-varsigma(x)}`,
/// with `c` the normalizing constant for `O_K` characters and `1` for `Z_p`
/// characters. At level 0 the sum has the single term `1`, so
/// `tau = c`.
pub fn gauss_sum(chi: &FiniteCharacter) -> Result<PFraction> {
    let c = match chi.domain {
        CharDomain::OKp => normalization(&chi.group)?,
        CharDomain::Zp => 1,
    };
    let n = chi.level;
    if n == 0 {
        return Ok(PFraction::new(chi.group.from_int(c), 0));
    }
    let ring = common_ring(chi, n)?;
    let f = Fourier { ring: ring.clone(), n, pn: (ring.p() as u128).pow(n), vals: Vec::new() };
    let units: Vec<RingElem> = residues(&chi.group, chi.domain.rank(), n).into_iter().filter(|x| x.is_unit()).collect();
    let s = char_sum(chi, &f, &units, &chi.group.one())?;
    Ok(PFraction::new(s.scale(c), chi.domain.rank() * n))
}

fn check_pair(mu: &Measure, chi: &FiniteCharacter) -> Result<()> {
    if mu.tag().rank() != chi.domain.rank() {
        return Err(Error::Domain("measure and character live on different groups".into()));
    }
    if mu.spec() != &chi.group {
        return Err(Error::RingMismatch("character group ring differs from the measure ring".into()));
    }
    Ok(())
}

struct TwistSetup {
    f: Fourier,
    units: Vec<RingElem>,
    all: Vec<RingElem>,
    rank: u32,
}

fn setup(mu: &Measure, chi: &FiniteCharacter, k: usize) -> Result<TwistSetup> {
    check_pair(mu, chi)?;
    if k >= mu.amice().cap() {
        return Err(Error::Cap(format!("twist with k = {k} needs a cap above {k}")));
    }
    let n = chi.level.max(1);
    let ring = common_ring(chi, n)?;
    let mut h = mu.amice().clone();
    for _ in 0..k {
        h = theta_op(&h);
    }
    let f = Fourier::new(&h, n, &ring)?;
    let rank = chi.domain.rank();
    let all = residues(&chi.group, rank, n);
    let units = all.iter().filter(|x| x.is_unit()).cloned().collect();
    Ok(TwistSetup { f, units, all, rank })
}

fn finish(mu: &Measure, num: RingElem, rank: u32, n: u32) -> Result<RingElem> {
    let required = rank * n + mu.denom();
    if num.prec() <= required {
        return Err(Error::Precision(format!("twisted sum known mod p^{}, need more than {required} digits", num.prec())));
    }
    let v = num.valuation();
    num.div_p_pow(required).map_err(|e| match e {
        Error::NotDivisible(_) => Error::NotDivisible(format!("twisted sum has valuation {v} < {required}")),
        e => e,
    })
}

/// `int_{O^x} chi(x) varsigma(x)^k dmu` by orthogonality of characters:
/// `p^{-rank n} sum_{j in O/p^n} (theta^k amice)(zeta^{varsigma(j)} - 1) g(chi, j)`
/// with `g(chi, j) = sum_{x unit} chi(x) zeta^{-varsigma(j x)}`. Valid for
/// every character of level `n`, primitive or not.
pub fn twist_general(mu: &Measure, chi: &FiniteCharacter, k: usize) -> Result<RingElem> {
    let st = setup(mu, chi, k)?;
    let mut acc = st.f.ring.zero();
    for j in &st.all {
        let g = char_sum(chi, &st.f, &st.units, j)?;
        if !g.is_zero() {
            acc = acc.add_ref(&st.f.vals[sigma_mod(j, st.f.pn) as usize].mul_ref(&g));
        }
    }
    finish(mu, acc, st.rank, st.f.n)
}

/// The twisted evaluation `mu(chi varsigma^k)` through the Gauss sum:
/// `tau(chi) / c * sum_{c in (O/p^n)^x} chi(c)^-1 (theta^k amice)(zeta^{varsigma(c)} - 1)`.
///
/// The orbit sum runs over all of `(O/p^n)^x`, the Galois group of the level-`n`
/// layer when the class number is 1 and the conductor is trivial. The
/// reduction from [`twist_general`] needs `g(chi, j) = 0` for every
/// non-unit `j`, which is checked; characters failing it (the trivial one,
/// imprimitive ones) are evaluated by [`twist_general`] instead.
pub fn twist_eval(mu: &Measure, chi: &FiniteCharacter, k: usize) -> Result<RingElem> {
    let st = setup(mu, chi, k)?;
    for j in st.all.iter().filter(|j| !j.is_unit()) {
        if !char_sum(chi, &st.f, &st.units, j)?.is_zero() {
            return twist_general(mu, chi, k);
        }
    }
    let tau = char_sum(chi, &st.f, &st.units, &chi.group.one())?;
    let mut orbit = st.f.ring.zero();
    for c in &st.units {
        let ci = c.inverse()?;
        let v = chi.eval(&ci).embed(&st.f.ring)?;
        orbit = orbit.add_ref(&v.mul_ref(&st.f.vals[sigma_mod(c, st.f.pn) as usize]));
    }
    finish(mu, tau.mul_ref(&orbit), st.rank, st.f.n)
}
