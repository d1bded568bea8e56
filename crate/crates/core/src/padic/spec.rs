use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::modular::{is_prime, Modulus, MAX_MODULUS_BITS};
use crate::error::{Error, Result};

/// The shape of a coefficient ring.
///
/// Quadratic kinds carry `[t, n]` for the defining polynomial `x^2 - t*x + n`,
/// so `RamifiedQuad([0, 2])` is `Z_2[x]/(x^2 + 2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RingKind {
    Zp,
    RamifiedQuad([i64; 2]),
    UnramifiedQuad([i64; 2]),
    /// `(Z/p^N)[y]/Phi_{p^n}(y)`; level 0 is `Z/p^N` with `y = 1`.
    Cyclotomic(u32),
    /// Tensor product of a quadratic kind with a cyclotomic level.
    Composite { quad: Box<RingKind>, level: u32 },
}

#[derive(Clone, Debug)]
pub(crate) struct Quad {
    pub t: u128,
    pub n: u128,
    pub ramified: bool,
    pub n_int: i64,
}

#[derive(Debug)]
pub(crate) struct SpecInner {
    pub p: u64,
    pub prec: u32,
    pub kind: RingKind,
    pub md: Modulus,
    /// `pows[k] = p^k` for `k <= prec`.
    pub pows: Vec<u128>,
    pub quad: Option<Quad>,
    pub level: u32,
    /// Degree of `Phi_{p^level}` (1 when there is no cyclotomic factor).
    pub cd: usize,
    /// Non-leading coefficients of `Phi_{p^level}`.
    pub phi: Vec<u128>,
    /// `ypow[k]` is `y^k` reduced modulo `Phi`, for `k < p^level`.
    pub ypow: Vec<Vec<u128>>,
    pub e: u32,
    pub f: u32,
}

/// A handle to a coefficient ring `O/p^N`; cheap to clone.
#[derive(Clone)]
pub struct RingSpec(pub(crate) Arc<SpecInner>);

impl PartialEq for RingSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.prec == other.0.prec && self.0.kind == other.0.kind)
    }
}
impl Eq for RingSpec {}

impl fmt::Debug for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingSpec(p={}, N={}, {:?})", self.0.p, self.0.prec, self.0.kind)
    }
}

fn residue_poly_irreducible(p: u64, t: i64, n: i64) -> bool {
    let pi = p as i64;
    (0..pi).all(|x| (x * x - t * x + n).rem_euclid(pi) != 0)
}

fn ipow(p: u64, k: u32) -> u128 {
    (p as u128).pow(k)
}

impl RingSpec {
    /// Builds a ring, validating primality, precision headroom and the
    /// defining polynomials.
    pub fn new(p: u64, prec: u32, kind: RingKind) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidRing(format!("{p} is not prime")));
        }
        if prec == 0 {
            return Err(Error::InvalidRing("precision must be at least 1".into()));
        }
        let bits = (prec as f64) * (p as f64).log2();
        if bits >= MAX_MODULUS_BITS as f64 {
            return Err(Error::InvalidRing(format!(
                "p^N = {p}^{prec} exceeds the 2^{MAX_MODULUS_BITS} residue budget"
            )));
        }
        let m = ipow(p, prec);
        let md = Modulus::new(m);
        let pows = (0..=prec).map(|k| ipow(p, k)).collect();

        let (quad_kind, level) = match &kind {
            RingKind::Zp => (None, None),
            RingKind::RamifiedQuad(_) | RingKind::UnramifiedQuad(_) => (Some(kind.clone()), None),
            RingKind::Cyclotomic(l) => (None, Some(*l)),
            RingKind::Composite { quad, level } => {
                if !matches!(**quad, RingKind::RamifiedQuad(_) | RingKind::UnramifiedQuad(_)) {
                    return Err(Error::InvalidRing("composite needs a quadratic factor".into()));
                }
                (Some((**quad).clone()), Some(*level))
            }
        };

        let quad = match quad_kind {
            None => None,
            Some(RingKind::RamifiedQuad([t, n])) => {
                let pi = p as i64;
                let vn = super::modular::vp_u64(n.unsigned_abs(), p);
                if n == 0 || t.rem_euclid(pi) != 0 || vn != 1 {
                    return Err(Error::InvalidRing(format!(
                        "x^2 - {t}x + {n} is not Eisenstein at {p}"
                    )));
                }
                Some(Quad { t: md.from_i128(t as i128), n: md.from_i128(n as i128), ramified: true, n_int: n })
            }
            Some(RingKind::UnramifiedQuad([t, n])) => {
                if !residue_poly_irreducible(p, t, n) {
                    return Err(Error::InvalidRing(format!(
                        "x^2 - {t}x + {n} is reducible mod {p}"
                    )));
                }
                Some(Quad { t: md.from_i128(t as i128), n: md.from_i128(n as i128), ramified: false, n_int: n })
            }
            Some(_) => unreachable!(),
        };

        let level = level.unwrap_or(0);
        let has_cyc = matches!(kind, RingKind::Cyclotomic(_) | RingKind::Composite { .. });
        let (cd, phi, ypow) = if has_cyc && level > 0 {
            let order = ipow(p, level);
            if order > 1 << 14 {
                return Err(Error::InvalidRing(format!("cyclotomic level {level} too large")));
            }
            let step = ipow(p, level - 1) as usize;
            let cd = (p as usize - 1) * step;
            let mut phi = vec![0u128; cd];
            for k in 0..(p as usize - 1) {
                phi[k * step] = 1;
            }
            let mut ypow = Vec::with_capacity(order as usize);
            let mut cur = vec![0u128; cd];
            cur[0] = 1;
            for _ in 0..order {
                ypow.push(cur.clone());
                // multiply by y and reduce
                let top = cur[cd - 1];
                for j in (1..cd).rev() {
                    cur[j] = cur[j - 1];
                }
                cur[0] = 0;
                if top != 0 {
                    for j in 0..cd {
                        cur[j] = md.sub(cur[j], md.mul(top, phi[j]));
                    }
                }
            }
            (cd, phi, ypow)
        } else {
            (1, vec![md.neg(1 % m)], vec![vec![1 % m]])
        };

        let phi_n = if has_cyc && level > 0 { cd as u32 } else { 1 };
        let (e, f) = match &quad {
            None => (phi_n, 1),
            Some(q) if q.ramified => (2 * phi_n, 1),
            Some(_) => (phi_n, 2),
        };

        Ok(RingSpec(Arc::new(SpecInner {
            p,
            prec,
            kind,
            md,
            pows,
            quad,
            level: if has_cyc { level } else { 0 },
            cd,
            phi,
            ypow,
            e,
            f,
        })))
    }

    pub fn zp(p: u64, prec: u32) -> Result<Self> {
        Self::new(p, prec, RingKind::Zp)
    }

    /// Ramified quadratic ring with `pi^2 = pi_sq`.
    pub fn ramified(p: u64, prec: u32, pi_sq: i64) -> Result<Self> {
        Self::new(p, prec, RingKind::RamifiedQuad([0, -pi_sq]))
    }

    /// The unramified quadratic ring defined by the first monic
    /// `x^2 - t*x + n` (small `t`, `n`) irreducible mod `p`.
    pub fn unramified(p: u64, prec: u32) -> Result<Self> {
        let pi = p as i64;
        for t in 0..pi {
            for n in 1..pi {
                if residue_poly_irreducible(p, t, n) {
                    return Self::new(p, prec, RingKind::UnramifiedQuad([t, n]));
                }
            }
        }
        Err(Error::InvalidRing("no irreducible quadratic found".into()))
    }

    pub fn cyclotomic(p: u64, prec: u32, level: u32) -> Result<Self> {
        Self::new(p, prec, RingKind::Cyclotomic(level))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    /// The global precision `N` (elements live mod `p^N`).
    pub fn prec(&self) -> u32 {
        self.0.prec
    }
    pub fn kind(&self) -> &RingKind {
        &self.0.kind
    }
    pub fn modulus(&self) -> u128 {
        self.0.md.m
    }
    pub fn rank(&self) -> usize {
        self.quad_dim() * self.0.cd
    }
    pub(crate) fn quad_dim(&self) -> usize {
        if self.0.quad.is_some() {
            2
        } else {
            1
        }
    }
    pub fn cyclotomic_level(&self) -> u32 {
        self.0.level
    }
    pub fn cyclotomic_degree(&self) -> usize {
        self.0.cd
    }
    /// Ramification index over `Z_p` (for the composite of a ramified
    /// quadratic with a cyclotomic level this is an upper bound).
    pub fn ramification_index(&self) -> u32 {
        self.0.e
    }
    pub fn residue_degree(&self) -> u32 {
        self.0.f
    }
    /// Size of the residue field.
    pub fn residue_size(&self) -> u64 {
        self.0.p.pow(self.0.f)
    }
    pub fn is_ramified_quad(&self) -> bool {
        matches!(self.0.quad, Some(Quad { ramified: true, .. }))
    }
    pub fn is_unramified_quad(&self) -> bool {
        matches!(self.0.quad, Some(Quad { ramified: false, .. }))
    }
    pub fn has_quad(&self) -> bool {
        self.0.quad.is_some()
    }
    pub fn has_cyclotomic(&self) -> bool {
        self.0.level > 0
    }
    /// True when the ring is (a truncation of) the ring of integers of a field,
    /// so valuations are exact.
    pub fn is_field_order(&self) -> bool {
        !(self.has_cyclotomic() && self.is_ramified_quad())
    }

    /// `p^k` as an integer, for `k <= N`.
    pub fn p_pow(&self, k: u32) -> u128 {
        self.0.pows[k as usize]
    }

    /// The same ring kind at a different precision.
    pub fn with_prec(&self, prec: u32) -> Result<Self> {
        Self::new(self.0.p, prec, self.0.kind.clone())
    }

    /// The quadratic sub-ring (or `Z_p`) of a cyclotomic or composite ring.
    pub fn quad_part(&self) -> Result<Self> {
        match &self.0.kind {
            RingKind::Composite { quad, .. } => Self::new(self.0.p, self.0.prec, (**quad).clone()),
            RingKind::Cyclotomic(_) => Self::zp(self.0.p, self.0.prec),
            _ => Ok(self.clone()),
        }
    }

    /// Adjoins `zeta_{p^level}`: the cyclotomic ring over `Z_p`, or the
    /// composite over a quadratic ring.
    pub fn adjoin_zeta(&self, level: u32) -> Result<Self> {
        match &self.0.kind {
            RingKind::Zp | RingKind::Cyclotomic(_) => Self::cyclotomic(self.0.p, self.0.prec, level),
            RingKind::RamifiedQuad(_) | RingKind::UnramifiedQuad(_) => Self::new(
                self.0.p,
                self.0.prec,
                RingKind::Composite { quad: Box::new(self.0.kind.clone()), level },
            ),
            RingKind::Composite { quad, .. } => Self::new(
                self.0.p,
                self.0.prec,
                RingKind::Composite { quad: quad.clone(), level },
            ),
        }
    }

    /// `epsilon = floor(1/((p-1) v_p(P))) + 1` for the prime `P` of the
    /// quadratic (or base) ring, with `v_p(P) = 1/e`.
    pub fn epsilon(&self) -> u32 {
        let e = if self.is_ramified_quad() { 2 } else { 1 };
        (e / (self.0.p as u32 - 1)) + 1
    }
}
