use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;

use super::modular::vp;
use super::spec::RingSpec;
use crate::error::{Error, Result};

/// A p-adic valuation normalised by `v(p) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(Ratio<i64>),
    Infinite,
}

impl Valuation {
    pub fn int(k: i64) -> Self {
        Valuation::Finite(Ratio::from_integer(k))
    }
    pub fn finite(self) -> Option<Ratio<i64>> {
        match self {
            Valuation::Finite(r) => Some(r),
            Valuation::Infinite => None,
        }
    }
    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(r) => write!(f, "{r}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// An element of `O/p^N` known modulo `p^prec`.
///
/// Coordinates are canonical residues modulo `p^prec`; two elements compare
/// equal when they agree modulo `p^min(prec)`.
#[derive(Clone)]
pub struct RingElem {
    pub(crate) spec: RingSpec,
    pub(crate) coords: Vec<u128>,
    pub(crate) prec: u32,
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)?;
        if self.prec < self.spec.prec() {
            write!(f, "+O(p^{})", self.prec)?;
        }
        Ok(())
    }
}

impl PartialEq for RingElem {
    fn eq(&self, other: &Self) -> bool {
        if self.spec != other.spec {
            return false;
        }
        let k = self.prec.min(other.prec);
        let pk = self.spec.p_pow(k);
        self.coords.iter().zip(&other.coords).all(|(a, b)| a % pk == b % pk)
    }
}

impl RingSpec {
    pub fn zero(&self) -> RingElem {
        RingElem { spec: self.clone(), coords: vec![0; self.rank()], prec: self.prec() }
    }

    pub fn one(&self) -> RingElem {
        self.from_int(1)
    }

    pub fn from_int(&self, x: i64) -> RingElem {
        let mut z = self.zero();
        z.coords[0] = self.0.md.from_i128(x as i128);
        z
    }

    pub fn from_u128(&self, x: u128) -> RingElem {
        let mut z = self.zero();
        z.coords[0] = x % self.modulus();
        z
    }

    /// Builds an element from signed coordinates in the canonical basis.
    pub fn from_coords(&self, coords: &[i64]) -> Result<RingElem> {
        if coords.len() != self.rank() {
            return Err(Error::RingMismatch(format!(
                "expected {} coordinates, got {}",
                self.rank(),
                coords.len()
            )));
        }
        Ok(RingElem {
            spec: self.clone(),
            coords: coords.iter().map(|&c| self.0.md.from_i128(c as i128)).collect(),
            prec: self.prec(),
        })
    }

    pub fn from_residues(&self, coords: Vec<u128>, prec: u32) -> Result<RingElem> {
        if coords.len() != self.rank() {
            return Err(Error::RingMismatch("coordinate count".into()));
        }
        let prec = prec.min(self.prec());
        let pk = self.p_pow(prec);
        Ok(RingElem { spec: self.clone(), coords: coords.into_iter().map(|c| c % pk).collect(), prec })
    }

    /// The class of `x` in the quadratic factor (the uniformizer for ramified
    /// kinds).
    pub fn quad_gen(&self) -> Result<RingElem> {
        if !self.has_quad() {
            return Err(Error::Domain("ring has no quadratic generator".into()));
        }
        let mut z = self.zero();
        z.coords[1] = 1;
        Ok(z)
    }

    /// The class of `y`, a primitive `p^level`-th root of unity.
    pub fn zeta(&self) -> Result<RingElem> {
        if !self.has_cyclotomic() {
            return Err(Error::Domain("ring has no cyclotomic generator".into()));
        }
        let mut z = self.zero();
        if self.0.cd > 1 {
            z.coords[self.quad_dim()] = 1;
        } else {
            // level 1 at p = 2: zeta_2 = -1
            z.coords[0] = self.0.md.neg(1);
        }
        Ok(z)
    }

    /// `zeta^k` for any integer exponent.
    pub fn zeta_pow(&self, k: i64) -> Result<RingElem> {
        if !self.has_cyclotomic() {
            return Err(Error::Domain("ring has no cyclotomic generator".into()));
        }
        let order = self.0.ypow.len() as i64;
        let kk = k.rem_euclid(order) as usize;
        let mut z = self.zero();
        let qd = self.quad_dim();
        for (j, &c) in self.0.ypow[kk].iter().enumerate() {
            z.coords[qd * j] = c;
        }
        Ok(z)
    }

    /// A uniformizer of the quadratic (or base) ring: `x` when ramified, `p`
    /// otherwise.
    pub fn uniformizer(&self) -> RingElem {
        if self.is_ramified_quad() {
            self.quad_gen().unwrap()
        } else {
            self.from_int(self.p() as i64)
        }
    }

    /// Lifts of the residue field: all `a + b*x` with `0 <= a, b < p` for
    /// unramified kinds, `0 <= a < p` otherwise.
    pub fn residue_reps(&self) -> Vec<RingElem> {
        let p = self.p() as i64;
        let mut out = Vec::new();
        if self.is_unramified_quad() {
            for b in 0..p {
                for a in 0..p {
                    let mut z = self.from_int(a);
                    z.coords[1] = b as u128;
                    out.push(z);
                }
            }
        } else {
            for a in 0..p {
                out.push(self.from_int(a));
            }
        }
        out
    }
}

impl RingElem {
    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }
    pub fn coords(&self) -> &[u128] {
        &self.coords
    }
    /// Absolute precision: the element is known modulo `p^prec`.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Coordinates as signed residues in `(-p^prec/2, p^prec/2]`.
    pub fn signed_coords(&self) -> Vec<i128> {
        let pk = self.spec.p_pow(self.prec) as i128;
        self.coords
            .iter()
            .map(|&c| {
                let c = c as i128;
                if 2 * c > pk {
                    c - pk
                } else {
                    c
                }
            })
            .collect()
    }

    /// Forgets digits beyond `p^k`.
    pub fn with_prec(&self, k: u32) -> RingElem {
        let k = k.min(self.prec);
        let pk = self.spec.p_pow(k);
        RingElem { spec: self.spec.clone(), coords: self.coords.iter().map(|c| c % pk).collect(), prec: k }
    }

    /// Declares the element known to full precision (digits above the current
    /// precision are taken as zero). Used where an a-priori error bound
    /// replaces step-by-step bookkeeping.
    pub(crate) fn assume_prec(&self, k: u32) -> RingElem {
        RingElem { spec: self.spec.clone(), coords: self.coords.clone(), prec: k.min(self.spec.prec()) }
    }

    fn check_spec(&self, other: &RingElem) {
        assert!(
            self.spec == other.spec,
            "ring mismatch: {:?} vs {:?}",
            self.spec,
            other.spec
        );
    }

    fn canon(spec: &RingSpec, mut coords: Vec<u128>, prec: u32) -> RingElem {
        if prec < spec.prec() {
            let pk = spec.p_pow(prec);
            for c in coords.iter_mut() {
                *c %= pk;
            }
        }
        RingElem { spec: spec.clone(), coords, prec }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self == &self.spec.one()
    }

    /// Smallest p-adic valuation among the coordinates (`None` if all vanish).
    pub fn content(&self) -> Option<u32> {
        self.coords.iter().filter_map(|&c| vp(c, self.spec.p())).min()
    }

    /// Content valuation capped at the known precision.
    pub(crate) fn content_capped(&self) -> u32 {
        self.content().unwrap_or(self.prec).min(self.prec)
    }

    pub fn add_ref(&self, o: &RingElem) -> RingElem {
        self.check_spec(o);
        let md = &self.spec.0.md;
        let coords = self.coords.iter().zip(&o.coords).map(|(&a, &b)| md.add(a, b)).collect();
        Self::canon(&self.spec, coords, self.prec.min(o.prec))
    }

    pub fn sub_ref(&self, o: &RingElem) -> RingElem {
        self.check_spec(o);
        let md = &self.spec.0.md;
        let coords = self.coords.iter().zip(&o.coords).map(|(&a, &b)| md.sub(a, b)).collect();
        Self::canon(&self.spec, coords, self.prec.min(o.prec))
    }

    pub fn neg_ref(&self) -> RingElem {
        let md = &self.spec.0.md;
        let coords = self.coords.iter().map(|&a| md.neg(a)).collect();
        Self::canon(&self.spec, coords, self.prec)
    }

    pub fn mul_ref(&self, o: &RingElem) -> RingElem {
        self.check_spec(o);
        let n = self.spec.prec();
        let prec = if self.prec >= n && o.prec >= n {
            n
        } else {
            (self.prec + o.content_capped()).min(o.prec + self.content_capped()).min(n)
        };
        let coords = raw_mul(&self.spec, &self.coords, &o.coords);
        Self::canon(&self.spec, coords, prec)
    }

    /// Multiplication by an integer.
    pub fn scale(&self, k: i64) -> RingElem {
        let md = &self.spec.0.md;
        let kk = md.from_i128(k as i128);
        let coords = self.coords.iter().map(|&a| md.mul(a, kk)).collect();
        let n = self.spec.prec();
        let prec = if self.prec >= n {
            n
        } else {
            (self.prec + vp(k.unsigned_abs() as u128, self.spec.p()).unwrap_or(n)).min(n)
        };
        Self::canon(&self.spec, coords, prec)
    }

    pub(crate) fn scale_residue(&self, k: u128) -> RingElem {
        let md = &self.spec.0.md;
        let coords = self.coords.iter().map(|&a| md.mul(a, k)).collect();
        Self::canon(&self.spec, coords, self.prec)
    }

    pub fn pow(&self, mut e: u64) -> RingElem {
        let mut r = self.spec.one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul_ref(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul_ref(&b);
            }
        }
        r
    }

    /// Exact division by `p^s`; the quotient is known to `prec - s` digits.
    pub fn div_p_pow(&self, s: u32) -> Result<RingElem> {
        if s == 0 {
            return Ok(self.clone());
        }
        if s > self.prec {
            return Err(Error::Precision(format!(
                "dividing by p^{s} an element known only mod p^{}",
                self.prec
            )));
        }
        let ps = self.spec.p_pow(s);
        if self.coords.iter().any(|&c| c % ps != 0) {
            return Err(Error::NotDivisible(format!("{self:?} by p^{s}")));
        }
        let coords = self.coords.iter().map(|&c| c / ps).collect();
        Ok(Self::canon(&self.spec, coords, self.prec - s))
    }

    /// Division by `p^s` that keeps the nominal precision. Callers account for
    /// the lost digits through an a-priori bound.
    pub(crate) fn div_p_pow_raw(&self, s: u32) -> Result<RingElem> {
        let ps = self.spec.p_pow(s);
        if self.coords.iter().any(|&c| c % ps != 0) {
            return Err(Error::NotDivisible(format!("{self:?} by p^{s}")));
        }
        Ok(RingElem {
            spec: self.spec.clone(),
            coords: self.coords.iter().map(|&c| c / ps).collect(),
            prec: self.prec,
        })
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse(&self) -> Result<RingElem> {
        let (adj, nrm) = self.adjugate_norm();
        let md = &self.spec.0.md;
        if nrm.coords[1..].iter().any(|&c| c != 0) {
            return Err(Error::Domain("norm did not descend to Z_p".into()));
        }
        let ni = md
            .inv(nrm.coords[0])
            .ok_or_else(|| Error::Domain(format!("{self:?} is not a unit")))?;
        Ok(adj.scale_residue(ni).with_prec(self.prec))
    }

    /// Exact division `self / d` for `d` a nonzero element of a field order.
    pub fn div_exact(&self, d: &RingElem) -> Result<RingElem> {
        let (adj, nrm) = d.adjugate_norm();
        let num = self.mul_ref(&adj);
        let n0 = nrm.coords[0];
        if nrm.coords[1..].iter().any(|&c| c != 0) {
            return Err(Error::Domain("norm did not descend to Z_p".into()));
        }
        let s = vp(n0, self.spec.p())
            .ok_or_else(|| Error::Precision("divisor vanishes at this precision".into()))?;
        if s >= d.prec {
            return Err(Error::Precision("divisor vanishes at this precision".into()));
        }
        let unit = n0 / self.spec.p_pow(s);
        let ui = self.spec.0.md.inv(unit).expect("unit part");
        num.div_p_pow(s).map(|x| x.scale_residue(ui))
    }

    /// `(adj(x), N(x))` with `x * adj(x) = N(x)` and `N(x)` the norm to `Z_p`.
    pub(crate) fn adjugate_norm(&self) -> (RingElem, RingElem) {
        let autos = self.spec.automorphisms();
        let mut adj = self.spec.one();
        for a in autos.iter().skip(1) {
            adj = adj.mul_ref(&a.apply(self));
        }
        let nrm = adj.mul_ref(self);
        (adj, nrm)
    }

    /// Exact valuation (a lower bound in composite rings that are not
    /// fields).
    pub fn valuation(&self) -> Valuation {
        let spec = &self.spec;
        let p = spec.p();
        if self.is_zero() {
            return Valuation::Infinite;
        }
        let qd = spec.quad_dim();
        let cd = spec.0.cd;
        let mut best: Option<Ratio<i64>> = None;
        for i in 0..qd {
            let comp: Vec<u128> = (0..cd).map(|j| self.coords[i + qd * j]).collect();
            let v = cyc_component_valuation(spec, &comp);
            if let Some(v) = v {
                let shift = if spec.is_ramified_quad() && i == 1 { Ratio::new(1, 2) } else { Ratio::from_integer(0) };
                let w = v + shift;
                best = Some(best.map_or(w, |b: Ratio<i64>| b.min(w)));
            }
        }
        let _ = p;
        match best {
            Some(v) => Valuation::Finite(v),
            None => Valuation::Infinite,
        }
    }

    /// True when the element is a unit.
    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::int(0)
    }

    /// Component `i` (quadratic index) at cyclotomic index `j`.
    pub fn coord(&self, i: usize, j: usize) -> u128 {
        self.coords[i + self.spec.quad_dim() * j]
    }

    /// Re-embeds into a ring of the same prime and precision that contains
    /// this one (`Z_p` into anything, quadratic into composite, cyclotomic
    /// into a composite or higher level).
    pub fn embed(&self, target: &RingSpec) -> Result<RingElem> {
        let s = &self.spec;
        if s == target {
            return Ok(self.clone());
        }
        if s.p() != target.p() || s.prec() != target.prec() {
            return Err(Error::RingMismatch(format!("cannot embed {s:?} into {target:?}")));
        }
        let mut z = target.zero();
        z.prec = self.prec;
        let sq = s.quad_dim();
        let tq = target.quad_dim();
        if sq == 2 && (tq != 2 || s.quad_part()? != target.quad_part()?) {
            return Err(Error::RingMismatch(format!("cannot embed {s:?} into {target:?}")));
        }
        let sl = s.cyclotomic_level();
        let tl = target.cyclotomic_level();
        if sl > tl {
            return Err(Error::RingMismatch(format!("cannot embed {s:?} into {target:?}")));
        }
        let md = &target.0.md;
        let ratio = (s.p() as usize).pow(tl - sl);
        for i in 0..sq {
            for j in 0..s.0.cd {
                let c = self.coords[i + sq * j];
                if c == 0 {
                    continue;
                }
                // y_s = y_t^ratio
                let row = if s.has_cyclotomic() { &target.0.ypow[(j * ratio) % target.0.ypow.len()] } else { &target.0.ypow[0] };
                for (k, &r) in row.iter().enumerate() {
                    let idx = i + tq * k;
                    z.coords[idx] = md.add(z.coords[idx], md.mul(c, r));
                }
            }
        }
        Ok(RingElem::canon(target, z.coords, self.prec))
    }

    /// Projects onto a sub-ring, failing if the element does not lie in it.
    pub fn descend(&self, target: &RingSpec) -> Result<RingElem> {
        let s = &self.spec;
        if s == target {
            return Ok(self.clone());
        }
        let tq = target.quad_dim();
        let sq = s.quad_dim();
        if target.has_cyclotomic() {
            return Err(Error::RingMismatch("descent target must be Z_p or quadratic".into()));
        }
        for (idx, &c) in self.coords.iter().enumerate() {
            let (i, j) = (idx % sq, idx / sq);
            if (j > 0 || i >= tq) && c != 0 {
                return Err(Error::Descent(format!("component ({i},{j}) is nonzero in {self:?}")));
            }
        }
        let mut coords = vec![0; target.rank()];
        coords[..tq].copy_from_slice(&self.coords[..tq]);
        Ok(RingElem { spec: target.clone(), coords, prec: self.prec })
    }
}

fn cyc_component_valuation(spec: &RingSpec, comp: &[u128]) -> Option<Ratio<i64>> {
    let p = spec.p();
    let cd = comp.len();
    if cd == 1 {
        return vp(comp[0], p).map(|v| Ratio::from_integer(v as i64));
    }
    // rewrite in the basis (y - 1)^i
    let md = &spec.0.md;
    let mut b = comp.to_vec();
    for k in 0..cd {
        for i in (k..cd - 1).rev() {
            b[i] = md.add(b[i], b[i + 1]);
        }
    }
    b.iter()
        .enumerate()
        .filter_map(|(i, &c)| vp(c, p).map(|v| Ratio::new(v as i64 * cd as i64 + i as i64, cd as i64)))
        .min()
}

/// Ring multiplication on raw coordinate vectors.
pub(crate) fn raw_mul(spec: &RingSpec, a: &[u128], b: &[u128]) -> Vec<u128> {
    let md = &spec.0.md;
    let qd = spec.quad_dim();
    let cd = spec.0.cd;
    if qd == 1 && cd == 1 {
        return vec![md.mul(a[0], b[0])];
    }
    if cd == 1 {
        let q = spec.0.quad.as_ref().unwrap();
        let a0b0 = md.mul(a[0], b[0]);
        let a1b1 = md.mul(a[1], b[1]);
        let mid = md.add(md.mul(a[0], b[1]), md.mul(a[1], b[0]));
        return vec![md.sub(a0b0, md.mul(q.n, a1b1)), md.add(mid, md.mul(q.t, a1b1))];
    }
    // bivariate product in x (degree < 3) and y (degree < 2cd - 1)
    let w = 2 * cd - 1;
    let xd = 2 * qd - 1;
    let mut prod = vec![0u128; xd * w];
    for ia in 0..qd {
        for ja in 0..cd {
            let ca = a[ia + qd * ja];
            if ca == 0 {
                continue;
            }
            for ib in 0..qd {
                for jb in 0..cd {
                    let cb = b[ib + qd * jb];
                    if cb == 0 {
                        continue;
                    }
                    let idx = (ia + ib) * w + ja + jb;
                    prod[idx] = md.add(prod[idx], md.mul(ca, cb));
                }
            }
        }
    }
    let phi = &spec.0.phi;
    for i in 0..xd {
        for j in (cd..w).rev() {
            let c = prod[i * w + j];
            if c == 0 {
                continue;
            }
            prod[i * w + j] = 0;
            for (k, &ph) in phi.iter().enumerate() {
                if ph != 0 {
                    let idx = i * w + j - cd + k;
                    prod[idx] = md.sub(prod[idx], md.mul(c, ph));
                }
            }
        }
    }
    if qd == 2 {
        let q = spec.0.quad.as_ref().unwrap();
        for j in 0..cd {
            let c = prod[2 * w + j];
            if c != 0 {
                prod[w + j] = md.add(prod[w + j], md.mul(q.t, c));
                prod[j] = md.sub(prod[j], md.mul(q.n, c));
            }
        }
    }
    let mut out = vec![0u128; qd * cd];
    for i in 0..qd {
        for j in 0..cd {
            out[i + qd * j] = prod[i * w + j];
        }
    }
    out
}

/// A ring automorphism over `Z_p`: optional quadratic conjugation composed
/// with `zeta -> zeta^a`.
#[derive(Clone, Copy, Debug)]
pub struct Automorphism {
    pub conj: bool,
    pub a: u64,
}

impl RingSpec {
    /// The automorphism group over `Z_p`, identity first.
    pub fn automorphisms(&self) -> Vec<Automorphism> {
        let conjs: &[bool] = if self.has_quad() { &[false, true] } else { &[false] };
        let exps: Vec<u64> = if self.has_cyclotomic() {
            let order = self.0.ypow.len() as u64;
            (1..order).filter(|a| a % self.p() != 0).collect()
        } else {
            vec![1]
        };
        let mut out = Vec::new();
        for &c in conjs {
            for &a in &exps {
                out.push(Automorphism { conj: c, a });
            }
        }
        out
    }

    /// The cyclotomic automorphisms only (fixing the quadratic part).
    pub fn cyclotomic_automorphisms(&self) -> Vec<Automorphism> {
        self.automorphisms().into_iter().filter(|a| !a.conj).collect()
    }
}

impl Automorphism {
    pub fn apply(&self, x: &RingElem) -> RingElem {
        let spec = &x.spec;
        let md = &spec.0.md;
        let qd = spec.quad_dim();
        let cd = spec.0.cd;
        let mut coords = x.coords.clone();
        if self.conj {
            let q = spec.0.quad.as_ref().unwrap();
            for j in 0..cd {
                let (a, b) = (coords[qd * j], coords[1 + qd * j]);
                coords[qd * j] = md.add(a, md.mul(b, q.t));
                coords[1 + qd * j] = md.neg(b);
            }
        }
        if spec.has_cyclotomic() && self.a != 1 {
            let order = spec.0.ypow.len();
            let mut out = vec![0u128; coords.len()];
            for i in 0..qd {
                for j in 0..cd {
                    let c = coords[i + qd * j];
                    if c == 0 {
                        continue;
                    }
                    let row = &spec.0.ypow[(j * self.a as usize) % order];
                    for (k, &r) in row.iter().enumerate() {
                        if r != 0 {
                            let idx = i + qd * k;
                            out[idx] = md.add(out[idx], md.mul(c, r));
                        }
                    }
                }
            }
            coords = out;
        }
        RingElem::canon(spec, coords, x.prec)
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $m:ident) => {
        impl $tr<&RingElem> for &RingElem {
            type Output = RingElem;
            fn $f(self, o: &RingElem) -> RingElem {
                self.$m(o)
            }
        }
        impl $tr<RingElem> for RingElem {
            type Output = RingElem;
            fn $f(self, o: RingElem) -> RingElem {
                self.$m(&o)
            }
        }
        impl $tr<&RingElem> for RingElem {
            type Output = RingElem;
            fn $f(self, o: &RingElem) -> RingElem {
                self.$m(o)
            }
        }
    };
}
binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        self.neg_ref()
    }
}
impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        self.neg_ref()
    }
}

/// `out += a * b` on raw coordinate vectors.
#[inline]
pub(crate) fn mul_acc(spec: &RingSpec, a: &[u128], b: &[u128], out: &mut [u128]) {
    let md = &spec.0.md;
    match (spec.quad_dim(), spec.0.cd) {
        (1, 1) => out[0] = md.add(out[0], md.mul(a[0], b[0])),
        (2, 1) => {
            let q = spec.0.quad.as_ref().unwrap();
            let a1b1 = md.mul(a[1], b[1]);
            out[0] = md.add(out[0], md.sub(md.mul(a[0], b[0]), md.mul(q.n, a1b1)));
            let mid = md.add(md.mul(a[0], b[1]), md.mul(a[1], b[0]));
            out[1] = md.add(out[1], md.add(mid, md.mul(q.t, a1b1)));
        }
        _ => {
            let prod = raw_mul(spec, a, b);
            for (o, x) in out.iter_mut().zip(prod) {
                *o = md.add(*o, x);
            }
        }
    }
}

impl RingElem {
    /// Exact division by the uniformizer of a ramified quadratic ring, or by
    /// `p` otherwise. Loses one digit of stored precision.
    pub fn div_uniformizer(&self) -> Result<RingElem> {
        let spec = &self.spec;
        if !spec.is_ramified_quad() {
            return self.div_p_pow(1);
        }
        // 1/pi = (t - pi)/n with n = p * unit
        let q = spec.0.quad.as_ref().unwrap();
        let mut conj = spec.zero();
        conj.coords[0] = q.t;
        conj.coords[1] = spec.0.md.neg(1);
        let num = self.mul_ref(&conj);
        let u = spec.0.md.from_i128((q.n_int / spec.p() as i64) as i128);
        let ui = spec.0.md.inv(u).ok_or_else(|| Error::Domain("Eisenstein constant".into()))?;
        num.div_p_pow(1).map(|x| x.scale_residue(ui))
    }
}
