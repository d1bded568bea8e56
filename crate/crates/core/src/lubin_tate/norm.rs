use num_rational::Ratio;

use super::tower::TorsionTower;
use super::{FormalGroup, Variant};
use crate::error::{Error, Result};
use crate::padic::{RingElem, Valuation};
use crate::quotient::{gseries, QuotElem, QuotRing};
use crate::ring::Ring;
use crate::series::TruncSeries;

/// How the product over the non-trivial torsion translates is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    /// Multiply the `q - 1` Galois conjugates of `g(X [+] alpha_1)` over
    /// `O'_1` and descend.
    ConjugateProduct,
    /// Take the determinant of multiplication by `g(X [+] alpha_1)` on
    /// `O[[X]][w]/(pibar_1(w))`.
    CoefficientNorm,
}

/// `N_f g` together with the product it was recovered from.
#[derive(Clone, Debug)]
pub struct ColemanNorm {
    pub method: NormMethod,
    /// `N_f g` modulo `X^D`.
    pub norm: TruncSeries,
    /// `prod_w g(X [+] w) = (N_f g) o f` modulo `X^M`.
    pub product: TruncSeries,
    /// Smallest valuation among the remainders discarded by the descent;
    /// at least `norm.n_eff()` when the descent succeeded.
    pub residual: Valuation,
}

/// `T = X [+]_F alpha_1` over `O'_1`, solved from `f(T) = f(X)`, `T(0) = alpha_1`.
///
/// Writing `[T^j]_k = j alpha^(j-1) t_k + R_jk`, the unknown `t_k` enters
/// degree `k` of `f(T)` through `f'(alpha_1) t_k`. `f'(alpha_1) = pi u` with
/// `u` a unit of `O'_1`, so each step divides coordinatewise by `pi`. Errors
/// in earlier `t_j` reach later steps only through multinomial coefficients
/// divisible by `p`, so the loss stays at one digit.
pub fn torsion_translate(g: &FormalGroup, cap: usize) -> Result<Vec<QuotElem<RingElem>>> {
    let tower = TorsionTower::new_unchecked(g, 1);
    let lvl = tower.level(1);
    let spec = g.spec();
    let fp = g.f_poly();
    let q = fp.len() - 1;
    let alpha = lvl.alpha();
    let zero = alpha.zero_like();
    // f'(alpha) / pi, a unit
    let mut dprime = zero.clone();
    for j in (1..=q).rev() {
        dprime = dprime.mul(&alpha).add(&lvl.from_base(&fp[j].scale(j as i64)));
    }
    let ucoords: Result<Vec<RingElem>> = dprime.coeffs().iter().map(|c| g.div_pi(c)).collect();
    let u = lvl.elem(ucoords?);
    let uinv = lvl.from_base(&spec.one()).div_exact(&u)?;
    let mut apow = vec![lvl.from_base(&spec.one())];
    for j in 1..=q {
        apow.push(apow[j - 1].mul(&alpha));
    }
    let mut t = vec![alpha.clone()];
    // pw[j][k] = [T^j]_k
    let mut pw: Vec<Vec<QuotElem<RingElem>>> = vec![Vec::new(); q + 1];
    for (j, row) in pw.iter_mut().enumerate().skip(1) {
        row.push(apow[j].clone());
    }
    for k in 1..cap {
        t.push(zero.clone());
        for j in 1..=q {
            // [T^j]_k with t_k = 0
            let acc = if j == 1 {
                zero.clone()
            } else {
                let mut a = zero.clone();
                for m in 0..=k {
                    let prev = if j == 2 { &t[k - m] } else { &pw[j - 1][k - m] };
                    a = a.add(&t[m].mul(prev));
                }
                a
            };
            pw[j].push(acc);
        }
        let mut rhs = lvl.from_base(&if k < fp.len() { fp[k].clone() } else { spec.zero() });
        for j in 1..=q {
            if !fp[j].is_zero() {
                rhs = rhs.sub(&pw[j][k].scale(&fp[j]));
            }
        }
        let c: Result<Vec<RingElem>> = rhs.coeffs().iter().map(|c| g.div_pi(c)).collect();
        let tk = lvl.elem(c?).mul(&uinv);
        for j in 1..=q {
            let corr = tk.mul(&apow[j - 1]).scale(&spec.from_int(j as i64));
            pw[j][k] = pw[j][k].add(&corr);
        }
        t[k] = tk;
    }
    let prec = spec.prec().saturating_sub(1);
    Ok(t.into_iter().map(|x| x.with_prec(prec)).collect())
}

/// `prod_{w in F[f], w != 0} h(X [+] w)` as coefficients over `O'_1` still
/// to be multiplied together; returns `h(T)` for `T = X [+] alpha_1`.
fn translate_values(g: &FormalGroup, h: &TruncSeries, cap: usize) -> Result<(TorsionTower, Vec<QuotElem<RingElem>>)> {
    let tower = TorsionTower::new_unchecked(g, 1);
    let lvl = tower.level(1).clone();
    let t = torsion_translate(g, cap)?;
    let outer = h.coeffs();
    let vals = gseries::compose(&outer, &t, cap, |c: &RingElem| lvl.from_base(c));
    Ok((tower, vals))
}

/// `prod_{w in F[f]} h(X [+] w)` modulo `X^cap`, with `h` read as an exact
/// polynomial.
pub fn norm_product(g: &FormalGroup, h: &TruncSeries, cap: usize, method: NormMethod) -> Result<TruncSeries> {
    let spec = g.spec().clone();
    let (tower, vals) = translate_values(g, h, cap)?;
    let lvl = tower.level(1);
    let prec = spec.prec().saturating_sub(1).min(h.n_eff());
    let rest = match method {
        NormMethod::ConjugateProduct => {
            let images = conjugate_images(g, &tower)?;
            let mut acc: Option<Vec<QuotElem<RingElem>>> = None;
            for img in &images {
                let conj: Vec<QuotElem<RingElem>> = vals.iter().map(|c| c.substitute(img)).collect();
                acc = Some(match acc {
                    None => conj,
                    Some(a) => gseries::mul(&a, &conj, cap),
                });
            }
            let prod = acc.expect("q > 1");
            let mut cs = Vec::with_capacity(cap);
            for (k, c) in prod.iter().enumerate() {
                let c = c.with_prec(prec);
                let b = c.as_base().ok_or_else(|| {
                    Error::Descent(format!("conjugate product coefficient {k} does not lie in the base ring"))
                })?;
                cs.push(b);
            }
            TruncSeries::from_coeffs(&spec, &cs, cap)
        }
        NormMethod::CoefficientNorm => {
            let k = lvl.degree();
            let mut parts = Vec::with_capacity(k);
            for i in 0..k {
                let cs: Vec<RingElem> = vals.iter().map(|c| c.coeffs()[i].clone()).collect();
                parts.push(TruncSeries::from_coeffs(&spec, &cs, cap));
            }
            let modulus: Vec<TruncSeries> = lvl.pibar()[..k].iter().map(|c| TruncSeries::constant(c, cap)).collect();
            let ring = QuotRing::new(modulus);
            QuotElem::from_coeffs(&ring, parts).norm()
        }
    };
    Ok(rest.mul(&h.truncate(cap).extend_exact(cap)).with_n_eff(prec))
}

/// Images of `alpha_1` under the automorphisms of `O'_1` over `O`:
/// `zeta alpha_1` for Teichmuller `zeta` (default `f`, where `[zeta](X) = zeta X`),
/// and `(1 + alpha_1)^t - 1` for the multiplicative group.
fn conjugate_images(g: &FormalGroup, tower: &TorsionTower) -> Result<Vec<QuotElem<RingElem>>> {
    let lvl = tower.level(1);
    let alpha = lvl.alpha();
    let spec = g.spec();
    match g.variant() {
        Variant::Default => {
            let mut out = Vec::new();
            for r in spec.residue_reps().into_iter().filter(|r| r.is_unit()) {
                out.push(alpha.scale(&r.teichmuller()?));
            }
            Ok(out)
        }
        Variant::Multiplicative => {
            let one = lvl.from_base(&spec.one());
            let z = one.add(&alpha);
            Ok((1..spec.p()).map(|t| z.pow(t).sub(&one)).collect())
        }
    }
}

/// Recovers `N` with `N o f = P` modulo `X^d_out` by repeated division by
/// the monic `f`: each remainder contributes its constant term and must
/// otherwise vanish. Returns `(N, smallest valuation of the discarded parts)`.
///
/// Unknown coefficients of `P` beyond its cap `M` reach degree `i` of the
/// `k`-th quotient only after `M - (k+1) q - i` degrees of reduction, each
/// gaining `division_rate` in valuation, so `N` is exact to
/// `(M - q d_out) * rate` digits.
pub fn descend_composition(g: &FormalGroup, p: &TruncSeries, d_out: usize) -> Result<(TruncSeries, Valuation)> {
    let spec = g.spec();
    let fp = g.f_poly();
    let q = fp.len() - 1;
    let m = p.cap();
    if m <= q * d_out {
        return Err(Error::Cap(format!("product cap {m} must exceed q D = {}", q * d_out)));
    }
    let tail = ((Ratio::from_integer((m - q * d_out) as i64) * g.division_rate()).floor().to_integer()).max(0) as u32;
    let digits = tail.min(p.n_eff());
    let mut cur: Vec<RingElem> = p.coeffs();
    let mut out = Vec::with_capacity(d_out);
    let mut residual = Valuation::Infinite;
    for _ in 0..d_out {
        // cur = quot * f + rem, from the top
        let mut quot = vec![spec.zero(); cur.len().saturating_sub(q).max(1)];
        for top in (q..cur.len()).rev() {
            let c = cur[top].clone();
            if c.is_zero() {
                continue;
            }
            quot[top - q] = c.clone();
            for (j, fj) in fp.iter().enumerate().take(q) {
                if !fj.is_zero() {
                    cur[top - q + j] = cur[top - q + j].sub_ref(&c.mul_ref(fj));
                }
            }
            cur[top] = spec.zero();
        }
        out.push(cur[0].with_prec(digits));
        for c in cur.iter().take(q.min(cur.len())).skip(1) {
            let v = c.with_prec(digits).valuation();
            if v < residual {
                residual = v;
            }
        }
        cur = quot;
    }
    let n = TruncSeries::from_coeffs(spec, &out, d_out).with_n_eff(digits);
    Ok((n, residual))
}

/// Coleman's norm operator: the series `N_f g` with
/// `(N_f g) o f = prod_{w in F[f]} g(X [+] w)`.
///
/// `g` is read as an exact polynomial of degree below its cap `D`; the
/// result is `N_f g` modulo `X^D`. The product is formed to degree
/// `M = q D + ceil(N / rate)` so that the descent keeps the working digits.
pub fn coleman_norm(g: &FormalGroup, h: &TruncSeries, method: NormMethod) -> Result<ColemanNorm> {
    let c0 = h.coeff(0);
    if !c0.is_zero() && !c0.is_unit() {
        return Err(Error::Domain("N_f needs a unit series or one vanishing at 0".into()));
    }
    let d = h.cap();
    let q = g.q() as usize;
    let rate = g.division_rate();
    let extra = (Ratio::from_integer(g.spec().prec() as i64) / rate).ceil().to_integer() as usize;
    let m = q * d + extra;
    let product = norm_product(g, h, m, method)?;
    let (norm, residual) = descend_composition(g, &product, d)?;
    let target = Valuation::int(norm.n_eff() as i64);
    if residual < target {
        return Err(Error::Descent(format!(
            "product is not a series in f: a discarded remainder has valuation {residual} below {target}"
        )));
    }
    Ok(ColemanNorm { method, norm, product, residual })
}

impl TorsionTower {
    /// The tower without the cap budget check (used internally for level 1).
    pub(crate) fn new_unchecked(g: &FormalGroup, depth: u32) -> Self {
        Self::build(g, depth)
    }
}
