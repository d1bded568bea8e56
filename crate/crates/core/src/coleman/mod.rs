//! Coleman power series: interpolation of norm-compatible systems over the
//! torsion tower, fixed points of the norm operator, and the `tilde-log`
//! map to measures.
//!
//! The relative degree is 1 throughout, so the Frobenius `phi` of the
//! coefficient ring is the identity: a Coleman series satisfies
//! `g(alpha_m) = beta_m` and `N_f g = g`.

mod fixed;
mod tildelog;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lubin_tate::{FormalGroup, TorsionTower, Variant};
use crate::padic::{RingElem, RingSpec, RingSpecJson, Valuation};
use crate::quotient::QuotElem;
use crate::series::TruncSeries;

pub use fixed::{norm_fixed_point, FixedPoint};
pub use tildelog::{mu_zero, mu_zero_pipeline, tilde_log, unit_log, TildeLog};

/// Values `beta_m` in `O'_m = O[X]/(pibar_m)` for `m = 1..=M`.
#[derive(Clone, Debug)]
pub struct CompatibleSystem {
    tower: TorsionTower,
    values: Vec<QuotElem<RingElem>>,
}

impl CompatibleSystem {
    /// Checks that every `beta_m` is a unit and that
    /// `Nm_m(beta_m) = beta_{m-1}` modulo `p^digits` for `m >= 2`.
    pub fn new(tower: &TorsionTower, values: Vec<QuotElem<RingElem>>, digits: u32) -> Result<Self> {
        let sys = Self::unchecked(tower, values)?;
        for (i, v) in sys.norm_defects()?.into_iter().enumerate() {
            if v < Valuation::int(digits as i64) {
                return Err(Error::Domain(format!(
                    "Nm(beta_{}) differs from beta_{} at valuation {v}, below {digits}",
                    i + 2,
                    i + 1
                )));
            }
        }
        Ok(sys)
    }

    /// A system with only the shape and unit checks (the round trip through
    /// [`interpolate`] does not need compatibility).
    pub fn unchecked(tower: &TorsionTower, values: Vec<QuotElem<RingElem>>) -> Result<Self> {
        if values.len() != tower.depth() as usize {
            return Err(Error::Domain(format!("{} values for a tower of depth {}", values.len(), tower.depth())));
        }
        for (i, v) in values.iter().enumerate() {
            let lvl = tower.level(i as u32 + 1);
            if v.coeffs().len() != lvl.degree() {
                return Err(Error::RingMismatch(format!("beta_{} is not in O'_{}", i + 1, i + 1)));
            }
            if !v.norm().is_unit() {
                return Err(Error::Domain(format!("beta_{} is not a unit", i + 1)));
            }
        }
        let values = values.iter().enumerate().map(|(i, v)| tower.level(i as u32 + 1).elem(v.coeffs().to_vec())).collect();
        Ok(CompatibleSystem { tower: tower.clone(), values })
    }

    /// `beta_m = g(alpha_m)`, each known to `min(N_eff, floor(D v(alpha_m)))`
    /// digits.
    pub fn from_series(tower: &TorsionTower, g: &TruncSeries) -> Result<Self> {
        if g.spec() != tower.spec() {
            return Err(Error::RingMismatch("series and tower rings differ".into()));
        }
        let values = tower.levels().iter().map(|l| l.eval_series(g)).collect();
        Self::unchecked(tower, values)
    }

    /// The constant system `beta_m = teichmuller(c)`, compatible because
    /// `omega(c)^q = omega(c)`.
    pub fn teichmuller(tower: &TorsionTower, c: &RingElem) -> Result<Self> {
        let w = c.teichmuller()?;
        let values = tower.levels().iter().map(|l| l.from_base(&w)).collect();
        Self::new(tower, values, tower.spec().prec())
    }

    pub fn tower(&self) -> &TorsionTower {
        &self.tower
    }
    pub fn values(&self) -> &[QuotElem<RingElem>] {
        &self.values
    }

    /// Valuations of `Nm_m(beta_m) - beta_{m-1}` for `m = 2..=M`.
    pub fn norm_defects(&self) -> Result<Vec<Valuation>> {
        let mut out = Vec::new();
        for m in 2..=self.tower.depth() {
            let n = self.tower.norm_down(m, &self.values[m as usize - 1])?;
            let n = n.as_level().expect("level above 1");
            let d = n.sub(&self.values[m as usize - 2]);
            let prec = n.prec().min(self.values[m as usize - 2].prec());
            out.push(match d.min_coord_valuation() {
                Valuation::Infinite => Valuation::int(prec as i64),
                v => v.min(Valuation::int(prec as i64)),
            });
        }
        Ok(out)
    }

    pub fn to_json(&self, group: &FormalGroup) -> SystemJson {
        SystemJson {
            ring: self.tower.spec().to_json(),
            variant: group.variant(),
            group_cap: group.cap(),
            levels: self.values.iter().map(|v| v.coeffs().iter().map(|c| c.coords().to_vec()).collect()).collect(),
            prec: self.values.iter().map(|v| v.prec()).collect(),
        }
    }

    /// Rebuilds the group, its tower and the system.
    pub fn from_json(j: &SystemJson) -> Result<(FormalGroup, Self)> {
        let spec = RingSpec::from_json(&j.ring)?;
        let group = match j.variant {
            Variant::Default => FormalGroup::default_for(&spec, j.group_cap)?,
            Variant::Multiplicative => FormalGroup::multiplicative(&spec, j.group_cap)?,
        };
        let tower = TorsionTower::new(&group, j.levels.len() as u32)?;
        if j.prec.len() != j.levels.len() {
            return Err(Error::Format("one precision per level is required".into()));
        }
        let mut values = Vec::new();
        for (m, (lv, &pr)) in j.levels.iter().zip(&j.prec).enumerate() {
            let lvl = tower.level(m as u32 + 1);
            if lv.len() != lvl.degree() {
                return Err(Error::Format(format!("level {} needs {} coordinates", m + 1, lvl.degree())));
            }
            let c: Result<Vec<RingElem>> = lv.iter().map(|x| RingElem::from_json_in(&spec, x, Some(pr))).collect();
            values.push(lvl.elem(c?));
        }
        let sys = Self::new(&tower, values, 1)?;
        Ok((group, sys))
    }
}

/// Serialized system: ring, group, and `beta_m` as coordinate vectors in the
/// basis `1, alpha_m, alpha_m^2, ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemJson {
    pub ring: RingSpecJson,
    pub variant: Variant,
    pub group_cap: usize,
    /// `levels[m-1][i]` is the coordinate of `alpha_m^i` in `beta_m`.
    pub levels: Vec<Vec<Vec<u128>>>,
    /// Digits to which each level is known.
    pub prec: Vec<u32>,
}

/// The interpolating polynomial and the ideal it is unique modulo.
#[derive(Clone, Debug)]
pub struct Interpolation {
    /// `g` with `g(alpha_m) = beta_m`, of degree below `deg prod pibar_m`.
    pub series: TruncSeries,
    /// `prod_{m <= M} pibar_m`, monic.
    pub modulus: Vec<RingElem>,
    /// Digits of `g`: the result is unique in `(modulus, p^digits)`.
    pub digits: u32,
}

/// Newton form of the Chinese remainder theorem over the tower:
/// `h_m = h_{m-1} + P_{m-1} s_m` with `P_{m-1} = prod_{k<m} pibar_k` and
/// `s_m = (beta_m - h_{m-1}(alpha_m)) / P_{m-1}(alpha_m)` in `O'_m`.
///
/// The `pibar_m` are all `X^deg` modulo `p`, so `P_{m-1}(alpha_m)` is not a
/// unit and the division is exact division in the valuation ring `O'_m`;
/// it fails when `beta_m` is not congruent to `h_{m-1}(alpha_m)` to the
/// required valuation. Each division loses `v(Norm P_{m-1}(alpha_m))` digits.
pub fn interpolate(sys: &CompatibleSystem) -> Result<Interpolation> {
    let tower = &sys.tower;
    let spec = tower.spec();
    let mut h = vec![spec.zero()];
    let mut modulus = vec![spec.one()];
    for m in 1..=tower.depth() {
        let lvl = tower.level(m);
        let alpha = lvl.alpha();
        let diff = sys.values[m as usize - 1].sub(&alpha.eval_poly(&h));
        let pm = alpha.eval_poly(&modulus);
        let s = diff.div_exact(&pm).map_err(|e| match e {
            Error::NotDivisible(d) => Error::Domain(format!(
                "level {m}: beta_{m} - h(alpha_{m}) is not divisible by the lower moduli ({d})"
            )),
            e => e,
        })?;
        let step = poly_mul(&modulus, s.coeffs());
        h = poly_add(&h, &step);
        modulus = poly_mul(&modulus, lvl.pibar());
    }
    let deg = modulus.len() - 1;
    h.resize(deg.max(1), spec.zero());
    let digits = h.iter().map(|c| c.prec()).min().unwrap_or(0);
    let series = TruncSeries::from_coeffs(spec, &h, deg.max(1)).with_n_eff(digits);
    Ok(Interpolation { series, modulus, digits })
}

/// `g mod P` for monic `P`, with `g` read as an exact polynomial.
pub fn reduce_mod(g: &TruncSeries, modulus: &[RingElem]) -> TruncSeries {
    let spec = g.spec();
    let k = modulus.len() - 1;
    let mut c = g.coeffs();
    for top in (k..c.len()).rev() {
        let lead = c[top].clone();
        if lead.is_zero() {
            continue;
        }
        for (j, mj) in modulus.iter().enumerate().take(k) {
            let idx = top - k + j;
            c[idx] = c[idx].sub_ref(&lead.mul_ref(mj));
        }
        c[top] = spec.zero();
    }
    c.truncate(k.max(1));
    TruncSeries::from_coeffs(spec, &c, k.max(1)).with_n_eff(g.n_eff())
}

fn poly_mul(a: &[RingElem], b: &[RingElem]) -> Vec<RingElem> {
    crate::quotient::gseries::mul(a, b, a.len() + b.len() - 1)
}

fn poly_add(a: &[RingElem], b: &[RingElem]) -> Vec<RingElem> {
    let zero = a[0].spec().zero();
    (0..a.len().max(b.len()))
        .map(|i| a.get(i).unwrap_or(&zero).add_ref(b.get(i).unwrap_or(&zero)))
        .collect()
}
