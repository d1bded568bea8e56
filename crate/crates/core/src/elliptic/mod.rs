//! Complex lattice functions: `sigma`, the quasi-period form `eta`, `Delta`,
//! `wp`, Robert's `theta` and `psi`.
//!
//! Every lattice is evaluated through a reduced basis with `tau` in the
//! standard fundamental domain, so `|q| <= exp(-pi sqrt 3)` and the
//! `q`-expansions converge geometrically. Values depend only on the lattice;
//! `eta_1, eta_2` are reported for the basis the caller gave.


use std::f64::consts::PI;

use num_complex::Complex64 as C;

use crate::error::{Error, Result};

const I: C = C { re: 0.0, im: 1.0 };
/// Truncation: a `q`-series term is dropped once its size is below this
/// fraction of the running sum.
const EPS: f64 = 1e-18;
/// Distance to the lattice, relative to the shortest vector, treated as a pole.
const POLE_TOL: f64 = 1e-10;

fn two_pi_i() -> C {
    C::new(0.0, 2.0 * PI)
}

/// `sum_{n >= 1} n^k q^n / (1 - q^n)`, the `q`-expansion of `sum sigma_k(n) q^n`.
fn lambert(q: C, k: i32) -> C {
    let mut s = C::new(0.0, 0.0);
    let mut qn = q;
    for n in 1..10_000 {
        let t = qn * (n as f64).powi(k) / (C::new(1.0, 0.0) - qn);
        s += t;
        if t.norm() <= EPS * s.norm().max(1.0) {
            break;
        }
        qn *= q;
    }
    s
}

/// `prod_{n >= 1} (1 - q^n)`, stopped after `terms` factors or at `EPS`.
fn euler_product(q: C, terms: usize) -> C {
    let mut p = C::new(1.0, 0.0);
    let mut qn = q;
    for _ in 0..terms {
        p *= C::new(1.0, 0.0) - qn;
        if qn.norm() <= EPS {
            break;
        }
        qn *= q;
    }
    p
}

/// A lattice `Z w1 + Z w2` with `Im(w1 / w2) > 0`.
#[derive(Clone, Debug)]
pub struct Lattice {
    w1: C,
    w2: C,
    /// Reduced basis with `tau_r = r1 / r2` in the fundamental domain.
    r1: C,
    r2: C,
    q: C,
    delta: C,
    /// Quasi-periods of the reduced basis.
    e1: C,
    e2: C,
    a: f64,
    legendre_defect: f64,
}

impl Lattice {
    pub fn new(w1: C, w2: C) -> Result<Self> {
        if !(w1.is_finite() && w2.is_finite()) || w2.norm() == 0.0 {
            return Err(Error::Domain("lattice periods must be finite and nonzero".into()));
        }
        let tau = w1 / w2;
        if tau.im <= 1e-12 * tau.norm().max(1.0) {
            return Err(Error::Domain(format!("Im(w1/w2) = {} must be positive", tau.im)));
        }
        let (r1, r2) = reduce(w1, w2);
        let t = r1 / r2;
        let q = (two_pi_i() * t).exp();
        if q.norm() >= 0.5 {
            return Err(Error::Domain(format!("|q| = {} too close to 1 after reduction", q.norm())));
        }
        let delta = two_pi_i().powi(12) / r2.powi(12) * q * euler_product(q, 200).powi(24);
        let g2t = g2_tau(q);
        let e2 = g2t / r2;
        let e1 = (t * g2t - two_pi_i()) / r2;
        let a = (r1 * r2.conj()).im / PI;
        let mut l = Lattice { w1, w2, r1, r2, q, delta, e1, e2, a, legendre_defect: 0.0 };
        // eta_1 w2 - eta_2 w1 = -2 pi i with Im(w1 / w2) > 0
        let (h1, h2) = (l.eta1(), l.eta2());
        l.legendre_defect = (h1 * w2 - h2 * w1 + two_pi_i()).norm() / (2.0 * PI);
        if l.legendre_defect > 1e-8 {
            return Err(Error::Precision(format!("Legendre relation off by {:e}", l.legendre_defect)));
        }
        Ok(l)
    }

    pub fn periods(&self) -> (C, C) {
        (self.w1, self.w2)
    }
    pub fn reduced_periods(&self) -> (C, C) {
        (self.r1, self.r2)
    }
    pub fn tau(&self) -> C {
        self.w1 / self.w2
    }
    /// `q = exp(2 pi i tau)` of the reduced basis.
    pub fn q(&self) -> C {
        self.q
    }
    /// `Delta(L) = (2 pi i / w2)^12 q prod (1 - q^n)^24`.
    pub fn delta(&self) -> C {
        self.delta
    }
    /// `Delta` with the product cut after `terms` factors.
    pub fn delta_truncated(&self, terms: usize) -> C {
        two_pi_i().powi(12) / self.r2.powi(12) * self.q * euler_product(self.q, terms).powi(24)
    }
    /// `A(L) = (w1 conj(w2) - conj(w1) w2) / (2 pi i) = Area(C / L) / pi`.
    pub fn area_a(&self) -> f64 {
        self.a
    }
    pub fn eta1(&self) -> C {
        self.eta_form(self.w1)
    }
    pub fn eta2(&self) -> C {
        self.eta_form(self.w2)
    }
    /// `|eta_1 w2 - eta_2 w1 + 2 pi i| / 2 pi`, recorded at construction.
    pub fn legendre_defect(&self) -> f64 {
        self.legendre_defect
    }

    /// `g2 = 60 G4`, `g3 = 140 G6` from the Eisenstein `q`-expansions.
    pub fn g2(&self) -> C {
        let e4 = C::new(1.0, 0.0) + 240.0 * lambert(self.q, 3);
        e4 * (4.0 * PI.powi(4) / 3.0) / self.r2.powi(4)
    }
    pub fn g3(&self) -> C {
        let e6 = C::new(1.0, 0.0) - 504.0 * lambert(self.q, 5);
        e6 * (8.0 * PI.powi(6) / 27.0) / self.r2.powi(6)
    }

    /// `c L`.
    pub fn scaled(&self, c: C) -> Result<Self> {
        Self::new(c * self.w1, c * self.w2)
    }

    /// Real coordinates of `z` in the reduced basis.
    fn coords(&self, z: C) -> (f64, f64) {
        let det = (self.r1.conj() * self.r2).im;
        let x = (z.conj() * self.r2).im / det;
        let y = (self.r1.conj() * z).im / det;
        (x, y)
    }

    /// Real coordinates of `z` in the caller's basis.
    pub fn basis_coords(&self, z: C) -> (f64, f64) {
        let det = (self.w1.conj() * self.w2).im;
        ((z.conj() * self.w2).im / det, (self.w1.conj() * z).im / det)
    }

    /// `z = z0 + m r1 + n r2` with `z0` in the centred fundamental cell.
    fn split(&self, z: C) -> (C, i64, i64) {
        let (x, y) = self.coords(z);
        let (m, n) = (x.round(), y.round());
        (z - m * self.r1 - n * self.r2, m as i64, n as i64)
    }

    /// True when `z` is within the pole tolerance of a lattice point.
    pub fn near_lattice(&self, z: C) -> bool {
        self.split(z).0.norm() <= POLE_TOL * self.r2.norm()
    }

    fn check_pole(&self, z: C, what: &str) -> Result<()> {
        if self.near_lattice(z) {
            return Err(Error::Domain(format!("{what}: z = {z} is a lattice point (pole proximity)")));
        }
        Ok(())
    }

    /// The R-linear form with `eta(w, L) = eta_w` on lattice vectors:
    /// `eta(z) = ((w1 eta2 - w2 eta1) conj(z) + (conj(w2) eta1 - conj(w1) eta2) z) / (2 pi i A)`.
    pub fn eta_form(&self, z: C) -> C {
        let (r1, r2, e1, e2) = (self.r1, self.r2, self.e1, self.e2);
        ((r1 * e2 - r2 * e1) * z.conj() + (r2.conj() * e1 - r1.conj() * e2) * z) / (two_pi_i() * self.a)
    }

    /// `sigma(z, L)` from the product over `q`, moved to the fundamental
    /// cell by `sigma(z + w) = psi(w) sigma(z) exp(eta_w (z + w/2))` with
    /// `psi(w) = 1` on `2L` and `-1` otherwise.
    pub fn sigma(&self, z: C) -> C {
        let (z0, m, n) = self.split(z);
        let w = z0 / self.r2;
        let u = (two_pi_i() * w).exp();
        let mut p = C::new(1.0, 0.0);
        let mut qn = self.q;
        for _ in 0..10_000 {
            let f = (C::new(1.0, 0.0) - qn * u) * (C::new(1.0, 0.0) - qn / u) / (C::new(1.0, 0.0) - qn).powi(2);
            p *= f;
            if (f - 1.0).norm() <= EPS {
                break;
            }
            qn *= self.q;
        }
        let g2t = g2_tau(self.q);
        let s0 = self.r2 * (g2t * w * w / 2.0).exp() * ((I * PI * w).exp() - (-I * PI * w).exp()) / two_pi_i() * p;
        if m == 0 && n == 0 {
            return s0;
        }
        let om = m as f64 * self.r1 + n as f64 * self.r2;
        let eta_om = m as f64 * self.e1 + n as f64 * self.e2;
        let sign = if m % 2 == 0 && n % 2 == 0 { 1.0 } else { -1.0 };
        sign * s0 * (eta_om * (z0 + om / 2.0)).exp()
    }

    /// `wp(z, L)` from its `q`-expansion.
    pub fn wp(&self, z: C) -> Result<C> {
        self.check_pole(z, "wp")?;
        let w = self.split(z).0 / self.r2;
        let u = (two_pi_i() * w).exp();
        let f = |x: C| x / (C::new(1.0, 0.0) - x).powi(2);
        let mut s = C::new(1.0 / 12.0, 0.0) + f(u);
        let mut qn = self.q;
        for _ in 0..10_000 {
            let t = f(qn * u) + f(qn / u) - 2.0 * f(qn);
            s += t;
            if t.norm() <= EPS * s.norm().max(1.0) {
                break;
            }
            qn *= self.q;
        }
        Ok(two_pi_i().powi(2) * s / self.r2.powi(2))
    }

    /// `wp'(z, L)`.
    pub fn wp_prime(&self, z: C) -> Result<C> {
        self.check_pole(z, "wp'")?;
        let w = self.split(z).0 / self.r2;
        let u = (two_pi_i() * w).exp();
        let f = |x: C| x * (C::new(1.0, 0.0) + x) / (C::new(1.0, 0.0) - x).powi(3);
        let mut s = f(u);
        let mut qn = self.q;
        for _ in 0..10_000 {
            let t = f(qn * u) - f(qn / u);
            s += t;
            if t.norm() <= EPS * s.norm().max(1.0) {
                break;
            }
            qn *= self.q;
        }
        Ok(two_pi_i().powi(3) * s / self.r2.powi(3))
    }

    /// `theta(z, L) = Delta(L) exp(-6 eta(z, L) z) sigma(z, L)^12`.
    pub fn theta(&self, z: C) -> C {
        self.delta * (-6.0 * self.eta_form(z) * z).exp() * self.sigma(z).powi(12)
    }
}

/// `G2(tau) = (pi^2 / 3) E2(tau)`: the quasi-period of `Z tau + Z` at 1,
/// summed in Eisenstein order.
fn g2_tau(q: C) -> C {
    (C::new(1.0, 0.0) - 24.0 * lambert(q, 1)) * (PI * PI / 3.0)
}

/// Gauss reduction keeping `Im(r1 / r2) > 0`: `|Re tau| <= 1/2`, `|tau| >= 1`.
fn reduce(mut r1: C, mut r2: C) -> (C, C) {
    for _ in 0..1000 {
        let t = r1 / r2;
        let k = t.re.round();
        r1 -= k * r2;
        if (r1 / r2).norm() < 1.0 - 1e-15 {
            let (a, b) = (-r2, r1);
            r1 = a;
            r2 = b;
        } else {
            break;
        }
    }
    (r1, r2)
}

/// `sigma(z, L)`.
pub fn sigma(z: C, l: &Lattice) -> C {
    l.sigma(z)
}
/// `eta(z, L)`.
pub fn eta_form(z: C, l: &Lattice) -> C {
    l.eta_form(z)
}
/// `Delta(L)`.
pub fn delta_modular(l: &Lattice) -> C {
    l.delta()
}
/// `theta(z, L)`.
pub fn theta_robert(z: C, l: &Lattice) -> C {
    l.theta(z)
}

/// Lattices `L` inside `L'` with index coprime to 6, and the data of
/// `psi(z; L, L')`.
#[derive(Clone, Debug)]
pub struct LatticePair {
    inner: Lattice,
    outer: Lattice,
    index: u64,
    /// One representative of each pair `{rho, -rho}` in `(L' / L) - {0}`.
    zset: Vec<C>,
    /// Representatives of `L' / L`, including 0.
    cosets: Vec<C>,
}

impl LatticePair {
    pub fn new(inner: &Lattice, outer: &Lattice) -> Result<Self> {
        let (i1, i2) = inner.periods();
        let (a, b) = outer.basis_coords(i1);
        let (c, d) = outer.basis_coords(i2);
        let near = |x: f64| (x - x.round()).abs() <= 1e-8 * x.abs().max(1.0);
        if !(near(a) && near(b) && near(c) && near(d)) {
            return Err(Error::Domain("the inner lattice is not contained in the outer one".into()));
        }
        let det = (a.round() * d.round() - b.round() * c.round()).abs() as u64;
        if det == 0 {
            return Err(Error::Domain("degenerate inclusion".into()));
        }
        if det.is_multiple_of(2) || det.is_multiple_of(3) {
            return Err(Error::Domain(format!("[L':L] = {det} must be prime to 6")));
        }
        let (o1, o2) = outer.periods();
        let mut cosets: Vec<C> = Vec::new();
        for i in 0..det {
            for j in 0..det {
                let x = i as f64 * o1 + j as f64 * o2;
                let (s, t) = inner.basis_coords(x);
                let rep = x - s.floor() * i1 - t.floor() * i2;
                if !cosets.iter().any(|r| inner.near_lattice(*r - rep)) {
                    cosets.push(rep);
                }
            }
        }
        if cosets.len() as u64 != det {
            return Err(Error::Precision(format!("found {} cosets for index {det}", cosets.len())));
        }
        let mut zset: Vec<C> = Vec::new();
        for &r in cosets.iter().filter(|r| !inner.near_lattice(**r)) {
            if !zset.iter().any(|z| inner.near_lattice(*z + r)) {
                zset.push(r);
            }
        }
        Ok(LatticePair { inner: inner.clone(), outer: outer.clone(), index: det, zset, cosets })
    }

    pub fn index(&self) -> u64 {
        self.index
    }
    pub fn inner(&self) -> &Lattice {
        &self.inner
    }
    pub fn outer(&self) -> &Lattice {
        &self.outer
    }
    pub fn zset(&self) -> &[C] {
        &self.zset
    }
    pub fn cosets(&self) -> &[C] {
        &self.cosets
    }

    /// The principal 12th root of `Delta(L)^N / Delta(L')`: the canonical
    /// root is not reconstructed, so only `delta^12` is meaningful.
    pub fn delta(&self) -> C {
        let n = self.index as f64;
        let (d, dp) = (self.inner.delta(), self.outer.delta());
        let log_abs = n * d.norm().ln() - dp.norm().ln();
        let arg = wrap(n * d.arg() - dp.arg());
        C::from_polar((log_abs / 12.0).exp(), arg / 12.0)
    }

    /// `psi(z; L, L') = delta(L, L') prod_{rho in Z} (wp_L(z) - wp_L(rho))^-1`.
    pub fn psi(&self, z: C) -> Result<C> {
        let w = self.inner.wp(z)?;
        let mut p = self.delta();
        for &r in &self.zset {
            let d = w - self.inner.wp(r)?;
            if d.norm() <= POLE_TOL * w.norm().max(1.0) {
                return Err(Error::Domain(format!("psi: z = {z} is a pole (pole proximity)")));
            }
            p /= d;
        }
        Ok(p)
    }
}

/// Reduces an angle to `(-pi, pi]`.
fn wrap(x: f64) -> f64 {
    let t = x.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// `psi(z; L, L')`.
pub fn psi_robert(z: C, l: &Lattice, lp: &Lattice) -> Result<C> {
    LatticePair::new(l, lp)?.psi(z)
}

/// Both sides of `psi(z; L', a^-1 L') = prod_{rho in L'/L} psi(z + rho; L, a^-1 L)`
/// for a principal ideal `a = (alpha)`.
#[derive(Clone, Debug)]
pub struct Distribution {
    pub lhs: C,
    pub rhs: C,
    /// `lhs / rhs`; a 12th root of unity, which the principal branch of
    /// `delta` does not pin down.
    pub ratio: C,
    /// `|ratio^12 - 1|`: the branch-free form of the relation.
    pub twelfth_power_defect: f64,
    /// `k` with `ratio` closest to `exp(2 pi i k / 12)`.
    pub root_of_unity: i64,
}

pub fn distribution_relation(z: C, inner: &Lattice, outer: &Lattice, alpha: C) -> Result<Distribution> {
    let pair = LatticePair::new(inner, outer)?;
    let (o1, o2) = outer.periods();
    let (i1, i2) = inner.periods();
    let outer_a = Lattice::new(o1 / alpha, o2 / alpha)?;
    let inner_a = Lattice::new(i1 / alpha, i2 / alpha)?;
    let lhs = LatticePair::new(outer, &outer_a)?.psi(z)?;
    let right = LatticePair::new(inner, &inner_a)?;
    let mut rhs = C::new(1.0, 0.0);
    for &rho in pair.cosets() {
        rhs *= right.psi(z + rho)?;
    }
    let ratio = lhs / rhs;
    let k = (ratio.arg() * 6.0 / PI).round() as i64;
    Ok(Distribution { lhs, rhs, ratio, twelfth_power_defect: (ratio.powi(12) - 1.0).norm(), root_of_unity: k.rem_euclid(12) })
}
