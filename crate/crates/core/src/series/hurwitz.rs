use super::{ScaledSeries, TruncSeries};
use crate::padic::elem::mul_acc;
use crate::padic::modular::vp;
use crate::padic::RingSpec;

/// A series in divided-power form: coefficients `a_k` stand for
/// `sum a_k Z^k / k!`.
///
/// Products are binomial convolutions and derivatives are index shifts, so
/// integral linear and autonomous differential equations solve exactly
/// modulo `p^N`. Denominators appear only when converting back to ordinary
/// coefficients.
#[derive(Clone, Debug)]
pub struct HurwitzSeries {
    spec: RingSpec,
    d: usize,
    n_eff: u32,
    data: Vec<u128>,
}

/// Binomial coefficients `C(n, k) mod p^N` for `n < d`.
pub(crate) struct Pascal {
    rows: Vec<Vec<u128>>,
}

impl Pascal {
    pub(crate) fn new(spec: &RingSpec, d: usize) -> Self {
        let md = &spec.0.md;
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(d);
        for n in 0..d {
            let mut row = vec![1 % spec.modulus(); n + 1];
            for k in 1..n {
                row[k] = md.add(rows[n - 1][k - 1], rows[n - 1][k]);
            }
            rows.push(row);
        }
        Pascal { rows }
    }

    fn c(&self, n: usize, k: usize) -> u128 {
        self.rows[n][k]
    }
}

impl HurwitzSeries {
    fn zeros(spec: &RingSpec, d: usize, n_eff: u32) -> Self {
        HurwitzSeries { spec: spec.clone(), d, n_eff, data: vec![0; d * spec.rank()] }
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }
    pub fn cap(&self) -> usize {
        self.d
    }
    pub fn n_eff(&self) -> u32 {
        self.n_eff
    }

    fn slot(&self, k: usize) -> &[u128] {
        let r = self.spec.rank();
        &self.data[k * r..(k + 1) * r]
    }

    /// `a_k = k! f_k`.
    pub fn from_series(f: &TruncSeries) -> Self {
        let spec = f.spec();
        let md = &spec.0.md;
        let r = spec.rank();
        let mut out = Self::zeros(spec, f.cap(), f.n_eff());
        let mut fact = 1 % spec.modulus();
        for k in 0..f.cap() {
            if k > 0 {
                fact = md.mul(fact, md.from_i128(k as i128));
            }
            for t in 0..r {
                out.data[k * r + t] = md.mul(f.raw_coeff(k)[t], fact);
            }
        }
        out
    }

    /// Ordinary coefficients `a_k / k!`, with common denominator
    /// `p^v_p((D-1)!)`.
    pub fn to_scaled(&self) -> ScaledSeries {
        let spec = &self.spec;
        let p = spec.p();
        let md = &spec.0.md;
        let r = spec.rank();
        let s: u32 = (1..self.d).map(|k| vp(k as u128, p).unwrap_or(0)).sum();
        let mut data = vec![0u128; self.d * r];
        let mut v_fact = 0u32;
        let mut unit_fact = 1 % spec.modulus();
        for k in 0..self.d {
            if k > 0 {
                let v = vp(k as u128, p).unwrap_or(0);
                v_fact += v;
                unit_fact = md.mul(unit_fact, md.from_i128((k as u128 / spec.p_pow(v)) as i128));
            }
            let shift = s - v_fact;
            if shift >= spec.prec() {
                continue;
            }
            let factor = md.mul(md.inv(unit_fact).expect("unit"), spec.p_pow(shift));
            for t in 0..r {
                data[k * r + t] = md.mul(self.data[k * r + t], factor);
            }
        }
        let numer = TruncSeries::from_raw(spec, self.d, self.n_eff, data);
        ScaledSeries { numer, pdenom: s }.normalize()
    }

    /// Binomial convolution, truncated at `d`.
    pub(crate) fn mul_to(&self, o: &Self, d: usize, pas: &Pascal) -> Self {
        let r = self.spec.rank();
        let mut out = Self::zeros(&self.spec, d, self.n_eff.min(o.n_eff));
        let md = &self.spec.0.md;
        let mut tmp = vec![0u128; r];
        for i in 0..d.min(self.d) {
            let a = self.slot(i);
            if a.iter().all(|&x| x == 0) {
                continue;
            }
            for j in 0..(d - i).min(o.d) {
                let b = o.slot(j);
                if b.iter().all(|&x| x == 0) {
                    continue;
                }
                tmp.iter_mut().for_each(|x| *x = 0);
                mul_acc(&self.spec, a, b, &mut tmp);
                let c = pas.c(i + j, i);
                for t in 0..r {
                    let slot = &mut out.data[(i + j) * r + t];
                    *slot = md.add(*slot, md.mul(tmp[t], c));
                }
            }
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = self.d.min(o.d);
        self.mul_to(o, d, &Pascal::new(&self.spec, d))
    }

    /// Solves `E' = h E`, `E(0) = 1`, for an ordinary integral series `h`.
    /// The result has cap `d`.
    pub fn solve_linear(h: &TruncSeries, d: usize) -> Self {
        let spec = h.spec();
        let pas = Pascal::new(spec, d);
        let hh = HurwitzSeries::from_series(&h.extend_exact(d.max(h.cap())));
        let r = spec.rank();
        let md = &spec.0.md;
        let mut e = Self::zeros(spec, d, h.n_eff());
        e.data[0] = 1 % spec.modulus();
        let mut tmp = vec![0u128; r];
        for n in 0..d.saturating_sub(1) {
            // E_{n+1} = sum_k C(n,k) H_k E_{n-k}
            let mut acc = vec![0u128; r];
            for k in 0..=n.min(h.cap() - 1) {
                let a = hh.slot(k);
                if a.iter().all(|&x| x == 0) {
                    continue;
                }
                tmp.iter_mut().for_each(|x| *x = 0);
                mul_acc(spec, a, e.slot(n - k), &mut tmp);
                let c = pas.c(n, k);
                for t in 0..r {
                    acc[t] = md.add(acc[t], md.mul(tmp[t], c));
                }
            }
            e.data[(n + 1) * r..(n + 2) * r].copy_from_slice(&acc);
        }
        e
    }

    /// Solves `E' = a(Z) u(E)`, `E(0) = 0`, for ordinary integral series `a`
    /// and `u`. The result has cap `d`.
    pub fn solve_autonomous(a: &TruncSeries, u: &TruncSeries, d: usize) -> Self {
        let spec = a.spec();
        let pas = Pascal::new(spec, d);
        let ah = HurwitzSeries::from_series(&a.truncate(d));
        let r = spec.rank();
        let md = &spec.0.md;
        let mut e = Self::zeros(spec, d, a.n_eff().min(u.n_eff()));
        let mut tmp = vec![0u128; r];
        for n in 0..d.saturating_sub(1) {
            // coefficient n of a(Z) u(E) depends on E_1..E_n only
            let m = n + 1;
            let top = n.min(u.cap() - 1);
            let mut w = Self::zeros(spec, m, e.n_eff);
            w.data[..r].copy_from_slice(u.raw_coeff(top));
            for j in (0..top).rev() {
                w = w.mul_to(&e, m, &pas);
                for t in 0..r {
                    w.data[t] = md.add(w.data[t], u.raw_coeff(j)[t]);
                }
            }
            let mut acc = vec![0u128; r];
            for k in 0..=n.min(ah.d - 1) {
                let x = ah.slot(k);
                if x.iter().all(|&v| v == 0) {
                    continue;
                }
                tmp.iter_mut().for_each(|v| *v = 0);
                mul_acc(spec, x, w.slot(n - k), &mut tmp);
                let c = pas.c(n, k);
                for t in 0..r {
                    acc[t] = md.add(acc[t], md.mul(tmp[t], c));
                }
            }
            e.data[(n + 1) * r..(n + 2) * r].copy_from_slice(&acc);
        }
        e
    }
}
