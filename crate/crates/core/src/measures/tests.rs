use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::padic::RingSpec;

fn zp(p: u64, n: u32) -> RingSpec {
    RingSpec::zp(p, n).unwrap()
}

fn binom(a: u128, k: u128) -> u128 {
    if k > a {
        return 0;
    }
    let mut r = 1u128;
    for i in 0..k {
        r = r * (a - i) / (i + 1);
    }
    r
}

/// Oracle for `tilde`: write `h` in `Q = 1 + T`, drop the `Q^m` with `p | m`,
/// and expand back. Exact on polynomials.
fn tilde_oracle(h: &[i64], p: i64, modulus: i128) -> Vec<i64> {
    let d = h.len();
    // h(T) = sum h_k (Q - 1)^k = sum_m c_m Q^m
    let mut c = vec![0i128; d];
    for (k, &hk) in h.iter().enumerate() {
        for m in 0..=k {
            let sign = if (k - m) % 2 == 0 { 1 } else { -1 };
            c[m] += sign * hk as i128 * binom(k as u128, m as u128) as i128;
        }
    }
    let mut out = vec![0i128; d];
    for (m, &cm) in c.iter().enumerate() {
        if m as i64 % p == 0 {
            continue;
        }
        for (k, o) in out.iter_mut().enumerate().take(m + 1) {
            *o += cm * binom(m as u128, k as u128) as i128;
        }
    }
    out.into_iter().map(|x| x.rem_euclid(modulus) as i64).collect()
}

#[test]
fn dirac_is_binomial_series() {
    let s = zp(5, 8);
    let mu = dirac(&s.from_int(7), GroupTag::Zp, 10).unwrap();
    for k in 0..10 {
        assert_eq!(mu.amice().coeff(k), s.from_u128(binom(7, k as u128)));
    }
    // negative exponent: (1+T)^-1 = sum (-1)^k T^k
    let neg = dirac(&s.from_int(-1), GroupTag::Zp, 6).unwrap();
    assert_eq!(neg.amice(), &TruncSeries::from_ints(&s, &[1, -1, 1, -1, 1, -1], 6));
    // 10 < 5^2: one digit lost to the unknown tail of a
    assert_eq!(mu.amice().n_eff(), 7);
    assert!(dirac(&s.from_int(5), GroupTag::ZpUnits, 6).is_err());
}

#[test]
fn tilde_matches_q_expansion() {
    for p in [2i64, 3, 5] {
        let s = zp(p as u64, 6);
        let h: Vec<i64> = (0..40).map(|k| (k * k + 3 * k + 1) % 17 - 8).collect();
        let t = tilde(&TruncSeries::from_ints(&s, &h, 40)).unwrap();
        let expect = TruncSeries::from_ints(&s, &tilde_oracle(&h, p, s.modulus() as i128), 40);
        assert_eq!(t.cap(), 40 - (p as usize - 1) * 6);
        assert_eq!(t, expect.truncate(t.cap()), "p = {p}");
    }
}

#[test]
fn tilde_restricts_dirac() {
    let s = zp(3, 10);
    let unit = dirac(&s.from_int(4), GroupTag::Zp, 40).unwrap();
    let t = tilde(unit.amice()).unwrap();
    assert_eq!(t, unit.amice().truncate(t.cap()));
    let off = dirac(&s.from_int(6), GroupTag::Zp, 40).unwrap();
    assert!(tilde(off.amice()).unwrap().is_zero());
    assert!(Measure::new(off.amice().clone(), GroupTag::ZpUnits).is_err());
}

#[test]
fn coset_masses_of_point_masses() {
    let s = zp(3, 12);
    let mu = dirac(&s.from_int(22), GroupTag::ZpUnits, 60).unwrap();
    for n in 1..=2 {
        let pn = 3u128.pow(n);
        for (d, m) in coset_masses(&mu, n).unwrap() {
            let expect = u128::from(d.coords()[0] == 22 % pn);
            assert_eq!(m, s.from_u128(expect), "n = {n}, delta = {:?}", d.coords());
        }
    }
    let total: RingElem = coset_masses(&mu, 1).unwrap().into_iter().fold(s.zero(), |a, (_, m)| a.add_ref(&m));
    assert!(total.is_one());
    assert!(mass_off_units(&mu).unwrap().is_zero());
}

#[test]
fn okp_point_mass_is_pushed_forward() {
    // varsigma(2 + 2w) = 4: the mass sits on the coset of 4 in O_K
    let s = RingSpec::ramified(3, 10, 3).unwrap();
    let a = s.from_coords(&[2, 2]).unwrap();
    let mu = dirac(&a, GroupTag::OKpUnits, 40).unwrap();
    for (d, m) in coset_masses(&mu, 1).unwrap() {
        let hit = d.coords()[0] == 1 && d.coords()[1] == 0;
        assert_eq!(m.is_one(), hit, "delta = {:?}", d.coords());
        assert!(hit || m.is_zero());
    }
    let bad = s.from_coords(&[1, 2]).unwrap();
    assert!(dirac(&bad, GroupTag::OKpUnits, 10).is_err());
}

#[test]
fn pairing_determinant_is_checked() {
    for spec in [RingSpec::ramified(3, 6, 3).unwrap(), RingSpec::ramified(5, 6, 5).unwrap(), RingSpec::unramified(3, 6).unwrap()] {
        let w = spec.quad_gen().unwrap();
        let det = varsigma(&w.mul_ref(&w)).unwrap().sub_ref(&spec.one());
        assert_eq!(check_group(&spec, GroupTag::OKp).is_ok(), det.is_unit());
    }
    assert!(check_group(&zp(3, 6), GroupTag::OKp).is_err());
}

#[test]
fn partition_and_lift_independence() {
    let s = zp(3, 10);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mu = Measure::new(TruncSeries::random(&s, 60, &mut rng), GroupTag::Zp).unwrap();
    let lvl1 = coset_masses(&mu, 1).unwrap();
    let lvl2 = coset_masses(&mu, 2).unwrap();
    for (d, m) in &lvl1 {
        let sum = lvl2.iter().filter(|(e, _)| e.coords()[0] % 3 == d.coords()[0]).fold(s.zero(), |a, (_, x)| a.add_ref(x));
        assert_eq!(&sum, m);
        let other = d.add_ref(&s.from_int(3 * 7));
        assert_eq!(&coset_mass(&mu, &other, 1).unwrap(), m);
    }
    // every residue class, units or not, sums to the total mass
    let total = (0..9).fold(s.zero(), |a, x| a.add_ref(&residue_class_mass(&mu, &s.from_int(x), 2).unwrap()));
    assert_eq!(total, mu.amice().coeff(0).with_prec(total.prec()));
}

#[test]
fn non_integral_series_fails_admissibility() {
    // T / 3 is the measure (delta_1 - delta_0) / 3: its coset masses are not integral
    let s = zp(3, 8);
    let t = TruncSeries::x(&s, 40);
    let mu = Measure::with_denominator(t.clone(), 1, GroupTag::Zp).unwrap();
    let err = coset_mass(&mu, &s.one(), 1).unwrap_err();
    assert!(matches!(err, crate::Error::NotDivisible(_)), "{err:?}");
    let c = coset_numerator(&mu, &s.one(), 1).unwrap();
    assert!(c.valuation < crate::padic::Valuation::int(c.required as i64));
    // the same series without the denominator is admissible
    let ok = Measure::new(t, GroupTag::Zp).unwrap();
    assert!(coset_mass(&ok, &s.one(), 1).unwrap().is_one());
}

#[test]
fn moments_match_riemann_sums() {
    for spec in [zp(3, 10), RingSpec::ramified(3, 10, 3).unwrap()] {
        let tag = if spec.has_quad() { GroupTag::OKp } else { GroupTag::Zp };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = TruncSeries::random(&spec, 80, &mut rng);
        let mu = Measure::new(h, tag).unwrap().tilde().unwrap();
        for k in 0..4u32 {
            let m = moment(&mu, k as usize).unwrap();
            for n in 1..=2 {
                let r = riemann_moment(&mu, k, n).unwrap();
                let diff = m.sub_ref(&r);
                assert!(diff.valuation() >= crate::padic::Valuation::int(n as i64), "k = {k}, n = {n}, {:?}", diff.valuation());
            }
        }
    }
}

#[test]
fn mahler_coefficients_resynthesize() {
    // binom(x, k) is constant mod p^n on residue classes mod p^n when k < p
    let s = zp(5, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mu = Measure::new(TruncSeries::random(&s, 40, &mut rng), GroupTag::Zp).unwrap();
    for k in 0..5u128 {
        let mut acc = s.zero();
        for a in 0..5u128 {
            let m = residue_class_mass(&mu, &s.from_u128(a), 1).unwrap();
            acc = acc.add_ref(&m.mul_ref(&s.from_u128(binom(a, k))));
        }
        let diff = acc.sub_ref(&mu.amice().coeff(k as usize));
        assert!(diff.valuation() >= crate::padic::Valuation::int(1), "k = {k}");
    }
}

#[test]
fn gauss_sums() {
    let s = zp(5, 10);
    let triv0 = FiniteCharacter::trivial(&s, CharDomain::Zp, 0, &s).unwrap();
    assert!(gauss_sum(&triv0).unwrap().numer.is_one());
    for (spec, c) in [
        (RingSpec::ramified(3, 8, 3).unwrap(), 3),
        (RingSpec::ramified(2, 8, -2).unwrap(), 2),
        (RingSpec::unramified(2, 8).unwrap(), 6),
        (RingSpec::unramified(3, 8).unwrap(), 4),
    ] {
        let t = FiniteCharacter::trivial(&spec, CharDomain::OKp, 0, &spec).unwrap();
        assert_eq!(gauss_sum(&t).unwrap().integral().unwrap(), spec.from_int(c));
    }
    // tau(chi) tau(chi^-1) = chi(-1) / p for primitive chi mod p
    for i in 1..4u64 {
        let a = FiniteCharacter::teichmuller_power(&s, CharDomain::Zp, i).unwrap();
        let b = FiniteCharacter::teichmuller_power(&s, CharDomain::Zp, 4 - i).unwrap();
        let (ta, tb) = (gauss_sum(&a).unwrap(), gauss_sum(&b).unwrap());
        assert_eq!(ta.pdenom + tb.pdenom, 2);
        let lhs = ta.numer.mul_ref(&tb.numer);
        let rhs = a.eval(&s.from_int(-1)).scale(5).embed(lhs.spec()).unwrap();
        assert_eq!(lhs, rhs, "i = {i}");
    }
}

#[test]
fn characters_validate_generators() {
    let s = zp(7, 6);
    // 3 generates (Z/7)^x; chi(3) = -1 is the quadratic character
    let chi = FiniteCharacter::new(&s, CharDomain::Zp, 1, &[(s.from_int(3), s.from_int(-1))], &s).unwrap();
    assert_eq!(chi.order(), 2);
    assert_eq!(chi.eval(&s.from_int(2)), s.one());
    assert!(chi.eval(&s.from_int(7)).is_zero());
    // 2 has order 3: it does not generate
    assert!(FiniteCharacter::new(&s, CharDomain::Zp, 1, &[(s.from_int(2), s.one())], &s).is_err());
    // chi(3) = 2 has the wrong order
    assert!(FiniteCharacter::new(&s, CharDomain::Zp, 1, &[(s.from_int(3), s.from_int(2))], &s).is_err());
}

#[test]
fn twists_of_point_masses() {
    let s = zp(5, 14);
    for a in [2i64, 3, 7, 13] {
        let mu = dirac(&s.from_int(a), GroupTag::ZpUnits, 40).unwrap();
        for i in 0..4u64 {
            let chi = FiniteCharacter::teichmuller_power(&s, CharDomain::Zp, i).unwrap();
            for k in 0..3usize {
                let v = twist_eval(&mu, &chi, k).unwrap();
                let expect = chi.eval(&s.from_int(a)).mul_ref(&s.from_int(a).pow(k as u64));
                assert_eq!(v.descend(&s).unwrap(), expect, "a = {a}, i = {i}, k = {k}");
            }
        }
    }
}

#[test]
fn twist_paths_agree_and_are_orthogonal() {
    let s = zp(5, 10);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mu = Measure::new(TruncSeries::random(&s, 100, &mut rng), GroupTag::Zp).unwrap().tilde().unwrap();
    let triv = FiniteCharacter::trivial(&s, CharDomain::Zp, 1, &s).unwrap();
    for k in 0..3usize {
        let m = moment(&mu, k).unwrap();
        assert_eq!(twist_eval(&mu, &triv, k).unwrap().descend(&s).unwrap(), m);
        let chis: Vec<_> = (0..4).map(|i| FiniteCharacter::teichmuller_power(&s, CharDomain::Zp, i).unwrap()).collect();
        let vals: Vec<RingElem> = chis.iter().map(|c| twist_eval(&mu, c, k).unwrap()).collect();
        for (c, v) in chis.iter().zip(&vals) {
            assert_eq!(v, &twist_general(&mu, c, k).unwrap());
        }
        // sum_i chi_i(a)^-1 mu(chi_i x^k) = 4 int_{a U_1} x^k
        let a = s.from_int(2);
        let mut acc = vals[0].spec().zero();
        for (c, v) in chis.iter().zip(&vals) {
            acc = acc.add_ref(&c.eval(&a).inverse().unwrap().embed(v.spec()).unwrap().mul_ref(v));
        }
        let mut restricted = s.zero();
        for (d, mass) in coset_masses(&mu, 1).unwrap() {
            if d.coords()[0] % 5 == 2 {
                restricted = restricted.add_ref(&d.pow(k as u64).mul_ref(&mass));
            }
        }
        let diff = acc.descend(&s).unwrap().sub_ref(&restricted.scale(4));
        assert!(diff.valuation() >= crate::padic::Valuation::int(1), "k = {k}");
    }
}

#[test]
fn okp_twists_of_point_masses() {
    let s = RingSpec::unramified(3, 10).unwrap();
    let a = s.from_coords(&[1, 1]).unwrap();
    let mu = dirac(&a, GroupTag::OKpUnits, 40).unwrap();
    let c = varsigma(&a).unwrap();
    for i in 0..8u64 {
        let chi = FiniteCharacter::teichmuller_power(&s, CharDomain::OKp, i).unwrap();
        for k in 0..2usize {
            let v = twist_eval(&mu, &chi, k).unwrap();
            assert_eq!(v, twist_general(&mu, &chi, k).unwrap());
            let expect = chi.eval(&c).mul_ref(&c.pow(k as u64));
            assert_eq!(v.descend(&s).unwrap(), expect, "i = {i}, k = {k}");
        }
    }
}

#[test]
fn measure_json_round_trip() {
    let s = RingSpec::ramified(3, 6, 3).unwrap();
    let mu = dirac(&s.from_coords(&[1, 0]).unwrap(), GroupTag::OKpUnits, 12).unwrap();
    let j = serde_json::to_string(&mu.to_json()).unwrap();
    let back = Measure::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
    assert_eq!(back, mu);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn tilde_is_idempotent(seed in 0u64..1000) {
            let s = zp(3, 10);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = tilde(&TruncSeries::random(&s, 50, &mut rng)).unwrap();
            let tt = tilde(&t).unwrap();
            prop_assert_eq!(tt.clone(), t.truncate(tt.cap()));
        }

        #[test]
        fn coset_masses_sum_to_unit_mass(seed in 0u64..1000, n in 1u32..3) {
            let s = zp(3, 10);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mu = Measure::new(TruncSeries::random(&s, 70, &mut rng), GroupTag::Zp).unwrap();
            let units = mu.tilde().unwrap();
            let total = coset_masses(&mu, n).unwrap().into_iter().fold(s.zero(), |a, (_, m)| a.add_ref(&m));
            prop_assert_eq!(total, units.amice().coeff(0));
        }

        #[test]
        fn masses_are_additive(a in 1i64..200, b in 1i64..200) {
            let s = zp(3, 10);
            let (a, b) = (3 * a + 1, 3 * b + 2);
            let ma = dirac(&s.from_int(a), GroupTag::ZpUnits, 40).unwrap();
            let mb = dirac(&s.from_int(b), GroupTag::ZpUnits, 40).unwrap();
            let sum = ma.add(&mb).unwrap();
            let d = s.from_int(a);
            let lhs = coset_mass(&sum, &d, 2).unwrap();
            let rhs = coset_mass(&ma, &d, 2).unwrap().add_ref(&coset_mass(&mb, &d, 2).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
