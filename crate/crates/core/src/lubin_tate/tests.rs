use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::padic::RingSpec;
use crate::series::{weierstrass_prep, TruncSeries};

fn ram(p: u64, n: u32, pi_sq: i64) -> RingSpec {
    RingSpec::ramified(p, n, pi_sq).unwrap()
}

#[test]
fn multiplicative_group_law() {
    let s = RingSpec::zp(3, 8).unwrap();
    let g = FormalGroup::multiplicative(&s, 12).unwrap();
    let law = g.law().unwrap();
    for i in 0..12 {
        for j in 0..12 - i {
            let expect = match (i, j) {
                (1, 0) | (0, 1) | (1, 1) => 1,
                _ => 0,
            };
            assert_eq!(law.coeff(i, j), s.from_int(expect), "X^{i} Y^{j}");
        }
    }
    let log = g.log().unwrap();
    assert_eq!(*log, TruncSeries::from_ints(&s, &[1, 1], 12).formal_log().unwrap().truncate(12));
    let p = g.endomorphism(&s.from_int(3)).unwrap();
    assert_eq!(p, TruncSeries::from_ints(&s, &[1, 1], 12).pow(3).sub(&TruncSeries::one(&s, 12)));
}

#[test]
fn identity_endomorphism_and_pi() {
    let s = ram(2, 10, -2);
    let g = FormalGroup::default_for(&s, 16).unwrap();
    assert_eq!(g.endomorphism(&s.one()).unwrap(), TruncSeries::x(&s, 16));
    assert_eq!(g.endomorphism(g.pi()).unwrap(), g.f().clone());
    // [pi] o [pi] = [pi^2] = [-2]
    let pp = g.pi_power(2, 16);
    assert_eq!(g.endomorphism(&s.from_int(-2)).unwrap(), pp);
}

#[test]
fn endomorphisms_multiply_and_add() {
    let s = ram(3, 9, -3);
    let g = FormalGroup::default_for(&s, 14).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..4 {
        let a = s.from_coords(&[rng.gen_range(0..50), rng.gen_range(0..50)]).unwrap();
        let b = s.from_coords(&[rng.gen_range(0..50), rng.gen_range(0..50)]).unwrap();
        let ea = g.endomorphism(&a).unwrap();
        let eb = g.endomorphism(&b).unwrap();
        let eab = g.endomorphism(&a.mul_ref(&b)).unwrap();
        assert_eq!(ea.compose(&eb).unwrap(), eab);
        let sum = g.add_series(&ea, &eb).unwrap();
        assert_eq!(sum, g.endomorphism(&a.add_ref(&b)).unwrap());
    }
}

#[test]
fn group_axioms() {
    for s in [ram(2, 10, -2), RingSpec::unramified(2, 8).unwrap(), RingSpec::zp(5, 6).unwrap()] {
        let g = FormalGroup::default_for(&s, 12).unwrap();
        let law = g.law().unwrap();
        assert!(law.is_symmetric());
        for i in 0..12 {
            let expect = if i == 1 { s.one() } else { s.zero() };
            assert_eq!(law.coeff(i, 0), expect);
        }
        let x = TruncSeries::x(&s, 12);
        let y = x.scale_int(2).add(&x.pow(3));
        let z = x.pow(2).sub(&x.scale_int(3));
        let lhs = g.add_series(&g.add_series(&x, &y).unwrap(), &z).unwrap();
        let rhs = g.add_series(&x, &g.add_series(&y, &z).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        // f is an endomorphism of F
        let fx = g.f().compose(&g.add_series(&x, &y).unwrap()).unwrap();
        let fy = g.add_series(&g.f().compose(&x).unwrap(), &g.f().compose(&y).unwrap()).unwrap();
        assert_eq!(fx, fy);
    }
}

#[test]
fn log_matches_invariant_differential() {
    let s = ram(3, 10, 3);
    let g = FormalGroup::default_for(&s, 20).unwrap();
    let log = g.log().unwrap();
    let dl = log.derive().try_integral().unwrap();
    assert!(dl.coeff(0).is_one());
    assert_eq!(dl.truncate(19), g.log_derivative().unwrap().truncate(19));
    // log(F(X, Y)) = log X + log Y along Y = X^2
    let x = TruncSeries::x(&s, 20);
    let y = x.pow(2);
    let lhs = log.compose_right(&g.add_series(&x, &y).unwrap()).unwrap();
    let rhs = log.add(&log.compose_right(&y).unwrap());
    assert_eq!(lhs, rhs);
}

#[test]
fn exp_inverts_log() {
    let s = ram(2, 14, -2);
    let g = FormalGroup::default_for(&s, 12).unwrap();
    let log = g.log().unwrap().try_integral();
    let exp = g.exp().unwrap().try_integral();
    // both carry denominators at p = 2; compare log(exp(X)) through the
    // numerators instead
    if let (Ok(l), Ok(e)) = (log, exp) {
        assert_eq!(l.compose(&e).unwrap(), TruncSeries::x(&s, 12).with_n_eff(l.n_eff().min(e.n_eff())));
    }
    let e = g.exp().unwrap();
    let l = g.log().unwrap();
    // exp' = dF/dY(exp, 0) and log' o exp * exp' = 1
    let de = e.derive();
    let lhs = g.log_derivative().unwrap();
    let k = 6;
    let en = e.try_integral();
    if let Ok(en) = en {
        let prod = lhs.compose(&en.truncate(k)).unwrap().truncate(k - 1).mul(&de.try_integral().unwrap().truncate(k - 1));
        assert_eq!(prod, TruncSeries::one(&s, k - 1).with_n_eff(prod.n_eff()));
    }
    assert!(l.cap() == 12);
}

#[test]
fn guard_holds_across_precisions() {
    for (s_lo, s_hi) in [(ram(3, 8, -3), ram(3, 14, -3)), (ram(2, 9, -2), ram(2, 15, -2))] {
        let lo = FormalGroup::default_for(&s_lo, 30).unwrap();
        let hi = FormalGroup::default_for(&s_hi, 30).unwrap();
        let a_lo = s_lo.from_coords(&[7, 5]).unwrap();
        let a_hi = s_hi.from_coords(&[7, 5]).unwrap();
        let e_lo = lo.endomorphism(&a_lo).unwrap();
        let e_hi = hi.endomorphism(&a_hi).unwrap();
        let n = lo.n_eff();
        for k in 0..30 {
            assert_eq!(e_lo.coeff(k).with_prec(n).coords(), e_hi.coeff(k).with_prec(n).coords(), "[a] coefficient {k}");
        }
        let l_lo = lo.law().unwrap();
        let l_hi = hi.law().unwrap();
        for i in 0..30 {
            for j in 0..30 - i {
                let c = l_hi.coeff(i, j).with_prec(lo.n_eff());
                assert_eq!(c.coords(), l_lo.coeff(i, j).coords(), "F coefficient X^{i} Y^{j}");
            }
        }
        let ll = lo.log().unwrap();
        let lh = hi.log().unwrap();
        for k in 0..30 {
            let (a, sa) = ll.coeff(k);
            let (b, sb) = lh.coeff(k);
            assert_eq!(sa, sb);
            let k2 = a.prec();
            assert_eq!(a.with_prec(k2).coords(), b.with_prec(k2).coords(), "log coefficient {k}");
        }
    }
}

#[test]
fn omega_small_cases() {
    let s = ram(2, 14, -2);
    let g = FormalGroup::default_for(&s, 32).unwrap();
    let om = omega_polys(&g, 0).unwrap();
    assert_eq!(om.plus, vec![s.zero(), s.one()]);
    assert_eq!(om.minus, vec![s.zero(), s.one()]);
    let om = omega_polys(&g, 2).unwrap();
    assert_eq!(om.pibar[0], vec![g.pi().clone(), s.one()]);
    // pibar_m is the distinguished part of [pi^m]/[pi^{m-1}]
    for m in 1..=2u32 {
        let num = g.pi_power(m, 32);
        let den = g.pi_power(m - 1, 32);
        let w1 = weierstrass_prep(&num).unwrap();
        let w0 = weierstrass_prep(&den).unwrap();
        let prod = crate::lubin_tate::tower::poly_mul(&w0.distinguished, &om.pibar[m as usize - 1]);
        assert_eq!(w1.distinguished, prod);
    }
    let chk = check_factorization(&g, 1, &s.from_int(2), 12, 6).unwrap();
    assert!(chk.matches, "{chk:?}");
    // a = 4 has the wrong valuation: the Weierstrass degrees differ
    let chk = check_factorization(&g, 1, &s.from_int(4), 12, 6).unwrap();
    assert!(!chk.matches && chk.endo_lambda != Some(chk.degree), "{chk:?}");
}

#[test]
fn pibar_roots_oracle() {
    let s = ram(3, 10, -3);
    let g = FormalGroup::default_for(&s, 16).unwrap();
    let om = omega_polys(&g, 2).unwrap();
    for m in 1..=2u32 {
        let poly = &om.pibar[m as usize - 1];
        let f = TruncSeries::from_coeffs(&s, poly, 144);
        let w = weierstrass_prep(&f).unwrap();
        let lambda = 3u64.pow(m) - 3u64.pow(m - 1);
        assert_eq!(w.mu, num_rational::Ratio::from_integer(0));
        assert_eq!(w.lambda as u64, lambda);
        // once v(zeta - 1) is below the root valuations, ord = lambda
        if m == 1 {
            let r = crate::series::mu_lambda_by_roots(&f, 2..=3).unwrap();
            assert_eq!((r.mu, r.lambda), (num_rational::Ratio::from_integer(0), num_rational::Ratio::from_integer(lambda as i64)));
        }
    }
    // p = 2: roots of pibar_1, pibar_2 have valuations 1/2, 1/4, above v(zeta_32 - 1)
    let s = ram(2, 10, -2);
    let g = FormalGroup::default_for(&s, 16).unwrap();
    let om = omega_polys(&g, 2).unwrap();
    for m in 1..=2u32 {
        let f = TruncSeries::from_coeffs(&s, &om.pibar[m as usize - 1], 64);
        let r = crate::series::mu_lambda_by_roots(&f, 4..=5).unwrap();
        let lambda = 2i64.pow(m) - 2i64.pow(m - 1);
        assert_eq!((r.mu, r.lambda), (num_rational::Ratio::from_integer(0), num_rational::Ratio::from_integer(lambda)));
    }
}

#[test]
fn tower_structure() {
    let s = ram(3, 8, -3);
    let g = FormalGroup::default_for(&s, 24).unwrap();
    let t = build_tower(&g, 2).unwrap();
    let l1 = t.level(1);
    assert!(l1.alpha().eval_poly(l1.pibar()).coeffs().iter().all(|c| c.is_zero()));
    assert!(t.check_inclusion(2));
    // Nm_1(alpha_1) = (-1)^(q-1) pibar_1(0)
    let n = t.norm_down(1, &l1.alpha()).unwrap();
    assert_eq!(n.as_base().unwrap(), g.pi());
    // Nm_2(incl(x)) = x^q
    let x = l1.elem(vec![s.from_int(2), s.from_int(5)]);
    let up = t.include(2, &x);
    let down = t.norm_down(2, &up).unwrap();
    assert_eq!(down.as_level().unwrap(), &x.pow(3));
    // Nm_2(alpha_2) = (-1)^q (f(Y) - alpha_1)(0) = alpha_1 up to sign
    let n2 = t.norm_down(2, &t.level(2).alpha()).unwrap();
    assert_eq!(n2.as_level().unwrap(), &l1.alpha());
    assert!(build_tower(&g, 4).is_err());
}

#[test]
fn norm_of_constants_and_identity() {
    let s = ram(3, 8, -3);
    let g = FormalGroup::default_for(&s, 32).unwrap();
    let c = s.from_int(4);
    let n = coleman_norm(&g, &TruncSeries::constant(&c, 6), NormMethod::CoefficientNorm).unwrap();
    assert_eq!(n.norm, TruncSeries::constant(&c.pow(3), 6));
    let x = coleman_norm(&g, &TruncSeries::x(&s, 6), NormMethod::ConjugateProduct).unwrap();
    // prod (X [+] w) = (-1)^(q+1) f
    assert_eq!(x.norm, TruncSeries::x(&s, 6));

    let s2 = RingSpec::zp(3, 8).unwrap();
    let gm = FormalGroup::multiplicative(&s2, 32).unwrap();
    let one_x = TruncSeries::from_ints(&s2, &[1, 1], 6);
    let n = coleman_norm(&gm, &one_x, NormMethod::ConjugateProduct).unwrap();
    assert_eq!(n.norm, one_x.with_n_eff(n.norm.n_eff()));
}

#[test]
fn norm_methods_agree_and_satisfy_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for s in [ram(3, 7, -3), ram(2, 8, -2), RingSpec::unramified(2, 7).unwrap()] {
        let g = FormalGroup::default_for(&s, 32).unwrap();
        let mut h = TruncSeries::random(&s, 8, &mut rng);
        h = h.add(&TruncSeries::constant(&s.one().sub_ref(&h.coeff(0)), 8));
        let a = norm_product(&g, &h, 24, NormMethod::ConjugateProduct).unwrap();
        let b = norm_product(&g, &h, 24, NormMethod::CoefficientNorm).unwrap();
        assert_eq!(a, b);
        let n = coleman_norm(&g, &h, NormMethod::CoefficientNorm).unwrap();
        let lhs = n.norm.compose_poly(&g.f().truncate(8)).truncate(8);
        assert_eq!(lhs, a.truncate(8).with_n_eff(n.norm.n_eff()));
        // N_f h = h mod the maximal ideal
        for k in 0..8 {
            assert!(!n.norm.coeff(k).sub_ref(&h.coeff(k)).is_unit());
        }
    }
}

#[test]
fn translate_matches_group_law() {
    let s = ram(3, 8, -3);
    let g = FormalGroup::default_for(&s, 24).unwrap();
    let t = torsion_translate(&g, 10).unwrap();
    let tw = build_tower(&g, 1).unwrap();
    let l1 = tw.level(1);
    let law = g.law().unwrap();
    // F(X, alpha) truncated in alpha: exact to floor(24 v(alpha)) digits
    for k in 0..6 {
        let mut acc = l1.from_base(&s.zero());
        for j in 0..24 - k {
            acc = acc.add(&l1.alpha().pow(j as u64).scale(&law.coeff(k, j)));
        }
        assert_eq!(acc.with_prec(5), t[k].with_prec(5), "degree {k}");
    }
}

#[test]
fn q_coordinate_multiplicative() {
    let s = RingSpec::zp(2, 30).unwrap();
    let g = FormalGroup::multiplicative(&s, 12).unwrap();
    let qc = q_coordinate(&g, &s.one()).unwrap();
    assert_eq!(qc.theta.clone().unwrap(), TruncSeries::x(&s, 12).with_n_eff(qc.theta.as_ref().unwrap().n_eff()));
    assert!(qc.certify().unwrap());
    let om = s.from_int(3);
    let qc = q_coordinate(&g, &om).unwrap();
    let th = qc.theta_scaled.coeff(1);
    assert_eq!(th.0.mul_ref(&om), s.from_u128(s.p_pow(th.1)));
}

#[test]
fn q_coordinate_reports_integrality() {
    let s = ram(2, 12, -2);
    let g = FormalGroup::default_for(&s, 10).unwrap();
    let qc = q_coordinate(&g, &s.one()).unwrap();
    assert!(qc.theta.is_some() || qc.first_nonintegral.is_some());
    if qc.theta.is_none() {
        assert!(qc.certify().is_err());
    }
}

#[test]
fn rejects_bad_parameters() {
    let s = ram(3, 6, -3);
    assert!(FormalGroup::new(&s, &s.from_int(3), 3, 8, Variant::Default).is_err());
    assert!(FormalGroup::new(&s, &s.uniformizer(), 9, 8, Variant::Default).is_err());
    assert!(FormalGroup::multiplicative(&s, 8).is_err());
}




mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// `[a] o [b] = [ab]` and `F([a], [b]) = [a + b]` for random integers.
        #[test]
        fn endomorphism_ring_structure(a in -40i64..40, b in -40i64..40) {
            let s = ram(3, 10, 3);
            let g = FormalGroup::default_for(&s, 14).unwrap();
            let (ea, eb) = (g.endomorphism(&s.from_int(a)).unwrap(), g.endomorphism(&s.from_int(b)).unwrap());
            let n = g.n_eff();
            prop_assert_eq!(ea.compose(&eb).unwrap().with_n_eff(n), g.endomorphism(&s.from_int(a * b)).unwrap().with_n_eff(n));
            prop_assert_eq!(g.add_series(&ea, &eb).unwrap().with_n_eff(n), g.endomorphism(&s.from_int(a + b)).unwrap().with_n_eff(n));
        }

        /// `[a] o f = f o [a]` for random `a` in the ring of integers.
        #[test]
        fn endomorphisms_commute_with_f(c0 in 0i64..729, c1 in 0i64..729) {
            let s = ram(3, 6, 3);
            let g = FormalGroup::default_for(&s, 12).unwrap();
            let a = s.from_coords(&[c0, c1]).unwrap();
            let ea = g.endomorphism(&a).unwrap();
            let n = g.n_eff();
            let lhs = ea.compose(g.f()).unwrap().with_n_eff(n);
            let rhs = g.f().compose(&ea).unwrap().with_n_eff(n);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
