//! Acceptance run: one PASS/FAIL line per criterion, with the numbers behind
//! the verdict. Criteria never panic; an error inside one is a FAIL.
//!
//! The process exits non-zero when a criterion fails that is not in
//! `KNOWN_FAILURES`. Those three fail for mathematical reasons recorded in
//! the decisions ledger, and they are still printed as FAIL.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64 as C;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ltk::coleman::{interpolate, norm_fixed_point, reduce_mod, tilde_log, CompatibleSystem};
use ltk::elliptic::{distribution_relation, Lattice, LatticePair};
use ltk::iwasawa::{additivity_check, ExactSequence, LambdaPresentation};
use ltk::lubin_tate::{check_factorization, coleman_norm, norm_product, NormMethod};
use ltk::measures::{
    coset_mass, coset_masses, coset_numerator, dirac, mass_off_units, residue_class_mass, riemann_moment, tilde,
    varsigma,
};
use ltk::series::{mu_lambda_by_roots, weierstrass_prep};
use ltk::{FormalGroup, GroupTag, Measure, RingElem, RingSpec, TorsionTower, TruncSeries, Valuation};

/// Unramified omega factorization (1), ramified tilde-log integrality (9)
/// and literal theta periodicity (10).
const KNOWN_FAILURES: [u32; 3] = [1, 9, 10];

type Verdict = ltk::Result<(bool, String)>;

fn ram(p: u64, n: u32) -> RingSpec {
    RingSpec::ramified(p, n, -(p as i64)).expect("ramified ring")
}

fn unit_series(spec: &RingSpec, d: usize, rng: &mut ChaCha8Rng) -> TruncSeries {
    let g = TruncSeries::random(spec, d, rng);
    if g.coeff(0).is_unit() {
        g
    } else {
        g.add(&TruncSeries::one(spec, d))
    }
}

fn random_unit(spec: &RingSpec, rng: &mut ChaCha8Rng) -> RingElem {
    let p = spec.p() as i64;
    let m = p.pow(spec.prec().min(12));
    loop {
        let a = rng.gen_range(1..m);
        if a % p != 0 {
            return spec.from_int(a);
        }
    }
}

fn criterion_1() -> Verdict {
    let cases = [("p=2 ramified pi^2=-2", ram(2, 18)), ("p=3 ramified pi^2=-3", ram(3, 18)), ("p=2 unramified", RingSpec::unramified(2, 18)?)];
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, spec) in cases {
        for n in 1..=2u32 {
            let start = Instant::now();
            let q = FormalGroup::default_for(&spec, 2)?.q() as usize;
            let cap = q.pow(2 * n) + 8;
            let g = FormalGroup::default_for(&spec, cap)?;
            let a = spec.from_int(spec.p().pow(n) as i64);
            let chk = check_factorization(&g, n, &a, cap, 6)?;
            let secs = start.elapsed().as_secs_f64();
            let good = chk.matches && secs < 30.0;
            ok &= good;
            lines.push(format!(
                "{name} n={n}: deg {} cap {} lambda([p^n]) {:?} unit match {} ({secs:.1}s)",
                chk.degree, chk.cap, chk.endo_lambda, chk.unit_match
            ));
        }
    }
    Ok((ok, lines.join("; ")))
}

fn criterion_2() -> Verdict {
    let mut failures = 0;
    let mut total = 0;
    for (spec, d) in [(ram(2, 10), 40), (ram(3, 10), 96)] {
        let grp = FormalGroup::default_for(&spec, 16)?;
        let tower = TorsionTower::new(&grp, 2)?;
        let mut rng = ChaCha8Rng::seed_from_u64(200 + spec.p());
        for _ in 0..50 {
            let g = unit_series(&spec, d, &mut rng);
            let it = interpolate(&CompatibleSystem::from_series(&tower, &g)?)?;
            total += 1;
            if it.digits < 5 || it.series.with_n_eff(5) != reduce_mod(&g, &it.modulus).with_n_eff(5) {
                failures += 1;
            }
        }
    }
    Ok((failures == 0, format!("{failures}/{total} round trips differ mod (pibar_1 pibar_2, p^5)")))
}

fn criterion_3() -> Verdict {
    const CAP: usize = 24;
    const DIGITS: u32 = 5;
    let mut bad = Vec::new();
    for spec in [ram(2, 9), ram(3, 8)] {
        let grp = FormalGroup::default_for(&spec, 64)?;
        let f = grp.f();
        let mut rng = ChaCha8Rng::seed_from_u64(300 + spec.p());
        for i in 0..25 {
            let h = unit_series(&spec, CAP, &mut rng);
            let a = norm_product(&grp, &h, CAP, NormMethod::ConjugateProduct)?;
            let b = norm_product(&grp, &h, CAP, NormMethod::CoefficientNorm)?;
            let n = coleman_norm(&grp, &h, NormMethod::ConjugateProduct)?.norm;
            let lhs = n.compose_poly(&f.truncate(CAP)).truncate(CAP);
            let enough = a.n_eff().min(b.n_eff()).min(lhs.n_eff()) >= DIGITS;
            let agree = a.with_n_eff(DIGITS) == b.with_n_eff(DIGITS);
            let law = lhs.with_n_eff(DIGITS) == a.with_n_eff(DIGITS);
            if !(enough && agree && law) {
                bad.push(format!("p={} g#{i} digits {} agree {agree} law {law}", spec.p(), a.n_eff().min(b.n_eff())));
            }
        }
    }
    let detail = if bad.is_empty() { "50/50 series agree mod (p^5, X^24), both methods and the law".into() } else { bad.join("; ") };
    Ok((bad.is_empty(), detail))
}

fn criterion_4() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for p in [2u64, 3] {
        let spec = RingSpec::zp(p, 10)?;
        let mut rng = ChaCha8Rng::seed_from_u64(400 + p);
        let (mut fixed, mut killed) = (0, 0);
        for _ in 0..20 {
            let mu = dirac(&random_unit(&spec, &mut rng), GroupTag::Zp, 40)?;
            let t = tilde(mu.amice())?;
            fixed += usize::from(t == mu.amice().truncate(t.cap()));
            let b = spec.from_int(p as i64 * rng.gen_range(0..1000));
            killed += usize::from(tilde(dirac(&b, GroupTag::Zp, 40)?.amice())?.is_zero());
        }
        let mut idem = 0;
        for _ in 0..50 {
            let h = TruncSeries::random(&spec, 40, &mut rng);
            let t = tilde(&h)?;
            let tt = tilde(&t)?;
            idem += usize::from(tt == t.truncate(tt.cap()));
        }
        // restriction to the units, measure side against series side
        let mut restrict = true;
        for _ in 0..4 {
            let mu = Measure::new(TruncSeries::random(&spec, 60, &mut rng), GroupTag::Zp)?;
            let res = mu.tilde()?;
            for n in 1..=2 {
                restrict &= coset_masses(&mu, n)? == coset_masses(&res, n)?;
                for x in (0..p.pow(n)).step_by(p as usize) {
                    restrict &= residue_class_mass(&res, &spec.from_int(x as i64), n)?.is_zero();
                }
            }
            restrict &= mass_off_units(&res)?.is_zero();
        }
        ok &= fixed == 20 && killed == 20 && idem == 50 && restrict;
        notes.push(format!("p={p}: units fixed {fixed}/20, pZ_p killed {killed}/20, idempotent {idem}/50, restriction {restrict}"));
    }
    Ok((ok, notes.join("; ")))
}

fn criterion_5() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for spec in [ram(2, 10), ram(3, 10)] {
        let p = spec.p() as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(500 + spec.p());
        let mu = Measure::new(TruncSeries::random(&spec, 48, &mut rng), GroupTag::OKp)?;
        let lvl1 = coset_masses(&mu, 1)?;
        let lvl2 = coset_masses(&mu, 2)?;
        let mut partition = true;
        let mut lifts = true;
        for (d, m) in &lvl1 {
            let sum = lvl2
                .iter()
                .filter(|(e, _)| e.coords().iter().zip(d.coords()).all(|(x, y)| x % p as u128 == y % p as u128))
                .fold(spec.zero(), |acc, (_, x)| acc.add_ref(x));
            partition &= &sum == m;
            for _ in 0..2 {
                let r = spec.from_coords(&[rng.gen_range(0..50), rng.gen_range(0..50)])?;
                let other = d.add_ref(&r.scale(p));
                lifts &= &coset_mass(&mu, &other, 1)? == m;
            }
        }
        // point masses on the units: the coset of varsigma(a) gets 1, the rest 0
        let mut indicator = true;
        let mut tried = 0;
        while tried < 6 {
            let a = spec.from_coords(&[rng.gen_range(0..200), rng.gen_range(0..200)])?;
            let s = varsigma(&a)?;
            if !s.is_unit() {
                continue;
            }
            tried += 1;
            let pm = dirac(&a, GroupTag::OKpUnits, 40)?;
            for n in 1..=2u32 {
                let pn = spec.p().pow(n) as u128;
                let target = s.coords()[0] % pn;
                for (d, m) in coset_masses(&pm, n)? {
                    let hit = d.coords()[0] % pn == target && d.coords()[1] % pn == 0;
                    indicator &= if hit { m.is_one() } else { m.is_zero() };
                }
            }
        }
        // divisibility: admissible numerators reach p^(2n); T/p does not
        let mut admissible = true;
        for n in 1..=2u32 {
            for (d, _) in coset_masses(&mu, n)? {
                let c = coset_numerator(&mu, &d, n)?;
                admissible &= c.valuation >= Valuation::int(c.required as i64);
            }
        }
        let bad = Measure::with_denominator(TruncSeries::x(&spec, 40), 1, GroupTag::OKp)?;
        let negative = matches!(coset_mass(&bad, &spec.one(), 1), Err(ltk::Error::NotDivisible(_)));
        let all = partition && lifts && indicator && admissible && negative;
        ok &= all;
        notes.push(format!(
            "p={}: partition {partition}, lift independence {lifts}, dirac indicator {indicator}, p^(2n) divisibility {admissible}, negative control rejected {negative}",
            spec.p()
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn criterion_6() -> Verdict {
    let mut worst: Option<(i64, String)> = None;
    let mut ok = true;
    for spec in [RingSpec::zp(2, 12)?, RingSpec::zp(3, 10)?, ram(2, 10), ram(3, 10)] {
        let tag = if spec.has_quad() { GroupTag::OKpUnits } else { GroupTag::ZpUnits };
        let mut rng = ChaCha8Rng::seed_from_u64(600 + spec.p());
        for _ in 0..3 {
            let mut mu: Option<Measure> = None;
            for _ in 0..3 {
                let a = random_unit(&spec, &mut rng);
                let c = spec.from_int(rng.gen_range(-20..20));
                let term = dirac(&a, tag, 48)?.scale(&c);
                mu = Some(match mu {
                    None => term,
                    Some(m) => m.add(&term)?,
                });
            }
            let mu = mu.expect("three point masses");
            for k in 0..=4usize {
                let m = ltk::measures::moment(&mu, k)?;
                for n in 1..=2u32 {
                    let r = riemann_moment(&mu, k as u32, n)?;
                    let v = m.sub_ref(&r).valuation();
                    let need = Valuation::int(n as i64 - 1);
                    ok &= v >= need;
                    let vi = match v {
                        Valuation::Finite(x) => x.floor().to_integer() - n as i64,
                        Valuation::Infinite => i64::MAX,
                    };
                    if worst.as_ref().is_none_or(|w| vi < w.0) {
                        worst = Some((vi, format!("ring p={} rank {}, k={k}, n={n}: v = {v}", spec.p(), spec.rank())));
                    }
                }
            }
        }
    }
    let (_, w) = worst.expect("cases ran");
    Ok((ok, format!("tightest agreement: {w}")))
}

/// Both oracles read `f` as an exact polynomial: the roots side evaluates a
/// zero-padded copy long enough that `cap * v(zeta - 1) >= N`.
fn roots_of_poly(f: &TruncSeries, levels: u32) -> ltk::Result<ltk::series::RootsReport> {
    let p = f.spec().p() as usize;
    let phi = (p - 1) * p.pow(levels - 1);
    mu_lambda_by_roots(&f.extend_exact(phi * f.spec().prec() as usize + 1), 1..=levels)
}

fn criterion_7() -> Verdict {
    let mut mismatches = Vec::new();
    let mut count = 0;
    for (p, levels) in [(2u64, 6u32), (3, 4)] {
        let spec = RingSpec::zp(p, 8)?;
        let mut rng = ChaCha8Rng::seed_from_u64(700 + p);
        for i in 0..100 {
            let f = TruncSeries::random(&spec, 16, &mut rng);
            let w = weierstrass_prep(&f)?;
            let r = roots_of_poly(&f, levels)?;
            count += 1;
            if r.mu != w.mu || r.lambda != Ratio::from_integer(w.lambda as i64) {
                mismatches.push(format!("p={p} #{i}: prep ({}, {}) roots ({}, {})", w.mu, w.lambda, r.mu, r.lambda));
            }
        }
        // planted p^mu P(T) U(T) with P distinguished of degree lambda
        for mu in 0..=2u32 {
            for lambda in 0..=4usize {
                let mut dist: Vec<i64> = (0..lambda).map(|_| p as i64 * rng.gen_range(-5..5)).collect();
                dist.push(1);
                let pd = TruncSeries::from_ints(&spec, &dist, 16);
                let f = unit_series(&spec, 16, &mut rng).mul(&pd).scale(&spec.from_int((p as i64).pow(mu)));
                let w = weierstrass_prep(&f)?;
                let r = roots_of_poly(&f, levels)?;
                count += 1;
                let planted = (Ratio::from_integer(mu as i64), lambda);
                if (w.mu, w.lambda) != planted || (r.mu, r.lambda) != (planted.0, Ratio::from_integer(lambda as i64)) {
                    mismatches.push(format!("planted ({mu}, {lambda}) p={p}: prep ({}, {}) roots ({}, {})", w.mu, w.lambda, r.mu, r.lambda));
                }
            }
        }
    }
    let detail = if mismatches.is_empty() { format!("{count}/{count} series agree, planted values recovered") } else { mismatches.join("; ") };
    Ok((mismatches.is_empty(), detail))
}

fn criterion_8() -> Verdict {
    const D: usize = 16;
    let mut failed = Vec::new();
    for i in 0..50u64 {
        let spec = if i % 2 == 0 { RingSpec::zp(3, 10)? } else { ram(3, 10) };
        let mut rng = ChaCha8Rng::seed_from_u64(800 + i);
        let na = rng.gen_range(1..=2);
        let nb = rng.gen_range(1..=2);
        let mat = |n: usize, rng: &mut ChaCha8Rng| -> Vec<Vec<TruncSeries>> {
            (0..n).map(|_| (0..n).map(|_| TruncSeries::random(&spec, D, rng)).collect()).collect()
        };
        let a = LambdaPresentation::new(mat(na, &mut rng))?;
        let b = LambdaPresentation::new(mat(nb, &mut rng))?;
        let c: Vec<Vec<TruncSeries>> = (0..na).map(|_| (0..nb).map(|_| TruncSeries::random(&spec, D, &mut rng)).collect()).collect();
        let r = additivity_check(&ExactSequence::block(a, b, &c)?)?;
        if !r.holds() {
            failed.push(format!("#{i}: mu {} lambda {} distinguished {}", r.mu_ok, r.lambda_ok, r.distinguished_ok));
        }
    }
    let detail = if failed.is_empty() { "50/50 sequences multiplicative up to unit".into() } else { failed.join("; ") };
    Ok((failed.is_empty(), detail))
}

fn criterion_9() -> Verdict {
    let mut integral = 0;
    let mut total = 0;
    let mut offending = Vec::new();
    for spec in [ram(2, 10), ram(3, 10)] {
        let grp = FormalGroup::default_for(&spec, 40)?;
        let mut rng = ChaCha8Rng::seed_from_u64(900 + spec.p());
        for i in 0..10 {
            let fp = norm_fixed_point(&grp, &unit_series(&spec, 24, &mut rng), 8, 60)?;
            let tl = tilde_log(&grp, &fp.series)?;
            total += 1;
            match (tl.first_nonintegral, tl.derivative_first_nonintegral) {
                (None, None) => integral += 1,
                (v, d) => offending.push(format!(
                    "p={} #{i}: value coeff {}, partial coeff {} (N_eff {})",
                    spec.p(),
                    v.map_or("-".into(), |k| format!("X^{k}")),
                    d.map_or("-".into(), |k| format!("X^{k}")),
                    tl.value.numer.n_eff().saturating_sub(tl.value.pdenom),
                )),
            }
        }
    }
    let mut detail = format!("{integral}/{total} fixed points give integral tilde-log and partial");
    if !offending.is_empty() {
        detail += &format!("; first offending coefficients: {}", offending.join(", "));
    }
    Ok((integral == total, detail))
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn criterion_10() -> Verdict {
    let start = Instant::now();
    let lattices = [
        Lattice::new(C::new(0.3, 1.1), C::new(1.0, 0.0))?,
        Lattice::new(C::new(0.0, 1.0), C::new(1.0, 0.0))?,
        Lattice::new(C::new(-0.4, 2.3), C::new(0.8, 0.1))?,
    ];
    let points = [C::new(0.13, 0.21), C::new(-0.4, 0.35), C::new(0.27, -0.19)];
    let (mut odd, mut periodic, mut ode) = (0.0f64, 0.0f64, 0.0f64);
    let mut phase = C::new(1.0, 0.0);
    for l in &lattices {
        let (w1, w2) = l.periods();
        for &z in &points {
            odd = odd.max(rel(l.sigma(-z), -l.sigma(z)));
            for w in [w1, w2] {
                let r = l.theta(z + w) / l.theta(z);
                if (r - 1.0).norm() > periodic {
                    periodic = (r - 1.0).norm();
                    phase = r;
                }
            }
            let p = l.wp(z)?;
            let dp = l.wp_prime(z)?;
            let rhs = 4.0 * p.powi(3) - l.g2() * p - l.g3();
            ode = ode.max((dp * dp - rhs).norm() / ((dp * dp).norm() + (4.0 * p.powi(3)).norm()));
        }
    }
    // L = (2 + i) Z[i] inside Z[i], index 5, alpha = 2 - i
    let outer = Lattice::new(C::new(0.0, 1.0), C::new(1.0, 0.0))?;
    let g = C::new(2.0, 1.0);
    let inner = Lattice::new(g * C::new(0.0, 1.0), g)?;
    let pair = LatticePair::new(&inner, &outer)?;
    let delta12 = rel(pair.delta().powi(12), inner.delta().powi(pair.index() as i32) / outer.delta());
    let mut dist = 0.0f64;
    let mut first: Option<C> = None;
    let mut constant = 0.0f64;
    for z in [C::new(0.13, 0.29), C::new(0.41, -0.17), C::new(-0.22, 0.08)] {
        let d = distribution_relation(z, &inner, &outer, C::new(2.0, -1.0))?;
        dist = dist.max(d.twelfth_power_defect);
        let r = *first.get_or_insert(d.ratio);
        constant = constant.max(rel(d.ratio, r));
    }
    let secs = start.elapsed().as_secs_f64();
    let checks = [
        ("sigma odd", odd, 1e-10),
        ("theta periodic", periodic, 1e-8),
        ("wp equation", ode, 1e-9),
        ("psi distribution", dist.max(constant), 1e-6),
        ("delta^12", delta12, 1e-8),
    ];
    let ok = checks.iter().all(|(_, v, t)| v <= t) && secs < 60.0;
    let mut parts: Vec<String> =
        checks.iter().map(|(n, v, t)| format!("{n} {v:.1e} (tol {t:.0e}) {}", if v <= t { "ok" } else { "FAIL" })).collect();
    parts.push(format!("theta(z+w)/theta(z) = {:.6}{:+.6}i, arg/pi {:.4}", phase.re, phase.im, phase.arg() / PI));
    parts.push(format!("{secs:.2}s"));
    Ok((ok, parts.join("; ")))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Verdict); 10] = [
        (1, "omega factorization", criterion_1),
        (2, "Coleman round trip", criterion_2),
        (3, "norm operator law", criterion_3),
        (4, "tilde semantics", criterion_4),
        (5, "O_K-measure consistency", criterion_5),
        (6, "moments vs Riemann sums", criterion_6),
        (7, "mu/lambda oracle equivalence", criterion_7),
        (8, "char ideal additivity", criterion_8),
        (9, "tilde-log integrality", criterion_9),
        (10, "elliptic relations", criterion_10),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = Vec::new();
    let mut elapsed = Duration::ZERO;
    for (id, name, run) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match catch_unwind(AssertUnwindSafe(run)) {
            Ok(Ok(v)) => v,
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".into()),
        };
        let t = start.elapsed();
        elapsed += t;
        println!("{} {id:>2} {name}: {detail} [{:.1}s]", if pass { "PASS" } else { "FAIL" }, t.as_secs_f64());
        if !pass && !KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
        if pass && KNOWN_FAILURES.contains(&id) {
            println!("note: criterion {id} is listed as a known failure but passed");
        }
    }
    println!("total {:.1}s", elapsed.as_secs_f64());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
