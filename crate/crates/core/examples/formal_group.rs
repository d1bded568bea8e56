//! The Lubin-Tate group of f = pi X + X^2 over Z_2[sqrt(-2)]: the group law,
//! endomorphisms, the omega polynomials and the factorization of [2].

use ltk::lubin_tate::{check_factorization, omega_polys};
use ltk::{FormalGroup, RingSpec, Result};

fn main() -> Result<()> {
    let spec = RingSpec::ramified(2, 16, -2)?;
    let g = FormalGroup::default_for(&spec, 24)?;
    println!("q = {}, pi = {:?}, f = {:?}", g.q(), g.pi(), g.f_poly());
    println!("[3]_f = {:?}", g.endomorphism(&spec.from_int(3))?.truncate(6));
    println!("invariant differential = {:?}", g.log_derivative()?.truncate(6));

    let om = omega_polys(&g, 2)?;
    println!("omega+_2 = {:?}", om.plus);
    println!("omega~-_2 = {:?}", om.minus_tilde);
    // 2 = -pi^2: omega+_2 omega~-_2 times a unit is [2]_f
    let chk = check_factorization(&g, 1, &spec.from_int(2), 12, 6)?;
    println!("omega+_2 omega~-_2 ~ [2]_f: {} (degree {}, {} digits)", chk.matches, chk.degree, chk.digits);
    Ok(())
}
