//! Residue arithmetic in Z_3, Z_3[sqrt(-3)] and Z_3[i]: valuations,
//! inverses, Teichmuller lifts, log and exp.

use ltk::{RingSpec, Result};

fn main() -> Result<()> {
    let zp = RingSpec::zp(3, 10)?;
    let a = zp.from_int(7);
    let b = zp.from_int(18);
    println!("Z_3 mod 3^10: 7 * 18 = {:?}, v(18) = {}", a.mul_ref(&b), b.valuation());
    println!("7^-1 = {:?}, Teichmuller(7) = {:?}", a.inverse()?, a.teichmuller()?);

    // pi^2 = -3: v(pi) = 1/2
    let ram = RingSpec::ramified(3, 10, -3)?;
    let pi = ram.uniformizer();
    println!("ramified: v(pi) = {}, pi^2 = {:?}", pi.valuation(), pi.mul_ref(&pi));
    let u = ram.from_coords(&[1, 3])?;
    let l = u.padic_log()?;
    println!("log(1 + 3 pi) = {:?}, exp(log) = {:?}", l, l.padic_exp()?);

    let unr = RingSpec::unramified(3, 8)?;
    let w = unr.from_coords(&[2, 1])?;
    println!("unramified: Frobenius(2 + w) = {:?}, norm = {:?}", w.frobenius()?, w.norm_to_base());
    Ok(())
}
