//! Measures through their Amice transforms: point masses, moments, coset
//! masses, restriction to the units and a twisted integral.

use ltk::measures::{coset_masses, dirac, moment, twist_eval, CharDomain, FiniteCharacter};
use ltk::{GroupTag, Result, RingSpec};

fn main() -> Result<()> {
    let s = RingSpec::zp(7, 8)?;
    let mu = dirac(&s.from_int(5), GroupTag::Zp, 32)?;
    println!("int x^3 d(delta_5) = {:?}", moment(&mu, 3)?);

    let units = dirac(&s.from_int(10), GroupTag::ZpUnits, 32)?;
    for (d, m) in coset_masses(&units, 1)? {
        if !m.is_zero() {
            println!("mass of {:?} (1 + 7 Z_7) = {:?}", d.coords(), m);
        }
    }
    // tilde shrinks the cap by (p - 1) N_eff
    let off = dirac(&s.from_int(14), GroupTag::Zp, 64)?;
    println!("restriction of delta_14 to the units is zero: {}", off.tilde()?.amice().is_zero());

    let chi = FiniteCharacter::teichmuller_power(&s, CharDomain::Zp, 1)?;
    println!("int omega(x) x d(delta_10) = {:?}", twist_eval(&units, &chi, 1)?);
    Ok(())
}
