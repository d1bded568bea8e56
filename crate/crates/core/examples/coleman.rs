//! Coleman power series: a norm-operator fixed point over Z_3, its values
//! on the torsion tower, the interpolating series, and mu^0 via tilde-log.

use ltk::coleman::{interpolate, mu_zero, norm_fixed_point, tilde_log, CompatibleSystem};
use ltk::measures::moment;
use ltk::{FormalGroup, RingSpec, Result, TorsionTower, TruncSeries};

fn main() -> Result<()> {
    let spec = RingSpec::zp(3, 10)?;
    let g = FormalGroup::multiplicative(&spec, 40)?;
    let seed = TruncSeries::from_ints(&spec, &[2, 1, 4, 1], 24);
    let fp = norm_fixed_point(&g, &seed, 8, 60)?;
    println!("fixed point after {} rounds: {:?}", fp.iterations, fp.series.truncate(6));

    let tower = TorsionTower::new(&g, 2)?;
    let sys = CompatibleSystem::from_series(&tower, &fp.series.extend_exact(40))?;
    println!("norm defects of the system: {:?}", sys.norm_defects()?.iter().map(|v| v.to_string()).collect::<Vec<_>>());
    let it = interpolate(&sys)?;
    println!("interpolant mod P (deg P = {}): {:?}", it.modulus.len() - 1, it.series.truncate(6));

    let tl = tilde_log(&g, &fp.series)?;
    println!("tilde-log integral: {}, partial integral: {}", tl.is_integral(), tl.derivative_integral());
    let mu = mu_zero(&g, &fp.series)?;
    println!("mu^0: total mass {:?}, first moment {:?}", moment(&mu, 0)?, moment(&mu, 1)?);
    Ok(())
}
