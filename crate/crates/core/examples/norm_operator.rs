//! The torsion tower and the Coleman norm operator over Z_3[sqrt(-3)], by
//! the conjugate product and by the coefficient norm.

use ltk::lubin_tate::{coleman_norm, NormMethod};
use ltk::{FormalGroup, RingSpec, Result, TorsionTower, TruncSeries};

fn main() -> Result<()> {
    let spec = RingSpec::ramified(3, 8, -3)?;
    let g = FormalGroup::default_for(&spec, 32)?;
    let tower = TorsionTower::new(&g, 2)?;
    for m in 1..=2 {
        let l = tower.level(m);
        println!("level {m}: degree {}, v(alpha) = {}", l.degree(), l.v_alpha());
    }
    let h = TruncSeries::from_ints(&spec, &[1, 1, 2, 0, 1], 8);
    let a = coleman_norm(&g, &h, NormMethod::ConjugateProduct)?;
    let b = coleman_norm(&g, &h, NormMethod::CoefficientNorm)?;
    println!("N_f h = {:?}", a.norm);
    println!("methods agree: {}", a.norm == b.norm);
    Ok(())
}
