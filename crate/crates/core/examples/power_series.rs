//! Truncated series over Z_3: composition, inversion, the formal log and
//! Weierstrass preparation with the roots-of-unity cross-check.

use ltk::series::{mu_lambda_by_roots, weierstrass_prep};
use ltk::{RingSpec, Result, TruncSeries};

fn main() -> Result<()> {
    let s = RingSpec::zp(3, 8)?;
    let d = 12;
    let f = TruncSeries::from_ints(&s, &[1, 2, 0, 5], d);
    let g = TruncSeries::from_ints(&s, &[0, 3, 1], d);
    println!("f o g = {:?}", f.compose(&g)?);
    println!("1/f = {:?}", f.invert()?);
    println!("log(1 + X) = {:?}", TruncSeries::from_ints(&s, &[1, 1], d).formal_log()?);

    // 9 (X - 3)(1 + X): mu = 2, lambda = 1
    let h = TruncSeries::from_ints(&s, &[-3, 1], d).mul(&TruncSeries::from_ints(&s, &[1, 1], d)).scale_int(9);
    let w = weierstrass_prep(&h)?;
    println!("Weierstrass: mu = {}, lambda = {}, P = {:?}", w.mu, w.lambda, w.distinguished);
    let r = mu_lambda_by_roots(&h.extend_exact(8 * 18 + 1), 1..=3)?;
    println!("roots oracle: mu = {}, lambda = {} (stable from level {})", r.mu, r.lambda, r.n0);
    Ok(())
}
