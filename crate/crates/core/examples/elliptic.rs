//! Complex elliptic functions: sigma, wp and its differential equation, the
//! theta function, and the index-5 distribution relation in Z[i].

use ltk::elliptic::{distribution_relation, Lattice, LatticePair};
use ltk::Result;
use num_complex::Complex64 as C;

fn main() -> Result<()> {
    let l = Lattice::new(C::new(0.3, 1.1), C::new(1.0, 0.0))?;
    let z = C::new(0.2, 0.1);
    let (p, dp) = (l.wp(z)?, l.wp_prime(z)?);
    println!("sigma(z) = {:.10}, wp(z) = {:.10}", l.sigma(z), p);
    println!("wp'^2 - (4 wp^3 - g2 wp - g3) = {:.2e}", (dp * dp - (4.0 * p.powi(3) - l.g2() * p - l.g3())).norm());
    println!("theta(z) = {:.10}, Delta = {:.6e}", l.theta(z), l.delta());

    let outer = Lattice::new(C::new(0.0, 1.0), C::new(1.0, 0.0))?;
    let g = C::new(2.0, 1.0);
    let inner = Lattice::new(g * C::new(0.0, 1.0), g)?;
    let pair = LatticePair::new(&inner, &outer)?;
    println!("[Z[i] : (2+i)]: index {}, psi(z) = {:.10}", pair.index(), pair.psi(z)?);
    let d = distribution_relation(z, &inner, &outer, C::new(2.0, -1.0))?;
    println!("distribution relation: |ratio^12 - 1| = {:.2e}", d.twelfth_power_defect);
    Ok(())
}
