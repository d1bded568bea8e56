//! Characteristic ideals of presentations over Z_3[[T]]: a planted Smith
//! form hidden by scrambling, and additivity along a short exact sequence.

use ltk::iwasawa::{additivity_check, char_ideal, ExactSequence, LambdaPresentation};
use ltk::{RingSpec, Result, TruncSeries};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let s = RingSpec::zp(3, 10)?;
    let d = 16;
    let planted = LambdaPresentation::diagonal(&[
        TruncSeries::from_ints(&s, &[3], d),
        TruncSeries::from_ints(&s, &[-3, 1], d),
        TruncSeries::from_ints(&s, &[1], d),
    ])?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let hidden = planted.scramble(20, &mut rng);
    let w = char_ideal(&hidden)?;
    println!("scrambled diag(3, T - 3, 1): mu = {}, lambda = {}, P = {:?}", w.mu, w.lambda, w.distinguished);

    let a = LambdaPresentation::diagonal(&[TruncSeries::from_ints(&s, &[3, 0, 1], d)])?;
    let b = LambdaPresentation::diagonal(&[TruncSeries::from_ints(&s, &[9, 9], d)])?;
    let c = vec![vec![TruncSeries::random(&s, d, &mut rng)]];
    let r = additivity_check(&ExactSequence::block(a, b, &c)?)?;
    println!("char(middle) = char(sub) char(quotient): {} (mu {}, lambda {})", r.holds(), r.middle.mu, r.middle.lambda);
    Ok(())
}
