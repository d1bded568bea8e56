//! Residue arithmetic modulo a prime power below 2^126.

/// A modulus `p^N` together with the multiplication strategy it admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Modulus {
    pub m: u128,
    tier: Tier,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tier {
    Word32,
    Word64,
    Wide,
}

pub(crate) const MAX_MODULUS_BITS: u32 = 126;

impl Modulus {
    pub fn new(m: u128) -> Self {
        debug_assert!((1..(1u128 << MAX_MODULUS_BITS)).contains(&m));
        let tier = if m < (1u128 << 32) {
            Tier::Word32
        } else if m < (1u128 << 64) {
            Tier::Word64
        } else {
            Tier::Wide
        };
        Modulus { m, tier }
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        match self.tier {
            Tier::Word32 => ((a as u64 * b as u64) % self.m as u64) as u128,
            Tier::Word64 => (a * b) % self.m,
            Tier::Wide => wide_mulmod(a, b, self.m),
        }
    }

    /// Reduces a signed integer into `[0, m)`.
    pub fn from_i128(&self, x: i128) -> u128 {
        let m = self.m as i128;
        let r = x % m;
        if r < 0 {
            (r + m) as u128
        } else {
            r as u128
        }
    }

    /// Inverse of a residue coprime to `m`, by the extended Euclidean algorithm.
    pub fn inv(&self, a: u128) -> Option<u128> {
        if self.m == 1 {
            return Some(0);
        }
        let (mut r0, mut r1) = (self.m as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        (r0 == 1).then(|| self.from_i128(s0))
    }
}

// Operands are below 2^126, so doubling never overflows.
fn wide_mulmod(a: u128, b: u128, m: u128) -> u128 {
    let mut r = 0u128;
    let mut x = a;
    let mut y = b;
    while y > 0 {
        if y & 1 == 1 {
            r += x;
            if r >= m {
                r -= m;
            }
        }
        x <<= 1;
        if x >= m {
            x -= m;
        }
        y >>= 1;
    }
    r
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub(crate) fn vp(mut x: u128, p: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let p = p as u128;
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    Some(v)
}

pub(crate) fn vp_u64(x: u64, p: u64) -> u32 {
    vp(x as u128, p).unwrap_or(0)
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
