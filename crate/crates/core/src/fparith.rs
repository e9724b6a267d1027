//! Arithmetic over the prime field F_p together with the binomial
//! coefficients and summation bounds that parameterize the relations and
//! differential of the lambda algebra.

use std::fmt;

use crate::error::LambdaError;

/// An odd prime `p`, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeContext {
    p: u32,
}

/// A residue in `[0, p)`. The prime is carried by the [`PrimeContext`] that
/// performs the arithmetic, not by the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp(pub u32);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeContext {
    /// Largest prime accepted. Keeps every product of two residues inside `u64`
    /// and every generator degree inside `u32` for the index ranges we sweep.
    pub const MAX_PRIME: u32 = 1 << 15;

    pub fn new(p: u32) -> Result<Self, LambdaError> {
        if p < 3 || p > Self::MAX_PRIME || !is_prime(p as u64) {
            return Err(LambdaError::InvalidPrime(p as i64));
        }
        Ok(PrimeContext { p })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, x: i64) -> Fp {
        Fp(x.rem_euclid(self.p as i64) as u32)
    }

    #[inline]
    pub fn add(self, a: Fp, b: Fp) -> Fp {
        let s = a.0 + b.0;
        Fp(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    pub fn sub(self, a: Fp, b: Fp) -> Fp {
        Fp(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 })
    }

    #[inline]
    pub fn neg(self, a: Fp) -> Fp {
        Fp(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    #[inline]
    pub fn mul(self, a: Fp, b: Fp) -> Fp {
        Fp(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32)
    }

    pub fn pow(self, a: Fp, mut e: u64) -> Fp {
        let mut base = a;
        let mut acc = Fp::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: Fp) -> Option<Fp> {
        if a.is_zero() {
            None
        } else {
            Some(self.pow(a, self.p as u64 - 2))
        }
    }

    /// `(-1)^e` as a residue.
    #[inline]
    pub fn sign(self, e: u64) -> Fp {
        if e % 2 == 0 {
            Fp::ONE
        } else {
            Fp(self.p - 1)
        }
    }

    /// Representative in `(-p/2, p/2]`, used for display.
    pub fn symmetric(self, a: Fp) -> i64 {
        let v = a.0 as i64;
        if v > self.p as i64 / 2 {
            v - self.p as i64
        } else {
            v
        }
    }

    /// `C(n, k) mod p` by Lucas' theorem. Negative `n` or `k`, and `k > n`,
    /// give zero.
    pub fn binom(self, n: i64, k: i64) -> Fp {
        if n < 0 || k < 0 || k > n {
            return Fp::ZERO;
        }
        let p = self.p as i64;
        let (mut n, mut k) = (n, k);
        let mut acc = Fp::ONE;
        while k > 0 || n > 0 {
            let (nd, kd) = (n % p, k % p);
            if kd > nd {
                return Fp::ZERO;
            }
            acc = self.mul(acc, self.small_binom(nd as u32, kd as u32));
            n /= p;
            k /= p;
        }
        acc
    }

    // C(n, k) mod p for 0 <= k <= n < p.
    fn small_binom(self, n: u32, k: u32) -> Fp {
        let k = k.min(n - k);
        let mut num = Fp::ONE;
        let mut den = Fp::ONE;
        for t in 0..k {
            num = self.mul(num, Fp(n - t));
            den = self.mul(den, Fp(t + 1));
        }
        self.mul(num, self.inv(den).expect("k! is a unit for k < p"))
    }

    /// `a(k, j) = (-1)^(j+1) C((p-1)(k-j) - 1, j)`.
    pub fn coeff_a(self, k: i64, j: i64) -> Fp {
        let top = (self.p as i64 - 1) * (k - j) - 1;
        let c = self.binom(top, j);
        self.mul(self.sign((j + 1).rem_euclid(2) as u64), c)
    }

    /// `b(k, j) = (-1)^j C((p-1)(k-j), j)`.
    pub fn coeff_b(self, k: i64, j: i64) -> Fp {
        let top = (self.p as i64 - 1) * (k - j);
        let c = self.binom(top, j);
        self.mul(self.sign(j.rem_euclid(2) as u64), c)
    }

    /// `N(k) = floor(k - (k+1)/p)`; `-1` signals an empty range.
    pub fn bound_n(self, k: i64) -> i64 {
        let p = self.p as i64;
        (p * k - (k + 1)).div_euclid(p)
    }

    /// `N'(k) = floor(k - k/p)`.
    pub fn bound_n_prime(self, k: i64) -> i64 {
        let p = self.p as i64;
        (p * k - k).div_euclid(p)
    }

    /// p-adic valuation of a positive integer.
    pub fn valuation(self, n: i128) -> Result<u32, LambdaError> {
        if n == 0 {
            return Err(LambdaError::Domain("p-adic valuation of 0 is undefined".into()));
        }
        let p = self.p as i128;
        let mut n = n.abs();
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        Ok(e)
    }
}

impl fmt::Display for PrimeContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={}", self.p)
    }
}
