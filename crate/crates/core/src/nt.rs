//! Exact integer number theory on `u64`: factorization, totient, radicals.
//!
//! Everything here is checked arithmetic. Factorization uses trial division
//! up to [`TRIAL_LIMIT`] and then Pollard–Brent rho on the cofactor, with a
//! deterministic Miller–Rabin test deciding primality of every split part.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Trial division bound before switching to rho.
pub const TRIAL_LIMIT: u64 = 1_000_000;

/// Canonical prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, prime: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(p, _)| p == prime)
            .map_or(0, |&(_, k)| k)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Returns `(p, e)` when the value is `p^e` with `e >= 1`.
    pub fn as_prime_power(&self) -> Option<(u64, u32)> {
        match self.factors.as_slice() {
            [(p, e)] => Some((*p, *e)),
            _ => None,
        }
    }

    /// Multiplies the factors back out. Used to check the invariant.
    pub fn product(&self) -> Option<u64> {
        self.factors
            .iter()
            .try_fold(1u64, |acc, &(p, k)| acc.checked_mul(p.checked_pow(k)?))
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, k)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if *k == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{k}")?;
            }
        }
        Ok(())
    }
}

/// A fraction in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReducedRational {
    numerator: u64,
    denominator: u64,
}

impl ReducedRational {
    pub fn new(numerator: u64, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::Zero);
        }
        let g = numerator.gcd(&denominator);
        Ok(Self {
            numerator: numerator / g,
            denominator: denominator / g,
        })
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl fmt::Display for ReducedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's variant with batched gcds. `n` must be odd and composite.
fn pollard_brent(n: u64) -> u64 {
    for c in 1..n {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut ys) = (0u64, 2u64, 0u64);
        let mut g = 1u64;
        let mut r = 1u64;
        let mut q = 1u64;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("rho failed for every constant on composite {n}")
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split_into(d, out);
    split_into(n / d, out);
}

/// Factors `n` into primes. Rejects `n = 0`.
pub fn factor(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Zero);
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut push = |p: u64, rest: &mut u64| {
        let mut k = 0;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            k += 1;
        }
        if k > 0 {
            factors.push((p, k));
        }
    };
    push(2, &mut rest);
    let mut d = 3u64;
    while d <= TRIAL_LIMIT && d.saturating_mul(d) <= rest {
        push(d, &mut rest);
        d += 2;
    }
    if rest > 1 {
        let mut big = Vec::new();
        split_into(rest, &mut big);
        big.sort_unstable();
        for p in big {
            match factors.last_mut() {
                Some((last, k)) if *last == p => *k += 1,
                _ => factors.push((p, 1)),
            }
        }
    }
    Ok(Factorization { value: n, factors })
}

/// Returns `(p, e)` if `q = p^e`, otherwise [`Error::NotPrimePower`].
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    factor(q)?.as_prime_power().ok_or(Error::NotPrimePower(q))
}

pub fn euler_phi(f: &Factorization) -> u64 {
    // p^(k-1) (p-1) <= p^k, so this never exceeds the value itself.
    f.factors
        .iter()
        .map(|&(p, k)| p.pow(k - 1) * (p - 1))
        .product()
}

pub fn rad(f: &Factorization) -> u64 {
    f.primes().product()
}

/// `rad(n)` if `4` does not divide `n`, else `2 rad(n)`.
pub fn rad4(f: &Factorization) -> u64 {
    let r = rad(f);
    if f.exponent_of(2) >= 2 {
        // 4 | n implies rad(n) <= n / 2.
        2 * r
    } else {
        r
    }
}

/// `phi(n)/n` in lowest terms; depends only on the radical.
pub fn phi_over(f: &Factorization) -> ReducedRational {
    let r = rad(f);
    let phi_r: u64 = f.primes().map(|p| p - 1).product();
    ReducedRational::new(phi_r, r).expect("radical is positive")
}
