//! Finite fields, multiplicative orders, the binomial irreducibility
//! criterion and the exhaustive Rabin-test oracle built on them.

mod field;
mod poly;

pub use field::{FieldCtx, FieldElement, DEFAULT_FIELD_CEILING};
pub use poly::{rabin_irreducible, Poly};

use num_integer::Integer;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nt::{self, Factorization};

/// Environment variable overriding [`OracleConfig::census_q_ceiling`].
pub const CEILING_ENV: &str = "BINOMCENSUS_ORACLE_CEILING";

/// Resource limits for field construction and exhaustive censuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest `q` for which a field may be built.
    pub field_ceiling: u64,
    /// Largest `q` for which every binomial is Rabin-tested.
    pub census_q_ceiling: u64,
    /// Largest degree the exhaustive census will test.
    pub census_t_ceiling: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            field_ceiling: DEFAULT_FIELD_CEILING,
            census_q_ceiling: 64,
            census_t_ceiling: 200,
        }
    }
}

impl OracleConfig {
    /// Defaults, with the census `q` ceiling taken from
    /// [`CEILING_ENV`] when it is set to a positive integer.
    pub fn from_env() -> Self {
        let mut cfg = Self::default();
        if let Some(c) = std::env::var(CEILING_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .filter(|&c| c > 0)
        {
            cfg.census_q_ceiling = c;
            cfg.field_ceiling = cfg.field_ceiling.max(c);
        }
        cfg
    }

    pub fn check_census(&self, q: u64, t: u64) -> Result<()> {
        if q > self.census_q_ceiling {
            return Err(Error::CeilingExceeded {
                q,
                ceiling: self.census_q_ceiling,
            });
        }
        if t > self.census_t_ceiling {
            return Err(Error::DegreeCeilingExceeded {
                t,
                ceiling: self.census_t_ceiling,
            });
        }
        Ok(())
    }
}

/// An element together with its exact multiplicative order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderRecord {
    pub element: FieldElement,
    pub order: u64,
}

impl OrderRecord {
    /// `a^ord = 1` and `a^(ord/l) != 1` for every prime `l | ord`.
    pub fn is_valid(&self, ctx: &FieldCtx) -> bool {
        let q1 = ctx.q() - 1;
        if self.order == 0 || !q1.is_multiple_of(self.order) {
            return false;
        }
        if ctx.pow(self.element, self.order) != ctx.one() {
            return false;
        }
        let Ok(f) = nt::factor(self.order) else {
            return false;
        };
        let minimal = f
            .primes()
            .all(|l| ctx.pow(self.element, self.order / l) != ctx.one());
        minimal
    }
}

/// Order of a nonzero element: start at `q - 1` and strip each prime
/// factor for as long as the power stays at one.
pub fn multiplicative_order(ctx: &FieldCtx, a: FieldElement) -> Result<OrderRecord> {
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    let mut order = ctx.q() - 1;
    for &(l, k) in ctx.q_minus_1().factors() {
        for _ in 0..k {
            if ctx.pow(a, order / l) == ctx.one() {
                order /= l;
            } else {
                break;
            }
        }
    }
    Ok(OrderRecord { element: a, order })
}

/// The three-condition test for irreducibility of `x^t - a` over `F_q`,
/// given the factorization of `q - 1` and `ord_q(a)`:
///
/// 1. every prime divisor of `t` divides `ord_q(a)`;
/// 2. `gcd(t, (q - 1)/ord_q(a)) = 1`;
/// 3. if `4 | t` then `q = 1 (mod 4)`.
pub fn criterion_irreducible(q_minus_1: &Factorization, t: u64, ord_a: u64) -> Result<bool> {
    if t < 2 {
        return Err(Error::DegreeTooSmall { min: 2 });
    }
    let group = q_minus_1.value();
    if ord_a == 0 || !group.is_multiple_of(ord_a) {
        return Err(Error::OrderNotDivisor {
            order: ord_a,
            group,
        });
    }
    let q = group.checked_add(1).ok_or(Error::Overflow)?;
    let primes_divide = nt::factor(t)?.primes().all(|l| ord_a.is_multiple_of(l));
    let coprime = t.gcd(&(group / ord_a)) == 1;
    let four = !t.is_multiple_of(4) || q % 4 == 1;
    Ok(primes_divide && coprime && four)
}

/// Number of `a` in `F_q^*` with `x^t - a` irreducible, by running the
/// Rabin test on every one of the `q - 1` binomials.
pub fn oracle_binomial_count(ctx: &FieldCtx, t: u64, cfg: &OracleConfig) -> Result<u64> {
    if t == 0 {
        return Err(Error::DegreeTooSmall { min: 1 });
    }
    cfg.check_census(ctx.q(), t)?;
    let t = usize::try_from(t).map_err(|_| Error::Overflow)?;
    let elements: Vec<FieldElement> = ctx.nonzero_elements().collect();
    elements
        .par_iter()
        .map(|&a| rabin_irreducible(ctx, &Poly::binomial(ctx, t, a)).map(u64::from))
        .try_reduce(|| 0, |x, y| Ok(x + y))
}
