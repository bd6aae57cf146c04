//! The field `F_{p^e}` as `F_p[y]/(m(y))` for a canonical irreducible `m`.
//!
//! Elements are stored packed: the coefficient list `(c_0, .., c_{e-1})` is
//! the base-`p` digit expansion `c_0 + c_1 p + .. + c_{e-1} p^{e-1}` of a
//! `u32`. Multiplication goes through discrete log/antilog tables built once
//! at construction from schoolbook products modulo `m`.

use std::fmt;

use crate::error::{Error, Result};
use crate::ff::poly::{rabin_irreducible, Poly};
use crate::nt::{self, Factorization};

/// Default largest `q` for which a field may be built.
pub const DEFAULT_FIELD_CEILING: u64 = 1 << 16;

/// A field element, as the packed coefficient vector. Only meaningful
/// together with the [`FieldCtx`] that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Packed index in `[0, q)`.
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone)]
pub struct FieldCtx {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    q_minus_1: Factorization,
    // exp has length 2(q-1) so log sums never need a reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl FieldCtx {
    /// Builds `F_{p^e}` with the default ceiling.
    pub fn new(p: u64, e: u32) -> Result<Self> {
        Self::with_ceiling(p, e, DEFAULT_FIELD_CEILING)
    }

    /// Builds the field of order `q`, which must be a prime power.
    pub fn of_order(q: u64, ceiling: u64) -> Result<Self> {
        let (p, e) = nt::prime_power(q)?;
        Self::with_ceiling(p, e, ceiling)
    }

    pub fn with_ceiling(p: u64, e: u32, ceiling: u64) -> Result<Self> {
        if !nt::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::ZeroDegree);
        }
        let q =
            p.checked_pow(e)
                .filter(|&q| q <= u32::MAX as u64)
                .ok_or(Error::CeilingExceeded {
                    q: u64::MAX,
                    ceiling,
                })?;
        if q > ceiling {
            return Err(Error::CeilingExceeded { q, ceiling });
        }
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p as u32, e)?
        };
        Self::from_modulus(p as u32, e, modulus)
    }

    fn from_modulus(p: u32, e: u32, modulus: Vec<u32>) -> Result<Self> {
        let q = p.pow(e);
        let q_minus_1 = nt::factor(q as u64 - 1)?;
        let mut ctx = FieldCtx {
            p,
            e,
            q,
            modulus,
            q_minus_1,
            exp: Vec::new(),
            log: Vec::new(),
        };
        ctx.build_tables();
        Ok(ctx)
    }

    fn build_tables(&mut self) {
        let order = (self.q - 1) as usize;
        let generator = (1..self.q)
            .map(FieldElement)
            .find(|&g| {
                self.q_minus_1
                    .primes()
                    .all(|l| self.pow_reference(g, (self.q as u64 - 1) / l) != FieldElement::ONE)
            })
            .expect("every finite field has a primitive element");
        let mut exp = Vec::with_capacity(2 * order);
        let mut log = vec![0u32; self.q as usize];
        let mut x = FieldElement::ONE;
        for i in 0..order {
            exp.push(x.0);
            log[x.0 as usize] = i as u32;
            x = self.mul_reference(x, generator);
        }
        debug_assert_eq!(x, FieldElement::ONE);
        exp.extend_from_within(..order);
        self.exp = exp;
        self.log = log;
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.q as u64
    }

    /// Monic defining polynomial over `F_p`, lowest degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn q_minus_1(&self) -> &Factorization {
        &self.q_minus_1
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q).map(FieldElement)
    }

    /// Element from a length-`e` little-endian coefficient list.
    pub fn element(&self, coefficients: &[u32]) -> Result<FieldElement> {
        if coefficients.len() != self.e as usize {
            return Err(Error::WrongLength {
                expected: self.e as usize,
                got: coefficients.len(),
            });
        }
        let mut packed = 0u32;
        for &c in coefficients.iter().rev() {
            if c >= self.p {
                return Err(Error::CoefficientOutOfRange {
                    value: c as u64,
                    p: self.p as u64,
                });
            }
            packed = packed * self.p + c;
        }
        Ok(FieldElement(packed))
    }

    pub fn coefficients(&self, a: FieldElement) -> Vec<u32> {
        let mut digits = Vec::with_capacity(self.e as usize);
        let mut x = a.0;
        for _ in 0..self.e {
            digits.push(x % self.p);
            x /= self.p;
        }
        digits
    }

    /// Image of the integer `n` under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u32)
    }

    /// Packed index `k` as an element, if `k < q`.
    pub fn from_index(&self, k: u32) -> Option<FieldElement> {
        (k < self.q).then_some(FieldElement(k))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.e == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= self.p { s - self.p } else { s });
        }
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let (mut out, mut place) = (0u32, 1u32);
        while x > 0 || y > 0 {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.e == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        if self.p == 2 {
            return a;
        }
        let mut x = a.0;
        let (mut out, mut place) = (0u32, 1u32);
        while x > 0 {
            let d = x % self.p;
            out += ((self.p - d) % self.p) * place;
            place *= self.p;
            x /= self.p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let i = self.log[a.0 as usize] + self.log[b.0 as usize];
        FieldElement(self.exp[i as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        let l = self.log[a.0 as usize];
        let i = if l == 0 { 0 } else { self.q - 1 - l };
        Ok(FieldElement(self.exp[i as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Square-and-multiply.
    pub fn pow(&self, a: FieldElement, mut n: u64) -> FieldElement {
        let mut acc = FieldElement::ONE;
        let mut base = a;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// Schoolbook product of coefficient vectors reduced modulo the
    /// defining polynomial. Used to build the tables and to check them.
    pub fn mul_reference(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.p as u64;
        let e = self.e as usize;
        let (ca, cb) = (self.coefficients(a), self.coefficients(b));
        let mut prod = vec![0u64; 2 * e];
        for (i, &x) in ca.iter().enumerate() {
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // y^e = -(m_0 + .. + m_{e-1} y^{e-1})
        for i in (e..2 * e).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for k in 0..e {
                let m = self.modulus[k] as u64;
                prod[i - e + k] = (prod[i - e + k] + c * (p - m)) % p;
            }
        }
        let digits: Vec<u32> = prod[..e].iter().map(|&c| c as u32).collect();
        self.element(&digits).expect("reduced digits are in range")
    }

    fn pow_reference(&self, a: FieldElement, mut n: u64) -> FieldElement {
        let mut acc = FieldElement::ONE;
        let mut base = a;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul_reference(acc, base);
            }
            base = self.mul_reference(base, base);
            n >>= 1;
        }
        acc
    }
}

// Monic degree-e polynomials over F_p in lexicographic order of
// (c_{e-1}, .., c_0); the first one that passes the Rabin test.
fn smallest_irreducible(p: u32, e: u32) -> Result<Vec<u32>> {
    let base = FieldCtx::from_modulus(p, 1, vec![0, 1])?;
    let count = (p as u64).pow(e);
    for k in 0..count {
        let mut coeffs = Vec::with_capacity(e as usize + 1);
        let mut x = k;
        for _ in 0..e {
            coeffs.push((x % p as u64) as u32);
            x /= p as u64;
        }
        coeffs.push(1);
        let poly = Poly::new(coeffs.iter().map(|&c| FieldElement(c)).collect());
        if rabin_irreducible(&base, &poly)? {
            return Ok(coeffs);
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_{p}")
}
