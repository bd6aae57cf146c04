//! Dense univariate polynomials over `F_q` and Rabin's irreducibility test.
//!
//! The arithmetic skips zero coefficients on both operands and in the
//! reduction, so residues modulo a sparse modulus such as `x^t - a` cost
//! time proportional to their number of nonzero terms.

use crate::error::{Error, Result};
use crate::ff::field::{FieldCtx, FieldElement};
use crate::nt;

/// Coefficients lowest degree first, no trailing zeros. The zero polynomial
/// is the empty vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn x() -> Self {
        Poly::new(vec![FieldElement::ZERO, FieldElement::ONE])
    }

    /// `x^t - a`.
    pub fn binomial(ctx: &FieldCtx, t: usize, a: FieldElement) -> Self {
        let mut coeffs = vec![FieldElement::ZERO; t + 1];
        coeffs[t] = FieldElement::ONE;
        coeffs[0] = ctx.add(coeffs[0], ctx.neg(a));
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(FieldElement::ONE)
    }

    pub fn eval(&self, ctx: &FieldCtx, x: FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| ctx.add(ctx.mul(acc, x), c))
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Poly, i: usize| p.coeffs.get(i).copied().unwrap_or_default();
        Poly::new(
            (0..n)
                .map(|i| ctx.sub(get(self, i), get(other, i)))
                .collect(),
        )
    }

    /// Scales to leading coefficient one. The zero polynomial stays zero.
    pub fn monic(&self, ctx: &FieldCtx) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(lead) => {
                let inv = ctx.inv(lead).expect("leading coefficient is nonzero");
                Poly::new(self.coeffs.iter().map(|&c| ctx.mul(c, inv)).collect())
            }
        }
    }

    /// Remainder of division by a nonzero polynomial.
    pub fn rem(&self, ctx: &FieldCtx, divisor: &Poly) -> Poly {
        let modulus = Modulus::new(ctx, divisor);
        let mut buf = self.coeffs.clone();
        modulus.reduce(ctx, &mut buf);
        Poly::new(buf)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(ctx: &FieldCtx, a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(ctx, &b);
            a = b;
            b = r;
        }
        a.monic(ctx)
    }
}

/// A nonzero divisor normalized to monic form, kept as the sparse list of
/// its negated lower coefficients: `x^d = sum c_k x^k` modulo it.
struct Modulus {
    degree: usize,
    tail: Vec<(usize, FieldElement)>,
}

impl Modulus {
    fn new(ctx: &FieldCtx, divisor: &Poly) -> Self {
        let m = divisor.monic(ctx);
        let degree = m.degree().expect("division by the zero polynomial");
        let tail = m.coeffs[..degree]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, &c)| (k, ctx.neg(c)))
            .collect();
        Modulus { degree, tail }
    }

    fn reduce(&self, ctx: &FieldCtx, buf: &mut Vec<FieldElement>) {
        let d = self.degree;
        for i in (d..buf.len()).rev() {
            let c = buf[i];
            if c.is_zero() {
                continue;
            }
            buf[i] = FieldElement::ZERO;
            for &(k, m) in &self.tail {
                let slot = &mut buf[i - d + k];
                *slot = ctx.add(*slot, ctx.mul(c, m));
            }
        }
        buf.truncate(d);
        while buf.last().is_some_and(|c| c.is_zero()) {
            buf.pop();
        }
    }

    fn mul(&self, ctx: &FieldCtx, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let b_terms: Vec<(usize, FieldElement)> = b
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, &c)| (j, c))
            .collect();
        let mut prod = vec![FieldElement::ZERO; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for &(j, y) in &b_terms {
                prod[i + j] = ctx.add(prod[i + j], ctx.mul(x, y));
            }
        }
        self.reduce(ctx, &mut prod);
        prod
    }

    fn pow(&self, ctx: &FieldCtx, base: &[FieldElement], mut n: u64) -> Vec<FieldElement> {
        let mut acc = vec![FieldElement::ONE];
        self.reduce(ctx, &mut acc);
        let mut base = base.to_vec();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(ctx, &acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(ctx, &base, &base);
            }
        }
        acc
    }
}

/// Rabin's test: a monic `f` of degree `t` is irreducible over `F_q` iff
/// `x^(q^t) = x mod f` and `gcd(x^(q^(t/l)) - x, f) = 1` for every prime
/// `l | t`. The powers `x^(q^k)` are built by repeated `q`-th powering.
pub fn rabin_irreducible(ctx: &FieldCtx, f: &Poly) -> Result<bool> {
    let t = match f.degree() {
        None | Some(0) => return Err(Error::DegreeTooSmall { min: 1 }),
        Some(t) => t,
    };
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    let mut checkpoints: Vec<usize> = nt::factor(t as u64)?
        .primes()
        .map(|l| t / l as usize)
        .collect();
    checkpoints.sort_unstable();

    let modulus = Modulus::new(ctx, f);
    let mut x = Poly::x().coeffs;
    modulus.reduce(ctx, &mut x);
    let x = Poly::new(x);

    let mut frob = x.coeffs.clone();
    let mut next = checkpoints.iter().peekable();
    for k in 1..=t {
        frob = modulus.pow(ctx, &frob, ctx.q());
        while next.peek() == Some(&&k) {
            next.next();
            let diff = Poly::new(frob.clone()).sub(ctx, &x);
            let g = Poly::gcd(ctx, &diff, f);
            if g.degree() != Some(0) {
                return Ok(false);
            }
        }
    }
    Ok(Poly::new(frob) == x)
}
