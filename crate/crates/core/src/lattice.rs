//! Lattice points in the tetrahedron `a_1 x_1 + .. + a_s x_s <= lambda`,
//! `x_i >= 0`, and the special case `a_i = log p_i` where the points are
//! exactly the exponent vectors of integers `p_1^v_1 .. p_s^v_s <= T`.
//!
//! The prime-product path never touches floating point. The real path
//! counts against a small absolute tolerance at the bounding hyperplane.

use crate::error::{Error, Result};
use crate::nt;

/// Default absolute tolerance for points on the bounding hyperplane.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeInstance {
    coeffs: Vec<f64>,
    lambda: f64,
}

impl LatticeInstance {
    pub fn new(coeffs: Vec<f64>, lambda: f64) -> Result<Self> {
        if let Some(a) = coeffs.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidInstance(format!(
                "coefficients must be positive and finite, got {a}"
            )));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidInstance(format!(
                "lambda must be non-negative and finite, got {lambda}"
            )));
        }
        Ok(LatticeInstance { coeffs, lambda })
    }

    /// The tetrahedron whose points are the exponent vectors of the
    /// products of `primes` bounded by `t`.
    pub fn for_primes(primes: &[u64], t: u64) -> Result<Self> {
        if t == 0 {
            return Err(Error::Zero);
        }
        Self::new(
            primes.iter().map(|&p| (p as f64).ln()).collect(),
            (t as f64).ln(),
        )
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    fn product(&self) -> f64 {
        self.coeffs.iter().product()
    }

    fn sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }
}

/// Exponents paired with a list of primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    /// `t(v) = prod p_i^v_i`, or `None` on overflow or length mismatch.
    pub fn value(&self, primes: &[u64]) -> Option<u128> {
        if primes.len() != self.0.len() {
            return None;
        }
        primes.iter().zip(&self.0).try_fold(1u128, |acc, (&p, &v)| {
            acc.checked_mul((p as u128).checked_pow(v)?)
        })
    }
}

fn check_primes(primes: &[u64]) -> Result<()> {
    for (i, &p) in primes.iter().enumerate() {
        if !nt::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if primes[..i].contains(&p) {
            return Err(Error::RepeatedPrime(p));
        }
    }
    Ok(())
}

/// Number of exponent vectors with `prod p_i^v_i <= t`. Zero when `t = 0`.
pub fn count_products(primes: &[u64], t: u64) -> Result<u64> {
    check_primes(primes)?;
    fn go(primes: &[u64], budget: u64) -> u64 {
        match primes.split_first() {
            None => 1,
            Some((&p, rest)) => {
                let mut total = 0;
                let mut b = budget;
                loop {
                    total += go(rest, b);
                    if b < p {
                        break total;
                    }
                    b /= p;
                }
            }
        }
    }
    // floor(floor(t/p)/p') = floor(t/(p p')), so dividing the budget is exact.
    Ok(if t == 0 { 0 } else { go(primes, t) })
}

/// Calls `visit(v, t(v))` for every exponent vector with `t(v) <= t`, in
/// lexicographic order of `v`.
pub fn for_each_product<F>(primes: &[u64], t: u64, mut visit: F) -> Result<()>
where
    F: FnMut(&[u32], u64),
{
    check_primes(primes)?;
    if t == 0 {
        return Ok(());
    }
    fn go<F: FnMut(&[u32], u64)>(
        primes: &[u64],
        depth: usize,
        value: u64,
        t: u64,
        v: &mut Vec<u32>,
        visit: &mut F,
    ) {
        if depth == primes.len() {
            visit(v, value);
            return;
        }
        let p = primes[depth];
        let mut x = value;
        let mut k = 0;
        loop {
            v.push(k);
            go(primes, depth + 1, x, t, v, visit);
            v.pop();
            match x.checked_mul(p) {
                Some(next) if next <= t => {
                    x = next;
                    k += 1;
                }
                _ => break,
            }
        }
    }
    let mut v = Vec::with_capacity(primes.len());
    go(primes, 0, 1, t, &mut v, &mut visit);
    Ok(())
}

/// Lattice points of an arbitrary tetrahedron, by recursion on the first
/// coordinate with the remaining budget.
pub fn count_real(inst: &LatticeInstance) -> u64 {
    count_real_with_tolerance(inst, DEFAULT_TOLERANCE)
}

pub fn count_real_with_tolerance(inst: &LatticeInstance, tol: f64) -> u64 {
    fn go(coeffs: &[f64], budget: f64, tol: f64) -> u64 {
        match coeffs {
            [] => 1,
            [a] => ((budget + tol) / a).floor() as u64 + 1,
            [a, rest @ ..] => {
                let top = ((budget + tol) / a).floor() as u64;
                (0..=top)
                    .map(|x| go(rest, budget - a * x as f64, tol))
                    .sum()
            }
        }
    }
    if inst.lambda + tol < 0.0 {
        return 0;
    }
    go(&inst.coeffs, inst.lambda, tol)
}

/// Sizes of the strata of `Y(T)`: all coordinates positive, exactly the
/// `j`-th coordinate zero, and two or more zeros; plus the pairwise
/// `|{v in Y_0 : v_i = v_j = 0}|` for `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrataCounts {
    pub total: u64,
    pub plus: u64,
    pub boundary: Vec<u64>,
    pub rest: u64,
    /// `pairs[i][j]` for `i < j`; entries with `i >= j` are zero.
    pub pairs: Vec<Vec<u64>>,
}

impl StrataCounts {
    pub fn partition_holds(&self) -> bool {
        self.total == self.plus + self.boundary.iter().sum::<u64>() + self.rest
    }
}

/// Which stratum an exponent vector lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stratum {
    Plus,
    Boundary(usize),
    Rest,
}

pub fn classify(v: &[u32]) -> Stratum {
    let mut zeros = v.iter().enumerate().filter(|(_, &x)| x == 0);
    match (zeros.next(), zeros.next()) {
        (None, _) => Stratum::Plus,
        (Some((j, _)), None) => Stratum::Boundary(j),
        _ => Stratum::Rest,
    }
}

pub fn strata(primes: &[u64], t: u64) -> Result<StrataCounts> {
    let s = primes.len();
    let mut out = StrataCounts {
        total: 0,
        plus: 0,
        boundary: vec![0; s],
        rest: 0,
        pairs: vec![vec![0; s]; s],
    };
    for_each_product(primes, t, |v, _| {
        out.total += 1;
        match classify(v) {
            Stratum::Plus => out.plus += 1,
            Stratum::Boundary(j) => out.boundary[j] += 1,
            Stratum::Rest => {
                out.rest += 1;
                for i in 0..s {
                    for j in i + 1..s {
                        if v[i] == 0 && v[j] == 0 {
                            out.pairs[i][j] += 1;
                        }
                    }
                }
            }
        }
    })?;
    Ok(out)
}

fn product_of(primes: &[u64]) -> Result<u64> {
    primes
        .iter()
        .try_fold(1u64, |acc, &p| acc.checked_mul(p))
        .ok_or(Error::Overflow)
}

/// `|Y+(T)| = |Y(floor(T / (p_1 .. p_s)))|`, shifting every exponent down
/// by one.
pub fn shift_identity_check(primes: &[u64], t: u64) -> Result<bool> {
    let plus = strata(primes, t)?.plus;
    Ok(plus == count_products(primes, t / product_of(primes)?)?)
}

/// `|Y_j(T)|` through the `(s-1)`-prime count at budget
/// `floor(T p_j / (p_1 .. p_s))`.
pub fn boundary_via_reduction(primes: &[u64], t: u64, j: usize) -> Result<u64> {
    let others: Vec<u64> = primes
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, &p)| p)
        .collect();
    count_products(&others, t / product_of(&others)?)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Volume lower bound and shifted-volume upper bound:
/// `lambda^s / (s! prod a)` and `(lambda + sum a)^s / (s! prod a)`.
pub fn trivial_bounds(inst: &LatticeInstance) -> Result<(f64, f64)> {
    let s = inst.dim();
    if s == 0 {
        return Err(Error::InvalidInstance(
            "dimension must be at least 1".into(),
        ));
    }
    let denom = factorial(s) * inst.product();
    let lower = inst.lambda.powi(s as i32) / denom;
    let upper = (inst.lambda + inst.sum()).powi(s as i32) / denom;
    Ok((lower, upper))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LehmerBounds {
    pub lower: f64,
    pub upper: f64,
    /// Index of the coefficient left out of the lower bound's correction.
    pub omitted: usize,
}

/// Lehmer–Lochs style polynomials
/// `(lambda^s + (s/2)(sum a - a_k) lambda^(s-1)) / (s! prod a)` and
/// `(lambda + (1/2) sum a)^s / (s! prod a)`.
///
/// `omit` picks the coefficient `a_k` dropped from the lower bound's
/// correction term; by default the largest one. These are evaluated, not
/// trusted: the upper polynomial is below the true count on small
/// instances such as `a = (1, 1)`, `lambda = 2`.
pub fn lehmer_bounds(inst: &LatticeInstance, omit: Option<usize>) -> Result<LehmerBounds> {
    let s = inst.dim();
    if s == 0 {
        return Err(Error::InvalidInstance(
            "dimension must be at least 1".into(),
        ));
    }
    let omitted = match omit {
        Some(k) if k >= s => {
            return Err(Error::InvalidInstance(format!(
                "omitted index {k} out of range for dimension {s}"
            )))
        }
        Some(k) => k,
        None => inst
            .coeffs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .unwrap_or(0),
    };
    let denom = factorial(s) * inst.product();
    let lam = inst.lambda;
    let partial = inst.sum() - inst.coeffs[omitted];
    let lower = (lam.powi(s as i32) + 0.5 * s as f64 * partial * lam.powi(s as i32 - 1)) / denom;
    let upper = (lam + 0.5 * inst.sum()).powi(s as i32) / denom;
    Ok(LehmerBounds {
        lower,
        upper,
        omitted,
    })
}

/// Two-term estimate `x^s/(s! prod a) + (sum a / prod a) x^(s-1) / (2 (s-1)!)`,
/// asymptotically valid when the coefficients are independent over `Q`.
pub fn spencer_estimate(inst: &LatticeInstance) -> Result<f64> {
    let s = inst.dim();
    if s == 0 {
        return Err(Error::InvalidInstance(
            "dimension must be at least 1".into(),
        ));
    }
    let x = inst.lambda;
    let prod = inst.product();
    let main = x.powi(s as i32) / (factorial(s) * prod);
    let second = inst.sum() / prod * x.powi(s as i32 - 1) / (2.0 * factorial(s - 1));
    Ok(main + second)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_products(primes: &[u64], t: u64) -> u64 {
        (1..=t)
            .filter(|&n| {
                let mut m = n;
                for &p in primes {
                    while m % p == 0 {
                        m /= p;
                    }
                }
                m == 1
            })
            .count() as u64
    }

    #[test]
    fn count_products_examples() {
        assert_eq!(count_products(&[], 17).unwrap(), 1);
        assert_eq!(count_products(&[3], 10).unwrap(), 3);
        assert_eq!(count_products(&[2, 3], 6).unwrap(), 5);
        assert_eq!(count_products(&[2, 3], 0).unwrap(), 0);
        assert_eq!(count_products(&[2, 2], 6), Err(Error::RepeatedPrime(2)));
        assert_eq!(count_products(&[4], 6), Err(Error::NotPrime(4)));
    }

    #[test]
    fn count_products_matches_smooth_filter() {
        for primes in [&[2u64][..], &[3, 5], &[2, 3, 5], &[2, 3, 7, 11], &[13]] {
            for t in [1u64, 2, 9, 10, 100, 1000, 4321] {
                assert_eq!(
                    count_products(primes, t).unwrap(),
                    brute_products(primes, t)
                );
            }
        }
    }

    #[test]
    fn count_products_handles_u64_edge() {
        // 2^0 .. 2^63 all fit.
        assert_eq!(count_products(&[2], u64::MAX).unwrap(), 64);
        let mut n = 0;
        for_each_product(&[2], u64::MAX, |_, _| n += 1).unwrap();
        assert_eq!(n, 64);
    }

    #[test]
    fn count_real_examples() {
        let inst = |a: Vec<f64>, l| LatticeInstance::new(a, l).unwrap();
        assert_eq!(count_real(&inst(vec![2.0], 7.0)), 4);
        assert_eq!(count_real(&inst(vec![1.0, 1.0], 2.0)), 6);
        let six = LatticeInstance::for_primes(&[2, 3], 6).unwrap();
        assert_eq!(count_real(&six), 5);
        assert_eq!(count_real(&inst(vec![], 3.0)), 1);
    }

    #[test]
    fn invalid_instances() {
        assert!(LatticeInstance::new(vec![1.0, 0.0], 1.0).is_err());
        assert!(LatticeInstance::new(vec![1.0], -1.0).is_err());
        assert!(LatticeInstance::new(vec![f64::NAN], 1.0).is_err());
        let empty = LatticeInstance::new(vec![], 1.0).unwrap();
        assert!(trivial_bounds(&empty).is_err());
        assert!(lehmer_bounds(&empty, None).is_err());
        assert!(spencer_estimate(&empty).is_err());
    }

    #[test]
    fn strata_examples() {
        let st = strata(&[2, 3], 6).unwrap();
        assert_eq!((st.total, st.plus, st.rest), (5, 1, 1));
        assert_eq!(st.boundary, vec![1, 2]);
        assert_eq!(st.pairs[0][1], 1);
        assert!(st.partition_holds());

        let st = strata(&[2, 3], 1).unwrap();
        assert_eq!((st.total, st.plus, st.rest), (1, 0, 1));
        assert_eq!(st.boundary, vec![0, 0]);

        assert_eq!(strata(&[2, 3, 5], 30).unwrap().plus, 1);
    }

    #[test]
    fn degenerate_dimensions() {
        // s = 0: the origin has no zero coordinates.
        let st = strata(&[], 100).unwrap();
        assert_eq!((st.total, st.plus, st.rest), (1, 1, 0));
        // s = 1: the origin is the boundary stratum.
        let st = strata(&[3], 100).unwrap();
        assert_eq!((st.total, st.plus, st.boundary[0], st.rest), (5, 4, 1, 0));
    }

    #[test]
    fn shift_identity_examples() {
        assert!(shift_identity_check(&[2, 3], 6).unwrap());
        assert!(shift_identity_check(&[2, 3], 5).unwrap());
        assert!(shift_identity_check(&[2], 8).unwrap());
        assert_eq!(strata(&[2], 8).unwrap().plus, 3);
    }

    #[test]
    fn trivial_bounds_examples() {
        let (lo, hi) = trivial_bounds(&LatticeInstance::new(vec![1.0, 1.0], 2.0).unwrap()).unwrap();
        assert_eq!((lo, hi), (2.0, 8.0));
        let (lo, hi) = trivial_bounds(&LatticeInstance::new(vec![2.0], 7.0).unwrap()).unwrap();
        assert_eq!((lo, hi), (3.5, 4.5));
        // One dimension, lambda / a integral: the upper bound is attained.
        let line = LatticeInstance::new(vec![2.0], 6.0).unwrap();
        assert_eq!(trivial_bounds(&line).unwrap().1, count_real(&line) as f64);
        let inst = LatticeInstance::for_primes(&[2, 3], 1000).unwrap();
        let (lo, hi) = trivial_bounds(&inst).unwrap();
        let count = count_products(&[2, 3], 1000).unwrap();
        assert_eq!(count, 40);
        assert!((lo - 31.33).abs() < 0.01, "{lo}");
        assert!(lo < 40.0 && 40.0 < hi);
    }

    #[test]
    fn lehmer_examples() {
        let inst = LatticeInstance::for_primes(&[2, 3], 6).unwrap();
        let b = lehmer_bounds(&inst, Some(0)).unwrap();
        assert!((b.lower - 3.40).abs() < 0.005, "{}", b.lower);
        assert!(b.lower < 5.0);

        let unit = LatticeInstance::new(vec![1.0, 1.0], 2.0).unwrap();
        let b = lehmer_bounds(&unit, None).unwrap();
        assert_eq!(b.upper, 4.5);
        assert_eq!(b.upper - count_real(&unit) as f64, -1.5);

        let line = LatticeInstance::new(vec![2.0], 7.0).unwrap();
        assert_eq!(lehmer_bounds(&line, None).unwrap().lower, 3.5);

        // Default drops the largest coefficient.
        assert_eq!(lehmer_bounds(&inst, None).unwrap().omitted, 1);
        assert!(lehmer_bounds(&inst, Some(2)).is_err());
    }

    #[test]
    fn spencer_examples() {
        let inst = LatticeInstance::for_primes(&[2], 1024).unwrap();
        let est = spencer_estimate(&inst).unwrap();
        assert!((est - 10.5).abs() < 1e-12);
        assert_eq!(count_products(&[2], 1024).unwrap(), 11);

        let inst = LatticeInstance::for_primes(&[2, 3], 1000).unwrap();
        let (l2, l3, lam) = (2f64.ln(), 3f64.ln(), 1000f64.ln());
        let main = lam * lam / (2.0 * l2 * l3);
        let second = (l2 + l3) / (l2 * l3) * lam / 2.0;
        assert!((main - 31.33).abs() < 0.01 && (second - 8.13).abs() < 0.01);
        let est = spencer_estimate(&inst).unwrap();
        assert!((est - (main + second)).abs() < 1e-12);
        assert!((est - 40.0).abs() < 1.0);
    }

    #[test]
    fn boundary_reduction_matches_strata() {
        for primes in [&[2u64, 3][..], &[2, 3, 5], &[3, 5, 7, 11]] {
            for t in [1u64, 30, 1000, 123_456, 10_000_000] {
                let st = strata(primes, t).unwrap();
                for j in 0..primes.len() {
                    assert_eq!(
                        st.boundary[j],
                        boundary_via_reduction(primes, t, j).unwrap()
                    );
                }
            }
        }
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

        fn prime_subset() -> impl Strategy<Value = Vec<u64>> {
            proptest::sample::subsequence(PRIMES.to_vec(), 0..=4)
        }

        proptest! {
            #[test]
            fn partition_and_shift(primes in prime_subset(), t in 1u64..2_000_000) {
                let st = strata(&primes, t).unwrap();
                prop_assert!(st.partition_holds());
                prop_assert_eq!(st.total, count_products(&primes, t).unwrap());
                prop_assert!(shift_identity_check(&primes, t).unwrap());
            }

            #[test]
            fn real_path_matches_integer_path(primes in prime_subset(), t in 1u64..=1_000_000_000) {
                let inst = LatticeInstance::for_primes(&primes, t).unwrap();
                prop_assert_eq!(count_real(&inst), count_products(&primes, t).unwrap());
            }

            #[test]
            fn products_monotone(primes in prime_subset(), t in 1u64..1_000_000, dt in 0u64..1000) {
                prop_assert!(count_products(&primes, t).unwrap() <= count_products(&primes, t + dt).unwrap());
            }

            #[test]
            fn real_count_monotone_and_bounded(
                coeffs in proptest::collection::vec(0.1f64..5.0, 1..4),
                lambda in 0.01f64..20.0,
                dl in 0.0f64..3.0,
            ) {
                let a = LatticeInstance::new(coeffs.clone(), lambda).unwrap();
                let b = LatticeInstance::new(coeffs, lambda + dl).unwrap();
                let n = count_real(&a);
                prop_assert!(n <= count_real(&b));
                let (lo, hi) = trivial_bounds(&a).unwrap();
                prop_assert!(lo < n as f64 && (n as f64) < hi);
            }
        }
    }
}
