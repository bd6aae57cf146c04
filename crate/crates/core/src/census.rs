//! `N_q(t)`, the number of `a in F_q^*` with `x^t - a` irreducible, and the
//! partial sums `S_q(T) = sum_{t <= T} N_q(t)`.
//!
//! `N_q(t) = (q - 1) phi(t)/t` when `rad_4(t) | q - 1` and zero otherwise,
//! so `S_q(T)` only sees the `t` whose prime factors divide `q - 1`. Those
//! are the exponent vectors of a tetrahedron, and the sum splits over its
//! strata into the exact rationals `A + B + C`.
//!
//! When `q = 3 (mod 4)`, `q - 1 = 2m` with `m` odd and the eligible `t` are
//! the odd `t` with `rad(t) | m` together with their doubles. Each half is
//! handled like the general case on the odd primes, the doubled half
//! carrying weight `1/2` (`phi(2t)/(2t) = phi(t)/(2t)` for odd `t`) and
//! budget `floor(T/2)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{self, classify, StrataCounts, Stratum};
use crate::nt::{self, Factorization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CongruenceCase {
    /// `q` even or `q = 1 (mod 4)`.
    NotThreeModFour,
    /// `q = 3 (mod 4)`.
    ThreeModFour,
}

impl CongruenceCase {
    pub fn of(q: u64) -> Self {
        if q % 4 == 3 {
            CongruenceCase::ThreeModFour
        } else {
            CongruenceCase::NotThreeModFour
        }
    }

    /// Stated limit of the normalized ratio returned by [`corollary_ratio`].
    /// For `q = 3 (mod 4)` the exact sums settle near 3, not 1.5.
    pub fn ratio_limit(self) -> f64 {
        match self {
            CongruenceCase::NotThreeModFour => 1.0,
            CongruenceCase::ThreeModFour => 1.5,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CongruenceCase::NotThreeModFour => "q != 3 mod 4",
            CongruenceCase::ThreeModFour => "q = 3 mod 4",
        }
    }
}

/// One of the (one or two) pieces the census sum is split into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Half {
    /// Degrees are `multiplier * t(v)`; 1, or 2 for the doubled half.
    pub multiplier: u64,
    pub budget: u64,
    pub primes: Vec<u64>,
}

impl Half {
    fn weight(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.multiplier))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusInput {
    q: u64,
    q_minus_1: Factorization,
    max_t: u64,
    case: CongruenceCase,
    primes: Vec<u64>,
}

impl CensusInput {
    pub fn new(q: u64, max_t: u64) -> Result<Self> {
        if max_t == 0 {
            return Err(Error::Zero);
        }
        if q < 2 {
            return Err(Error::NotPrimePower(q));
        }
        nt::prime_power(q)?;
        let q_minus_1 = nt::factor(q - 1)?;
        let case = CongruenceCase::of(q);
        let primes = q_minus_1
            .primes()
            .filter(|&p| case == CongruenceCase::NotThreeModFour || p != 2)
            .collect();
        Ok(CensusInput {
            q,
            q_minus_1,
            max_t,
            case,
            primes,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn q_minus_1(&self) -> &Factorization {
        &self.q_minus_1
    }

    pub fn max_t(&self) -> u64 {
        self.max_t
    }

    pub fn case(&self) -> CongruenceCase {
        self.case
    }

    /// The `p_1, .., p_s` of the active case: every prime of `q - 1`, or
    /// only the odd ones when `q = 3 (mod 4)`.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn s(&self) -> usize {
        self.primes.len()
    }

    pub fn with_max_t(&self, max_t: u64) -> Result<Self> {
        if max_t == 0 {
            return Err(Error::Zero);
        }
        Ok(CensusInput {
            max_t,
            ..self.clone()
        })
    }

    pub fn halves(&self) -> Vec<Half> {
        match self.case {
            CongruenceCase::NotThreeModFour => vec![Half {
                multiplier: 1,
                budget: self.max_t,
                primes: self.primes.clone(),
            }],
            CongruenceCase::ThreeModFour => vec![
                Half {
                    multiplier: 1,
                    budget: self.max_t,
                    primes: self.primes.clone(),
                },
                Half {
                    multiplier: 2,
                    budget: self.max_t / 2,
                    primes: self.primes.clone(),
                },
            ],
        }
    }

    fn phi_q_minus_1(&self) -> u64 {
        nt::euler_phi(&self.q_minus_1)
    }

    fn rad_q_minus_1(&self) -> u64 {
        nt::rad(&self.q_minus_1)
    }

    fn log_primes(&self) -> Vec<f64> {
        self.primes.iter().map(|&p| (p as f64).ln()).collect()
    }
}

/// Which side of the eligibility test `rad_4(t) | q - 1` a degree fell on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eligibility {
    Eligible { rad4: u64 },
    Ineligible { rad4: u64 },
}

impl Eligibility {
    pub fn describe(self) -> String {
        match self {
            Eligibility::Eligible { rad4 } => format!("rad4 = {rad4} | q-1"),
            Eligibility::Ineligible { rad4 } => format!("rad4 = {rad4} does not divide q-1"),
        }
    }
}

/// `N_q(t)` together with the branch of the closed form that applied.
pub fn nq_with_branch(q: u64, t: u64) -> Result<(u64, Eligibility)> {
    if t == 0 {
        return Err(Error::Zero);
    }
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    nt::prime_power(q)?;
    let tf = nt::factor(t)?;
    let rad4 = nt::rad4(&tf);
    let group = q - 1;
    if !group.is_multiple_of(rad4) {
        return Ok((0, Eligibility::Ineligible { rad4 }));
    }
    // rad(t) | rad4(t) | q - 1, so the division is exact.
    let r = nt::rad(&tf);
    let phi_r: u64 = tf.primes().map(|p| p - 1).product();
    Ok((group / r * phi_r, Eligibility::Eligible { rad4 }))
}

pub fn nq(q: u64, t: u64) -> Result<u64> {
    nq_with_branch(q, t).map(|(n, _)| n)
}

/// An eligible degree with its census term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EligibleDegree {
    pub t: u64,
    pub nq: u64,
}

/// Visits every eligible `t <= T` exactly once, with the half it came from
/// and its exponent vector over the half's primes.
fn visit_eligible<F>(input: &CensusInput, mut visit: F) -> Result<()>
where
    F: FnMut(&Half, &[u32], u64, u64),
{
    let group = input.q - 1;
    for half in input.halves() {
        let mut err = None;
        lattice::for_each_product(&half.primes, half.budget, |v, m| {
            let mut rad = half.multiplier;
            let mut phi_rad = 1u64;
            for (&p, &k) in half.primes.iter().zip(v) {
                if k > 0 {
                    rad *= p;
                    phi_rad *= p - 1;
                }
            }
            // phi(2) = 1, so doubling only moves the radical.
            match m.checked_mul(half.multiplier) {
                Some(t) => visit(&half, v, t, group / rad * phi_rad),
                None => err = Some(Error::Overflow),
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(())
}

/// Eligible degrees `t <= T` and `N_q(t)`, in increasing order of `t`.
pub fn enumerate_eligible(input: &CensusInput) -> Result<Vec<EligibleDegree>> {
    let mut out = Vec::new();
    visit_eligible(input, |_, _, t, nq| out.push(EligibleDegree { t, nq }))?;
    out.sort_unstable_by_key(|d| d.t);
    Ok(out)
}

/// `S_q(T)`, exactly.
pub fn exact_sum(input: &CensusInput) -> Result<u128> {
    let mut total = 0u128;
    let mut overflow = false;
    visit_eligible(input, |_, _, _, nq| match total.checked_add(nq as u128) {
        Some(x) => total = x,
        None => overflow = true,
    })?;
    if overflow {
        return Err(Error::Overflow);
    }
    Ok(total)
}

/// Number of eligible degrees `t <= T`.
pub fn eligible_count(input: &CensusInput) -> Result<u64> {
    let mut n = 0u64;
    visit_eligible(input, |_, _, _, _| n += 1)?;
    Ok(n)
}

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `phi(t)/t` sums over the strata of one half, before its weight.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSums {
    pub half: Half,
    pub strata: StrataCounts,
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
}

/// `A`, `B`, `C`: sums of `phi(t)/t` over the eligible `t` whose exponent
/// vectors have no zero coordinate, exactly one, or at least two. Halves
/// are combined with their weights, so `S_q(T) = (q - 1)(A + B + C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StratumSums {
    pub halves: Vec<HalfSums>,
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
}

impl StratumSums {
    pub fn total(&self) -> BigRational {
        &self.a + &self.b + &self.c
    }
}

pub fn stratum_sums(input: &CensusInput) -> Result<StratumSums> {
    let mut halves = Vec::new();
    for half in input.halves() {
        let (mut a, mut b, mut c) = (
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
        );
        lattice::for_each_product(&half.primes, half.budget, |v, _| {
            let (mut num, mut den) = (1u64, 1u64);
            for (&p, &k) in half.primes.iter().zip(v) {
                if k > 0 {
                    num *= p - 1;
                    den *= p;
                }
            }
            let term = ratio(num, den);
            match classify(v) {
                Stratum::Plus => a += term,
                Stratum::Boundary(_) => b += term,
                Stratum::Rest => c += term,
            }
        })?;
        let strata = lattice::strata(&half.primes, half.budget)?;
        halves.push(HalfSums {
            half,
            strata,
            a,
            b,
            c,
        });
    }
    let mut out = StratumSums {
        halves: Vec::new(),
        a: BigRational::zero(),
        b: BigRational::zero(),
        c: BigRational::zero(),
    };
    for h in &halves {
        let w = h.half.weight();
        out.a += &w * &h.a;
        out.b += &w * &h.b;
        out.c += &w * &h.c;
    }
    out.halves = halves;
    Ok(out)
}

/// Closed forms for `A` and `B` through lattice counts:
/// `A = rho |Y(floor(T / rad))|` and
/// `B = rho sum_j p_j/(p_j - 1) |Y_j(T)|` with `rho = prod (p - 1)/p` over the
/// half's primes, `|Y_j(T)|` taken from the `(s-1)`-prime count, and the
/// halves weighted as in [`stratum_sums`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForms {
    pub rhs_a: BigRational,
    pub rhs_b: BigRational,
}

pub fn lemma31_closed_forms(input: &CensusInput) -> Result<ClosedForms> {
    let rad = input.rad_q_minus_1();
    if input.max_t < rad {
        return Err(Error::Hypothesis(format!(
            "T = {} must be at least rad(q-1) = {rad}",
            input.max_t
        )));
    }
    let mut rhs_a = BigRational::zero();
    let mut rhs_b = BigRational::zero();
    for half in input.halves() {
        let primes = &half.primes;
        let half_rad: u64 = primes.iter().product();
        let phi_rad: u64 = primes.iter().map(|p| p - 1).product();
        let rho = ratio(phi_rad, half_rad);
        let w = half.weight();
        let plus = lattice::count_products(primes, half.budget / half_rad)?;
        rhs_a += &w * &rho * BigRational::from_integer(BigInt::from(plus));
        let mut b = BigRational::zero();
        for (j, &p) in primes.iter().enumerate() {
            let boundary = lattice::boundary_via_reduction(primes, half.budget, j)?;
            b += ratio(p, p - 1) * BigRational::from_integer(BigInt::from(boundary));
        }
        rhs_b += &w * &rho * b;
    }
    Ok(ClosedForms { rhs_a, rhs_b })
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn require_nondegenerate(input: &CensusInput) -> Result<usize> {
    match input.s() {
        0 => Err(Error::Degenerate),
        s => Ok(s),
    }
}

/// Two-term asymptotic for `S_q(T)`. With `L = log T`, `l_j = log p_j`:
///
/// * `q != 3 (mod 4)`:
///   `phi(q-1)/(s! prod l_j) (L^s + (s/2) sum_j (p_j+1) l_j/(p_j-1) L^(s-1))`
/// * `q = 3 (mod 4)`:
///   `3 phi(q-1)/(2 s! prod l_j) (L^s + (s/2) [sum_j (p_j+1) l_j/(p_j-1) - log(4)/3] L^(s-1))`
///
/// Refuses `s = 0` (`q` in `{2, 3}`).
pub fn asymptotic_estimate(input: &CensusInput) -> Result<f64> {
    let s = require_nondegenerate(input)?;
    let logs = input.log_primes();
    let big_l = (input.max_t as f64).ln();
    let phi = input.phi_q_minus_1() as f64;
    let denom = factorial(s) * logs.iter().product::<f64>();
    let mut second: f64 = input
        .primes
        .iter()
        .zip(&logs)
        .map(|(&p, &l)| (p as f64 + 1.0) * l / (p as f64 - 1.0))
        .sum();
    let prefactor = match input.case {
        CongruenceCase::NotThreeModFour => phi / denom,
        CongruenceCase::ThreeModFour => {
            second -= 4f64.ln() / 3.0;
            3.0 * phi / (2.0 * denom)
        }
    };
    let sf = s as f64;
    Ok(prefactor * (big_l.powi(s as i32) + 0.5 * sf * second * big_l.powi(s as i32 - 1)))
}

/// `(s! prod log p_j / phi(q-1)) S_q(T) / (log T)^s`.
pub fn corollary_ratio(input: &CensusInput) -> Result<f64> {
    let sum = exact_sum(input)?;
    corollary_ratio_of(input, sum)
}

/// [`corollary_ratio`] for an already computed `S_q(T)`.
pub fn corollary_ratio_of(input: &CensusInput, sum: u128) -> Result<f64> {
    let s = require_nondegenerate(input)?;
    if input.max_t < 2 {
        return Err(Error::Hypothesis("T must be at least 2".into()));
    }
    let norm =
        factorial(s) * input.log_primes().iter().product::<f64>() / input.phi_q_minus_1() as f64;
    Ok(norm * sum.to_f64().unwrap_or(f64::INFINITY) / (input.max_t as f64).ln().powi(s as i32))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem6Bound {
    pub bound: f64,
    pub m1: f64,
    pub m2: f64,
}

/// The small-`T` upper bound
/// `phi(q-1)/(s! prod l_j) L^s (1 + s M1 R + s(s-1) M2 R^2)`, `R = log rad(q-1)/L`,
/// `M1 = rad^(-(s-1)/(2L)) (1 + log(2s)/s) - 1/2`,
/// `M2 = (q-1)(s-1)/(2 s phi(q-1)) rad^((s-2)/(2L)) + 1/8`.
///
/// Requires `q != 3 (mod 4)`, `s >= 2` and `T > rad(q-1)`.
pub fn theorem6_bound(input: &CensusInput) -> Result<Theorem6Bound> {
    if input.case == CongruenceCase::ThreeModFour {
        return Err(Error::Hypothesis("requires q != 3 mod 4".into()));
    }
    let s = input.s();
    if s < 2 {
        return Err(Error::Hypothesis(format!("requires s >= 2, got s = {s}")));
    }
    let rad = input.rad_q_minus_1();
    if input.max_t <= rad {
        return Err(Error::Hypothesis(format!(
            "T = {} must exceed rad(q-1) = {rad}",
            input.max_t
        )));
    }
    let sf = s as f64;
    let big_l = (input.max_t as f64).ln();
    let rad_f = rad as f64;
    let phi = input.phi_q_minus_1() as f64;
    let r = rad_f.ln() / big_l;
    let m1 = rad_f.powf(-(sf - 1.0) / (2.0 * big_l)) * (1.0 + (2.0 * sf).ln() / sf) - 0.5;
    let m2 = (input.q as f64 - 1.0) * (sf - 1.0) / (2.0 * sf * phi)
        * rad_f.powf((sf - 2.0) / (2.0 * big_l))
        + 0.125;
    let main =
        phi / (factorial(s) * input.log_primes().iter().product::<f64>()) * big_l.powi(s as i32);
    let bound = main * (1.0 + sf * m1 * r + sf * (sf - 1.0) * m2 * r * r);
    Ok(Theorem6Bound { bound, m1, m2 })
}

/// `phi(q-1) |Y(T)| <= S_q(T) <= (q-1) |Y(T)|`, where `|Y(T)|` counts the
/// eligible degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NaiveBounds {
    pub eligible: u64,
    pub lower: u128,
    pub upper: u128,
}

pub fn naive_bounds(input: &CensusInput) -> Result<NaiveBounds> {
    let eligible = eligible_count(input)?;
    let phi = input.phi_q_minus_1() as u128;
    let group = (input.q - 1) as u128;
    Ok(NaiveBounds {
        eligible,
        lower: phi.checked_mul(eligible as u128).ok_or(Error::Overflow)?,
        upper: group.checked_mul(eligible as u128).ok_or(Error::Overflow)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeshBound {
    pub bound: f64,
    /// Whether `T` clears the validity threshold
    /// `(log(q-1))^((1+eps) A log_3 q / log_4 q)`, with `log_k` read as the
    /// `k`-fold iterated natural logarithm.
    pub valid: bool,
    pub threshold: Option<f64>,
    pub reason: Option<String>,
}

fn iterated_log(x: f64, k: usize) -> std::result::Result<f64, String> {
    let mut v = x;
    for i in 0..k {
        if v <= 1.0 {
            return Err(format!(
                "iterated log undefined: level {i} argument {v} <= 1 in log_{k}"
            ));
        }
        v = v.ln();
    }
    Ok(v)
}

/// The averaged upper bound `(q-1) T / (log T)^A` and whether its validity
/// threshold is met. Only ever compared, never asserted.
pub fn hesh_bound(q: u64, t: u64, a: f64, eps: f64) -> Result<HeshBound> {
    if t < 3 {
        return Err(Error::Hypothesis(format!("requires T >= 3, got {t}")));
    }
    if q < 5 {
        return Err(Error::Hypothesis(format!("requires q >= 5, got {q}")));
    }
    if !(a > 0.0 && a.is_finite() && eps > 0.0 && eps.is_finite()) {
        return Err(Error::Hypothesis("A and eps must be positive".into()));
    }
    let tf = t as f64;
    let bound = (q as f64 - 1.0) * tf / tf.ln().powf(a);
    let qf = q as f64;
    let threshold = iterated_log(qf, 3).and_then(|l3| {
        let l4 = iterated_log(qf, 4)?;
        if l4 <= 0.0 {
            return Err(format!("log_4 q = {l4} is not positive"));
        }
        Ok((qf - 1.0).ln().powf((1.0 + eps) * a * l3 / l4))
    });
    Ok(match threshold {
        Ok(th) => HeshBound {
            bound,
            valid: tf >= th,
            threshold: Some(th),
            reason: (tf < th).then(|| format!("T below threshold {th}")),
        },
        Err(reason) => HeshBound {
            bound,
            valid: false,
            threshold: None,
            reason: Some(reason),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Lower,
    Upper,
}

/// `margin = bound - exact`. A lower bound is violated when the margin is
/// positive, an upper bound when it is negative.
#[derive(Debug, Clone, PartialEq)]
pub struct Margin {
    pub name: &'static str,
    pub kind: BoundKind,
    pub bound: f64,
    pub margin: f64,
}

impl Margin {
    pub fn new(name: &'static str, kind: BoundKind, bound: f64, exact: f64) -> Self {
        Margin {
            name,
            kind,
            bound,
            margin: bound - exact,
        }
    }

    pub fn violated(&self) -> bool {
        match self.kind {
            BoundKind::Lower => self.margin > 0.0,
            BoundKind::Upper => self.margin < 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub naive: NaiveBounds,
    pub theorem6: Result<Theorem6Bound>,
    pub hesh: Result<HeshBound>,
    pub margins: Vec<Margin>,
}

/// Parameters of the averaged bound, which are free in its statement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeshParams {
    pub a: f64,
    pub eps: f64,
}

impl Default for HeshParams {
    fn default() -> Self {
        HeshParams { a: 1.0, eps: 1.0 }
    }
}

pub fn bound_report(input: &CensusInput, exact: u128, hesh: HeshParams) -> Result<BoundReport> {
    let naive = naive_bounds(input)?;
    let exact_f = exact as f64;
    let mut margins = vec![
        Margin::new("naive_lower", BoundKind::Lower, naive.lower as f64, exact_f),
        Margin::new("naive_upper", BoundKind::Upper, naive.upper as f64, exact_f),
    ];
    let theorem6 = theorem6_bound(input);
    if let Ok(b) = &theorem6 {
        margins.push(Margin::new(
            "theorem6_upper",
            BoundKind::Upper,
            b.bound,
            exact_f,
        ));
    }
    let hesh = hesh_bound(input.q, input.max_t, hesh.a, hesh.eps);
    if let Ok(b) = &hesh {
        margins.push(Margin::new(
            "hesh_upper",
            BoundKind::Upper,
            b.bound,
            exact_f,
        ));
    }
    Ok(BoundReport {
        naive,
        theorem6,
        hesh,
        margins,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusReport {
    pub exact_sum: u128,
    pub strata: Option<StratumSums>,
    pub closed_forms: Option<Result<ClosedForms>>,
    pub asymptotic: Result<f64>,
    pub ratio: Result<f64>,
    pub bounds: Option<BoundReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReportOptions {
    pub strata: bool,
    pub bounds: bool,
    pub hesh: HeshParams,
}

pub fn census_report(input: &CensusInput, opts: &ReportOptions) -> Result<CensusReport> {
    let exact = exact_sum(input)?;
    let strata = opts.strata.then(|| stratum_sums(input)).transpose()?;
    let closed_forms = opts.strata.then(|| lemma31_closed_forms(input));
    let bounds = opts
        .bounds
        .then(|| bound_report(input, exact, opts.hesh))
        .transpose()?;
    Ok(CensusReport {
        exact_sum: exact,
        strata,
        closed_forms,
        asymptotic: asymptotic_estimate(input),
        ratio: corollary_ratio_of(input, exact),
        bounds,
    })
}
