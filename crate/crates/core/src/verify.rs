//! Three-way cross-check for one field: the closed form `N_q(t)`, the
//! order-based criterion applied to every `a`, and the Rabin test applied to
//! every binomial `x^t - a`.

use rayon::prelude::*;

use crate::census;
use crate::error::Result;
use crate::ff::{
    criterion_irreducible, multiplicative_order, rabin_irreducible, FieldCtx, FieldElement,
    OracleConfig, Poly,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyRow {
    pub t: u64,
    pub formula: u64,
    pub oracle: u64,
    /// `None` for `t = 1`, where the criterion does not apply.
    pub criterion: Option<u64>,
}

impl VerifyRow {
    pub fn agrees(&self) -> bool {
        self.formula == self.oracle && self.criterion.is_none_or(|c| c == self.oracle)
    }
}

/// First disagreement found, smallest `t` then smallest element index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub t: u64,
    /// Coefficients of `a` over `F_p`, lowest first, when the criterion and
    /// the Rabin test disagree on a specific binomial.
    pub element: Option<Vec<u32>>,
    pub criterion: Option<bool>,
    pub rabin: Option<bool>,
    pub formula: u64,
    pub oracle: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub q: u64,
    pub rows: Vec<VerifyRow>,
    pub mismatch: Option<Mismatch>,
}

impl VerifyReport {
    pub fn all_agree(&self) -> bool {
        self.mismatch.is_none()
    }

    pub fn oracle_sum(&self) -> u128 {
        self.rows.iter().map(|r| r.oracle as u128).sum()
    }
}

struct Verdict {
    a: FieldElement,
    criterion: Option<bool>,
    rabin: bool,
}

fn check_degree(ctx: &FieldCtx, orders: &[(FieldElement, u64)], t: u64) -> Result<Vec<Verdict>> {
    orders
        .par_iter()
        .map(|&(a, ord)| {
            let criterion = if t >= 2 {
                Some(criterion_irreducible(ctx.q_minus_1(), t, ord)?)
            } else {
                None
            };
            let rabin = rabin_irreducible(ctx, &Poly::binomial(ctx, t as usize, a))?;
            Ok(Verdict {
                a,
                criterion,
                rabin,
            })
        })
        .collect()
}

/// Runs the check for every `1 <= t <= max_t`.
pub fn verify_field(ctx: &FieldCtx, max_t: u64, cfg: &OracleConfig) -> Result<VerifyReport> {
    cfg.check_census(ctx.q(), max_t)?;
    let orders: Vec<(FieldElement, u64)> = ctx
        .nonzero_elements()
        .map(|a| multiplicative_order(ctx, a).map(|r| (a, r.order)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(max_t as usize);
    let mut mismatch = None;
    for t in 1..=max_t {
        let formula = census::nq(ctx.q(), t)?;
        let verdicts = check_degree(ctx, &orders, t)?;
        let oracle = verdicts.iter().filter(|v| v.rabin).count() as u64;
        let criterion = (t >= 2).then(|| {
            verdicts
                .iter()
                .filter(|v| v.criterion == Some(true))
                .count() as u64
        });
        if mismatch.is_none() {
            if let Some(v) = verdicts
                .iter()
                .find(|v| v.criterion.is_some_and(|c| c != v.rabin))
            {
                mismatch = Some(Mismatch {
                    t,
                    element: Some(ctx.coefficients(v.a)),
                    criterion: v.criterion,
                    rabin: Some(v.rabin),
                    formula,
                    oracle,
                });
            } else if formula != oracle {
                mismatch = Some(Mismatch {
                    t,
                    element: None,
                    criterion: None,
                    rabin: None,
                    formula,
                    oracle,
                });
            }
        }
        rows.push(VerifyRow {
            t,
            formula,
            oracle,
            criterion,
        });
    }
    Ok(VerifyReport {
        q: ctx.q(),
        rows,
        mismatch,
    })
}
