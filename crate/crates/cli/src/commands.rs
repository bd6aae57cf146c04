//! One function per subcommand. Each returns the record to print, or a
//! [`CommandError`] carrying the exit code.

use binomcensus_core::census::{
    self, BoundKind, BoundReport, CensusInput, Eligibility, HeshParams, Margin, ReportOptions,
};
use binomcensus_core::ff::{FieldCtx, OracleConfig};
use binomcensus_core::lattice::{self, LatticeInstance};
use binomcensus_core::verify::{self, VerifyReport};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use thiserror::Error;

use crate::record::{Cell, OutputRecord, Row};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] binomcensus_core::Error),
    /// The oracle disagreed with a formula; the record is the counterexample.
    #[error("oracle mismatch")]
    Mismatch(Box<OutputRecord>),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Invalid(_) | CommandError::Core(_) => EXIT_INVALID,
            CommandError::Mismatch(_) => EXIT_MISMATCH,
        }
    }
}

type Result<T> = std::result::Result<T, CommandError>;

const HESH_NOTE: &str = "log_k read as the k-fold iterated natural logarithm (interpretation)";

fn insert(row: &mut Row, key: &str, value: Cell) {
    row.insert(key.to_string(), value);
}

fn rational(r: &BigRational) -> Cell {
    Cell::exact(r)
}

fn push_margin(row: &mut Row, flags: &mut Vec<String>, m: &Margin, context: &str) {
    insert(row, m.name, Cell::real(m.bound));
    insert(row, &format!("{}_margin", m.name), Cell::real(m.margin));
    insert(
        row,
        &format!("{}_violated", m.name),
        Cell::Bool(m.violated()),
    );
    if m.violated() {
        let side = match m.kind {
            BoundKind::Lower => "lower bound above",
            BoundKind::Upper => "upper bound below",
        };
        flags.push(format!(
            "VIOLATED {}: {side} exact value, bound {}, margin {} ({context})",
            m.name,
            Cell::real(m.bound).render(),
            Cell::real(m.margin).render()
        ));
    }
}

pub fn nq(q: u64, t: u64) -> Result<OutputRecord> {
    let (n, branch) = census::nq_with_branch(q, t)?;
    let mut rec = OutputRecord::new("nq");
    rec.param("q", Cell::exact(q)).param("t", Cell::exact(t));
    let (rad4, label) = match branch {
        Eligibility::Eligible { rad4 } => (rad4, "rad4 | q-1"),
        Eligibility::Ineligible { rad4 } => (rad4, "rad4 \u{2224} q-1"),
    };
    let mut row = Row::new();
    insert(&mut row, "t", Cell::exact(t));
    insert(&mut row, "nq", Cell::exact(n));
    insert(&mut row, "rad4", Cell::exact(rad4));
    insert(&mut row, "branch", Cell::text(label));
    rec.rows.push(row);
    Ok(rec)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CensusFlags {
    pub strata: bool,
    pub bounds: bool,
    pub asymptotic: bool,
    pub hesh: HeshParams,
}

fn push_bounds(row: &mut Row, flags: &mut Vec<String>, b: &BoundReport, context: &str) {
    insert(row, "eligible_count", Cell::exact(b.naive.eligible));
    for m in &b.margins {
        push_margin(row, flags, m, context);
    }
    insert(row, "naive_lower", Cell::exact(b.naive.lower));
    insert(row, "naive_upper", Cell::exact(b.naive.upper));
    match &b.theorem6 {
        Ok(t6) => {
            insert(row, "theorem6_m1", Cell::real(t6.m1));
            insert(row, "theorem6_m2", Cell::real(t6.m2));
        }
        Err(e) => insert(row, "theorem6_error", Cell::text(e.to_string())),
    }
    match &b.hesh {
        Ok(h) => {
            insert(row, "hesh_valid", Cell::Bool(h.valid));
            insert(
                row,
                "hesh_threshold",
                h.threshold.map_or(Cell::Null, Cell::real),
            );
            insert(
                row,
                "hesh_reason",
                h.reason.clone().map_or(Cell::Null, Cell::Text),
            );
            insert(row, "hesh_note", Cell::text(HESH_NOTE));
        }
        Err(e) => insert(row, "hesh_error", Cell::text(e.to_string())),
    }
}

fn push_asymptotic(row: &mut Row, input: &CensusInput, exact: u128) {
    let limit = input.case().ratio_limit();
    insert(row, "case", Cell::text(input.case().label()));
    match census::asymptotic_estimate(input) {
        Ok(est) => {
            insert(row, "asymptotic", Cell::real(est));
            let rel = (est - exact as f64).abs() / exact as f64;
            insert(row, "asymptotic_rel_error", Cell::real(rel));
        }
        Err(e) => insert(row, "asymptotic_error", Cell::text(e.to_string())),
    }
    match census::corollary_ratio_of(input, exact) {
        Ok(r) => {
            insert(row, "ratio", Cell::real(r));
            insert(row, "ratio_limit", Cell::real(limit));
            insert(row, "ratio_distance", Cell::real((r - limit).abs()));
        }
        Err(e) => insert(row, "ratio_error", Cell::text(e.to_string())),
    }
}

fn census_row(input: &CensusInput, flags: &CensusFlags, notes: &mut Vec<String>) -> Result<Row> {
    let opts = ReportOptions {
        strata: flags.strata,
        bounds: flags.bounds,
        hesh: flags.hesh,
    };
    let report = census::census_report(input, &opts)?;
    let mut row = Row::new();
    insert(&mut row, "max_t", Cell::exact(input.max_t()));
    insert(&mut row, "exact_sum", Cell::exact(report.exact_sum));
    if let Some(st) = &report.strata {
        insert(&mut row, "A", rational(&st.a));
        insert(&mut row, "B", rational(&st.b));
        insert(&mut row, "C", rational(&st.c));
        let group = BigRational::from_integer(BigInt::from(input.q() - 1));
        let recombined = group * st.total();
        let exact = BigRational::from_integer(BigInt::from(report.exact_sum));
        insert(&mut row, "sum_identity", Cell::Bool(recombined == exact));
        let total: u64 = st.halves.iter().map(|h| h.strata.total).sum();
        insert(&mut row, "lattice_points", Cell::exact(total));
        insert(
            &mut row,
            "partition_holds",
            Cell::Bool(st.halves.iter().all(|h| h.strata.partition_holds())),
        );
        match &report.closed_forms {
            Some(Ok(cf)) => {
                insert(&mut row, "rhs_A", rational(&cf.rhs_a));
                insert(&mut row, "rhs_B", rational(&cf.rhs_b));
                insert(&mut row, "A_matches", Cell::Bool(cf.rhs_a == st.a));
                insert(&mut row, "B_matches", Cell::Bool(cf.rhs_b == st.b));
            }
            Some(Err(e)) => insert(&mut row, "closed_forms_error", Cell::text(e.to_string())),
            None => {}
        }
    }
    if flags.asymptotic {
        push_asymptotic(&mut row, input, report.exact_sum);
    }
    if let Some(b) = &report.bounds {
        let context = format!("q = {}, T = {}", input.q(), input.max_t());
        push_bounds(&mut row, notes, b, &context);
    }
    Ok(row)
}

fn hesh_params(rec: &mut OutputRecord, flags: &CensusFlags) {
    if flags.bounds {
        rec.param("hesh_a", Cell::real(flags.hesh.a))
            .param("hesh_eps", Cell::real(flags.hesh.eps));
    }
}

pub fn census(q: u64, max_t: u64, flags: &CensusFlags) -> Result<OutputRecord> {
    let input = CensusInput::new(q, max_t)?;
    let mut rec = OutputRecord::new("census");
    rec.param("q", Cell::exact(q))
        .param("max_t", Cell::exact(max_t));
    hesh_params(&mut rec, flags);
    let mut notes = Vec::new();
    let row = census_row(&input, flags, &mut notes)?;
    rec.rows.push(row);
    rec.flags = notes;
    Ok(rec)
}

pub fn sweep(q: u64, max_ts: &[u64], hesh: HeshParams) -> Result<OutputRecord> {
    if max_ts.is_empty() {
        return Err(CommandError::Invalid("empty --max-t-list".into()));
    }
    let base = CensusInput::new(q, max_ts[0])?;
    let flags = CensusFlags {
        strata: false,
        bounds: true,
        asymptotic: true,
        hesh,
    };
    let results: Vec<(Row, Vec<String>)> = max_ts
        .par_iter()
        .map(|&t| {
            let input = base.with_max_t(t)?;
            let mut notes = Vec::new();
            let row = census_row(&input, &flags, &mut notes)?;
            Ok((row, notes))
        })
        .collect::<Result<_>>()?;
    let mut rec = OutputRecord::new("sweep");
    let list = max_ts
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",");
    rec.param("q", Cell::exact(q))
        .param("max_t_list", Cell::text(list));
    hesh_params(&mut rec, &flags);
    for (row, notes) in results {
        rec.rows.push(row);
        rec.flags.extend(notes);
    }
    Ok(rec)
}

/// Builds the record for a finished oracle run; a disagreement becomes a
/// single-row counterexample record.
pub fn verify_outcome(report: &VerifyReport, max_t: u64) -> Result<OutputRecord> {
    let mut rec = OutputRecord::new("verify");
    rec.param("q", Cell::exact(report.q))
        .param("max_t", Cell::exact(max_t));
    if let Some(m) = &report.mismatch {
        let mut row = Row::new();
        insert(&mut row, "t", Cell::exact(m.t));
        let element = m.element.as_ref().map_or(Cell::Null, |c| {
            Cell::text(c.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
        });
        insert(&mut row, "a_coefficients", element);
        insert(
            &mut row,
            "criterion",
            m.criterion.map_or(Cell::Null, Cell::Bool),
        );
        insert(&mut row, "rabin", m.rabin.map_or(Cell::Null, Cell::Bool));
        insert(&mut row, "formula", Cell::exact(m.formula));
        insert(&mut row, "oracle", Cell::exact(m.oracle));
        rec.rows.push(row);
        rec.flags.push(format!("MISMATCH at t = {}", m.t));
        return Err(CommandError::Mismatch(Box::new(rec)));
    }
    for r in &report.rows {
        let mut row = Row::new();
        insert(&mut row, "t", Cell::exact(r.t));
        insert(&mut row, "formula", Cell::exact(r.formula));
        insert(&mut row, "oracle", Cell::exact(r.oracle));
        insert(
            &mut row,
            "criterion",
            r.criterion.map_or(Cell::Null, Cell::exact),
        );
        insert(&mut row, "agrees", Cell::Bool(r.agrees()));
        rec.rows.push(row);
    }
    Ok(rec)
}

pub fn verify(q: u64, max_t: u64, cfg: &OracleConfig) -> Result<OutputRecord> {
    if max_t == 0 {
        return Err(CommandError::Invalid("--max-t must be at least 1".into()));
    }
    cfg.check_census(q, max_t)?;
    let ctx = FieldCtx::of_order(q, cfg.field_ceiling)?;
    let report = verify::verify_field(&ctx, max_t, cfg)?;
    verify_outcome(&report, max_t)
}

#[derive(Debug, Clone, Default)]
pub struct LatticeSpec {
    pub coeffs: Option<Vec<f64>>,
    pub primes: Option<Vec<u64>>,
    pub lambda: Option<f64>,
    pub max_t: Option<u64>,
    pub bounds: bool,
    pub omit: Option<usize>,
}

pub fn lattice(spec: &LatticeSpec) -> Result<OutputRecord> {
    let mut rec = OutputRecord::new("lattice");
    let (inst, count) = match spec {
        LatticeSpec {
            primes: Some(primes),
            max_t: Some(t),
            coeffs: None,
            lambda: None,
            ..
        } => {
            let count = lattice::count_products(primes, *t)?;
            let list = primes
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(",");
            rec.param("primes", Cell::text(list))
                .param("max_t", Cell::exact(*t));
            let inst = if *t == 0 {
                None
            } else {
                Some(LatticeInstance::for_primes(primes, *t)?)
            };
            (inst, count)
        }
        LatticeSpec {
            coeffs: Some(coeffs),
            lambda: Some(lambda),
            primes: None,
            max_t: None,
            ..
        } => {
            let inst = LatticeInstance::new(coeffs.clone(), *lambda)?;
            let list = coeffs
                .iter()
                .map(|a| Cell::real(*a).render())
                .collect::<Vec<_>>();
            rec.param("coeffs", Cell::text(list.join(",")))
                .param("lambda", Cell::real(*lambda));
            let count = lattice::count_real(&inst);
            (Some(inst), count)
        }
        _ => {
            return Err(CommandError::Invalid(
                "give either --primes with --max-t, or --coeffs with --lambda".into(),
            ))
        }
    };
    let mut row = Row::new();
    insert(&mut row, "count", Cell::exact(count));
    if spec.bounds {
        let inst = inst.ok_or_else(|| CommandError::Invalid("bounds need T >= 1".into()))?;
        rec.param("omit", spec.omit.map_or(Cell::Null, Cell::exact));
        insert(&mut row, "dim", Cell::exact(inst.dim()));
        insert(&mut row, "lambda", Cell::real(inst.lambda()));
        let exact = count as f64;
        let (lo, hi) = lattice::trivial_bounds(&inst)?;
        let lehmer = lattice::lehmer_bounds(&inst, spec.omit)?;
        let coeffs = inst
            .coeffs()
            .iter()
            .map(|a| Cell::real(*a).render())
            .collect::<Vec<_>>();
        let context = format!(
            "coeffs [{}], lambda {}, count {count}",
            coeffs.join(", "),
            Cell::real(inst.lambda()).render()
        );
        let margins = [
            Margin::new("trivial_lower", BoundKind::Lower, lo, exact),
            Margin::new("trivial_upper", BoundKind::Upper, hi, exact),
            Margin::new("lehmer_lower", BoundKind::Lower, lehmer.lower, exact),
            Margin::new("lehmer_upper", BoundKind::Upper, lehmer.upper, exact),
        ];
        for m in &margins {
            push_margin(&mut row, &mut rec.flags, m, &context);
        }
        insert(&mut row, "lehmer_omitted", Cell::exact(lehmer.omitted));
        let spencer = lattice::spencer_estimate(&inst)?;
        insert(&mut row, "spencer", Cell::real(spencer));
        insert(&mut row, "spencer_error", Cell::real(spencer - exact));
        insert(
            &mut row,
            "spencer_rel_error",
            Cell::real((spencer - exact).abs() / exact),
        );
    }
    rec.rows.push(row);
    Ok(rec)
}
