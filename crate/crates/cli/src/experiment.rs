//! The experiment pipeline: enumerate, count, cross-check, bound, diagnose.
//!
//! Every exact identity between the counts is re-derived on each run and a
//! mismatch aborts with a dump of the offending quantities. Bound checks
//! and hypothesis diagnostics are recorded, never fatal.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;
use valueset_core::bounds::{card_a_bracket, linear_bound, main_bound, s_r_form, CardABracket, LogMagnitude, SqrtForm};
use valueset_core::diagnostics::{run_all, DiagnosticsConfig, HypothesisReport};
use valueset_core::families::ambient_cardinality;
use valueset_core::incidence::{
    count_gamma_r_raw, count_gamma_r_star_hermite, gamma_eq_check_from, gamma_star_report_from, incidence_counts,
    GammaEqCheck, GammaStarReport, IncidenceCounts,
};
use valueset_core::valueset::{inclusion_exclusion_from, mu_d, s_r_direct, summarize, ValueSetSummary};
use valueset_core::{to_expr, Error as CoreError, FamilyKind};

use crate::config::{kind_name, parse_config, ConfigError, ExperimentConfig};
use crate::format;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("identity violated: {check}\n{dump}")]
    IdentityViolation { check: String, dump: String },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Deliberate corruptions used to test that violations are caught.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Adds one to `S_1` right after it is computed.
    SrOffByOne,
}

/// Command-line overrides of the `[run]` section.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub workers: Option<usize>,
    pub oracle_budget: Option<u128>,
    #[doc(hidden)]
    pub fault: Option<Fault>,
}

/// `|S_r - q^{d-m}/r!|` against its bound.
#[derive(Clone, Debug, PartialEq)]
pub struct SrCheck {
    pub r: usize,
    pub deviation: BigRational,
    pub bound: SqrtForm,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct ReportRow {
    pub q: u64,
    pub p: u64,
    pub s: usize,
    pub d: usize,
    pub m: usize,
    pub family_id: String,
    /// Members with constant term 0.
    pub card_a: u128,
    /// Points of the variety with the constant term free, `card_a * q`.
    pub card_a_ambient: u128,
    pub card_a_bracket: CardABracket,
    pub va: BigRational,
    pub mu_q: BigRational,
    pub abs_error: BigRational,
    pub error_over_sqrt_q: f64,
    pub main_bound: LogMagnitude,
    pub bound_satisfied: bool,
    /// `S_r` for `r = 1..=r_max`.
    pub s_r: Vec<u128>,
    pub sr_checks: Vec<SrCheck>,
    pub incidence: Vec<IncidenceCounts>,
    pub gamma_star: Vec<GammaStarReport>,
    pub gamma_eq: Vec<GammaEqCheck>,
    /// Identities that were evaluated and held.
    pub identities: Vec<String>,
    /// Oracle stages skipped for budget reasons.
    pub skipped: Vec<String>,
    pub diagnostics: Vec<HypothesisReport>,
}

impl ReportRow {
    pub fn card_a_in_bracket(&self) -> bool {
        self.card_a_bracket.contains(self.card_a)
    }

    pub fn sr_bounds_ok(&self) -> bool {
        self.sr_checks.iter().all(|c| c.ok)
    }

    pub fn gamma_bounds_ok(&self) -> bool {
        self.gamma_star.iter().all(|g| g.within) && self.gamma_eq.iter().all(|g| g.holds)
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub r_max: usize,
}

impl ExperimentReport {
    pub fn csv(&self) -> String {
        format::csv(self)
    }

    pub fn summary(&self) -> String {
        format::summary(self)
    }
}

struct Checker<'a> {
    header: String,
    summary: &'a ValueSetSummary,
    passed: Vec<String>,
}

impl Checker<'_> {
    fn check(&mut self, ok: bool, name: String, detail: impl FnOnce() -> String) -> Result<(), RunError> {
        if ok {
            self.passed.push(name);
            return Ok(());
        }
        let s = self.summary;
        let dump = format!(
            "{}\n{}\n|A| = {}\nsum V(f) = {}\nS_r = {:?}\nGamma_r = {:?}",
            self.header,
            detail(),
            s.card_a,
            s.sum_v,
            s.s_r,
            s.gamma_r
        );
        Err(RunError::IdentityViolation { check: name, dump })
    }
}

fn factorial(r: usize) -> u128 {
    (1..=r as u128).product()
}

pub fn family_id(config: &ExperimentConfig) -> String {
    let spec = &config.family.spec;
    let field = &config.field.spec;
    let vars = spec.variables();
    let forms: Vec<String> = match config.family.kind {
        FamilyKind::Symmetric => config.family.exprs.clone(),
        _ => spec.constraints().iter().map(|g| to_expr(field, g, &vars)).collect(),
    };
    let kind = match config.family.s_count {
        Some(s) => format!("{}(s={s})", kind_name(config.family.kind)),
        None => kind_name(config.family.kind).to_string(),
    };
    format!("{kind}:{}", forms.join("; "))
}

/// Runs every stage for the configured family and returns the report.
/// Nothing is written to disk.
pub fn run_experiment(config: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentReport, RunError> {
    let field = &config.field.spec;
    let spec = &config.family.spec;
    let (d, m, q) = (spec.d(), spec.m(), field.q());
    let degs = spec.degrees();
    let r_max = config.run.r_max;
    let workers = opts.workers.unwrap_or(config.run.workers).max(1);
    let budget = opts.oracle_budget.unwrap_or(config.run.oracle_budget);
    let id = family_id(config);

    let mut summary = summarize(spec, field, workers);
    if summary.card_a == 0 {
        return Err(CoreError::EmptyFamily.into());
    }
    if opts.fault == Some(Fault::SrOffByOne) {
        summary.s_r[0] += 1;
    }
    let mut ck = Checker { header: format!("q = {q}, d = {d}, m = {m}, family {id}"), summary: &summary, passed: Vec::new() };

    let va = summary.average()?;
    let (alt, ok) = inclusion_exclusion_from(&summary)?;
    ck.check(ok, "inclusion-exclusion".into(), || format!("V(A) = {va}, alternating sum / |A| = {alt}"))?;

    let s1_expected = summary.card_a * q as u128;
    ck.check(summary.s(1) == s1_expected, "S_1 = |A| q".into(), || format!("|A| q = {s1_expected}"))?;

    for r in 1..=d {
        let lhs = factorial(r) * summary.s(r);
        let rhs = summary.gamma_r[r - 1];
        ck.check(lhs == rhs, format!("r! S_r = |Gamma_r| (r = {r})"), || format!("r! S_r = {lhs}, |Gamma_r| = {rhs}"))?;
    }

    let mut skipped = Vec::new();
    let mut note_skip = |what: String, e: CoreError| -> Result<(), RunError> {
        match e {
            CoreError::BudgetExceeded { needed, budget } => {
                skipped.push(format!("{what}: needs {needed} steps, budget {budget}"));
                Ok(())
            }
            other => Err(other.into()),
        }
    };

    let mut incidence = Vec::new();
    let mut gamma_star = Vec::new();
    let mut gamma_eq = Vec::new();
    let mut sr_checks = Vec::new();
    let main_term = BigInt::from(BigUint::from(q).pow((d - m) as u32));
    for r in 1..=r_max {
        let ic = incidence_counts(spec, field, r, workers)?;
        let split = ic.gamma_r_star.checked_sub(ic.gamma_r_star_eq);
        ck.check(split == Some(summary.gamma_r[r - 1]), format!("|Gamma_r| = |Gamma_r*| - |Gamma_r*=| (r = {r})"), || {
            format!(
                "|Gamma_r| = {}, |Gamma_r*| = {}, |Gamma_r*=| = {}",
                summary.gamma_r[r - 1],
                ic.gamma_r_star,
                ic.gamma_r_star_eq
            )
        })?;

        match s_r_direct(spec, field, r, budget) {
            Ok(n) => ck.check(n == summary.s(r), format!("S_r by subset enumeration (r = {r})"), || {
                format!("direct S_r = {n}, fast S_r = {}", summary.s(r))
            })?,
            Err(e) => note_skip(format!("S_{r} by subset enumeration"), e)?,
        }
        match count_gamma_r_raw(spec, field, r, budget) {
            Ok(n) => ck.check(n == ic.gamma_r, format!("|Gamma_r| by tuple enumeration (r = {r})"), || {
                format!("raw |Gamma_r| = {n}, formula = {}", ic.gamma_r)
            })?,
            Err(e) => note_skip(format!("|Gamma_{r}| by tuple enumeration"), e)?,
        }
        match count_gamma_r_star_hermite(spec, field, r, budget) {
            Ok(n) => ck.check(n == ic.gamma_r_star, format!("|Gamma_r*| by Hermite divisibility (r = {r})"), || {
                format!("Hermite |Gamma_r*| = {n}, search = {}", ic.gamma_r_star)
            })?,
            Err(e) => note_skip(format!("|Gamma_{r}*| by Hermite divisibility"), e)?,
        }

        gamma_star.push(gamma_star_report_from(spec, field, r, ic.gamma_r_star)?);
        gamma_eq.push(gamma_eq_check_from(spec, field, r, ic.gamma_r_star_eq)?);

        let rf = factorial(r);
        let dev = (BigInt::from(rf * summary.s(r)) - &main_term).abs();
        let bound = s_r_form(d, m, degs, r, q)?;
        let ok = bound.admits_ratio(&dev.to_biguint().unwrap_or_default(), &BigUint::from(rf));
        sr_checks.push(SrCheck { r, deviation: BigRational::new(dev, BigInt::from(rf)), bound, ok });
        incidence.push(ic);
    }

    let mu_q = mu_d(d) * BigRational::from_integer(BigInt::from(q));
    let abs_error = (&va - &mu_q).abs();
    let error_over_sqrt_q = abs_error.to_f64().unwrap_or(f64::NAN) / (q as f64).sqrt();
    let bound = match config.family.kind {
        FamilyKind::Linear => linear_bound(d, q)?,
        _ => main_bound(d, m, degs, q)?,
    };
    let bound_satisfied = bound.admits_rational(&abs_error);

    let diag_cfg = DiagnosticsConfig {
        extensions: config.run.diag_extensions.clone(),
        point_budget: budget,
        workers,
        ..DiagnosticsConfig::default()
    };
    let diagnostics = run_all(spec, field, &diag_cfg)?.to_vec();

    let row = ReportRow {
        q,
        p: field.p(),
        s: field.s(),
        d,
        m,
        family_id: id,
        card_a: summary.card_a,
        card_a_ambient: ambient_cardinality(spec, field),
        card_a_bracket: card_a_bracket(d, m, degs, q)?,
        va,
        mu_q,
        abs_error,
        error_over_sqrt_q,
        main_bound: bound,
        bound_satisfied,
        s_r: (1..=r_max).map(|r| summary.s(r)).collect(),
        sr_checks,
        incidence,
        gamma_star,
        gamma_eq,
        identities: ck.passed,
        skipped,
        diagnostics,
    };
    Ok(ExperimentReport { rows: vec![row], r_max })
}

fn write(path: &Path, text: &str) -> Result<(), RunError> {
    fs::write(path, text).map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

/// Output destinations after command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

/// Runs the experiment and writes the CSV and summary files that are
/// configured, returning the report for whatever is left to print.
pub fn execute(config: &ExperimentConfig, opts: &RunOptions, outputs: &Outputs) -> Result<ExperimentReport, RunError> {
    let report = run_experiment(config, opts)?;
    if let Some(path) = outputs.csv.as_ref().or(config.output.csv.as_ref()) {
        write(path, &report.csv())?;
    }
    if let Some(path) = outputs.summary.as_ref().or(config.output.summary.as_ref()) {
        write(path, &report.summary())?;
    }
    Ok(report)
}

/// Built-in identity suite: small linear and quadratic families with all
/// oracles enabled. Returns one line per instance.
pub fn seed_check(workers: usize) -> Result<Vec<String>, RunError> {
    let mut lines = Vec::new();
    for p in [5u64, 7] {
        for d in [3usize, 4] {
            for (kind, form) in [("linear", format!("A{}", d - 1)), ("custom", quadratic_form(d))] {
                let text = format!(
                    "[field]\np = {p}\n[family]\nkind = {kind}\nd = {d}\nm = 1\nforms = [\"{form}\"]\n[run]\ndiag_extensions = [1]\n"
                );
                let config = parse_config(&text)?;
                let report = run_experiment(&config, &RunOptions { workers: Some(workers), ..RunOptions::default() })?;
                let row = &report.rows[0];
                lines.push(format!(
                    "ok  q={p} d={d} {}: {} identities, {} oracle stages skipped",
                    row.family_id,
                    row.identities.len(),
                    row.skipped.len()
                ));
            }
        }
    }
    Ok(lines)
}

/// `A_{d-1}^2 + ... + A_1^2 - 1`.
pub fn quadratic_form(d: usize) -> String {
    let terms: Vec<String> = (1..d).rev().map(|j| format!("A{j}^2")).collect();
    format!("{} - 1", terms.join(" + "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(p: u64, d: usize, form: &str, kind: &str, extra: &str) -> ExperimentConfig {
        parse_config(&format!(
            "[field]\np = {p}\n[family]\nkind = {kind}\nd = {d}\nm = 1\nforms = [\"{form}\"]\n[run]\ndiag_extensions = [1]\n{extra}"
        ))
        .unwrap()
    }

    #[test]
    fn small_linear_run_matches_hand_counts() {
        let c = config(5, 3, "A2", "linear", "");
        let report = run_experiment(&c, &RunOptions::default()).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.card_a, 5);
        assert_eq!(row.card_a_ambient, 25);
        assert_eq!(row.va, BigRational::new(17.into(), 5.into()));
        assert_eq!(row.s_r, vec![25, 10, 2]);
        assert!(row.skipped.is_empty());
        assert_eq!(row.family_id, "linear:A2");
    }

    #[test]
    fn r_max_one_gives_s1() {
        let c = config(7, 4, "A3", "linear", "r_max = 1\n");
        let report = run_experiment(&c, &RunOptions::default()).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.s_r, vec![row.card_a * 7]);
        assert_eq!(row.incidence.len(), 1);
    }

    #[test]
    fn injected_off_by_one_aborts() {
        let c = config(5, 3, "A2", "linear", "");
        let opts = RunOptions { fault: Some(Fault::SrOffByOne), ..RunOptions::default() };
        match run_experiment(&c, &opts) {
            Err(RunError::IdentityViolation { check, dump }) => {
                assert_eq!(check, "inclusion-exclusion");
                assert!(dump.contains("S_r = [26, 10, 2]"), "{dump}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tight_budget_skips_oracles_with_notes() {
        let c = config(5, 3, "A2", "linear", "oracle_budget = 10\n");
        let report = run_experiment(&c, &RunOptions::default()).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.skipped.len(), 9);
        assert!(row.skipped[0].contains("budget 10"));
    }

    #[test]
    fn empty_family_is_an_error() {
        // 3 is not a square mod 7.
        let c = config(7, 4, "A3^2 - 3", "custom", "");
        assert!(matches!(run_experiment(&c, &RunOptions::default()), Err(RunError::Core(CoreError::EmptyFamily))));
    }

    #[test]
    fn quadratic_form_text() {
        assert_eq!(quadratic_form(4), "A3^2 + A2^2 + A1^2 - 1");
    }
}
