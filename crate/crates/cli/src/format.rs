//! Rendering of reports: decimals, the CSV table and the text summary.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use valueset_core::bounds::LogMagnitude;

use crate::experiment::{ExperimentReport, ReportRow};

pub const SIG_DIGITS: usize = 12;

/// Bounds at or above `10^LOG_THRESHOLD` are shown by their base-10 log.
pub const LOG_THRESHOLD: f64 = 15.0;

/// Fixed leading columns. `S_1 .. S_R` and the trailing columns follow.
pub const LEADING_COLUMNS: &[&str] = &[
    "q",
    "p",
    "s",
    "d",
    "m",
    "family_id",
    "card_A",
    "card_A_ambient",
    "card_A_bracket",
    "va_exact",
    "va_decimal",
    "mu_d_q_exact",
    "mu_d_q_decimal",
    "abs_error_exact",
    "abs_error_decimal",
    "error_over_sqrt_q",
    "main_bound",
    "bound_satisfied",
];

pub const TRAILING_COLUMNS: &[&str] = &["sr_bounds_ok", "gamma_identities", "gamma_bounds_ok", "h1_h2", "h3", "h4"];

pub fn header(r_max: usize) -> Vec<String> {
    let mut cols: Vec<String> = LEADING_COLUMNS.iter().map(|s| s.to_string()).collect();
    cols.extend((1..=r_max).map(|r| format!("S_{r}")));
    cols.extend(TRAILING_COLUMNS.iter().map(|s| s.to_string()));
    cols
}

fn pow10(k: usize) -> BigUint {
    BigUint::from(10u8).pow(k as u32)
}

/// `x` rounded half-to-even to 12 significant digits, in positional
/// notation with trailing zeros kept.
pub fn decimal(x: &BigRational) -> String {
    decimal_sig(x, SIG_DIGITS)
}

pub fn decimal_sig(x: &BigRational, sig: usize) -> String {
    assert!(sig >= 1);
    if x.is_zero() {
        return "0".into();
    }
    let num = x.numer().abs().to_biguint().expect("nonnegative");
    let den = x.denom().abs().to_biguint().expect("nonnegative");

    // e = floor(log10 |x|): 10^e <= num/den < 10^{e+1}
    let ge_pow = |e: i64| -> bool {
        if e >= 0 {
            num >= &den * pow10(e as usize)
        } else {
            &num * pow10((-e) as usize) >= den
        }
    };
    let mut e = ((num.bits() as f64 - den.bits() as f64) * std::f64::consts::LOG10_2).floor() as i64;
    while !ge_pow(e) {
        e -= 1;
    }
    while ge_pow(e + 1) {
        e += 1;
    }

    // digits = round(|x| * 10^{sig-1-e})
    let k = sig as i64 - 1 - e;
    let (n2, d2) = if k >= 0 { (&num * pow10(k as usize), den) } else { (num, den * pow10((-k) as usize)) };
    let (mut digits, rem) = n2.div_rem(&d2);
    let twice = rem * 2u8;
    if twice > d2 || (twice == d2 && digits.is_odd()) {
        digits += 1u8;
    }
    if digits == pow10(sig) {
        digits = pow10(sig - 1);
        e += 1;
    }
    let ds = digits.to_string();
    debug_assert_eq!(ds.len(), sig);

    let mut out = String::new();
    if x.is_negative() {
        out.push('-');
    }
    if e >= sig as i64 - 1 {
        out.push_str(&ds);
        out.extend(std::iter::repeat_n('0', (e - (sig as i64 - 1)) as usize));
    } else if e >= 0 {
        let (a, b) = ds.split_at(e as usize + 1);
        out.push_str(a);
        out.push('.');
        out.push_str(b);
    } else {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-e - 1) as usize));
        out.push_str(&ds);
    }
    out
}

pub fn decimal_f64(x: f64) -> String {
    match BigRational::from_float(x) {
        Some(r) => decimal(&r),
        None => x.to_string(),
    }
}

/// Exact `num/den`, with the denominator always shown.
pub fn exact(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// A bound in positional form, or `log10 = x.xxxx` from `10^15` on.
pub fn bound(b: LogMagnitude) -> String {
    if b.sign == 0 {
        return "0".into();
    }
    let l = b.log10();
    if b.sign > 0 && l >= LOG_THRESHOLD {
        format!("log10 = {l:.4}")
    } else {
        decimal_f64(b.to_f64())
    }
}

fn bracket_status(row: &ReportRow) -> &'static str {
    if !row.card_a_bracket.threshold_ok {
        "threshold-fails"
    } else if row.card_a_in_bracket() {
        "in"
    } else {
        "out"
    }
}

fn identity_status(row: &ReportRow) -> String {
    if row.skipped.is_empty() {
        "ok".into()
    } else {
        format!("ok ({} oracle stages skipped)", row.skipped.len())
    }
}

pub fn csv_record(row: &ReportRow) -> Vec<String> {
    let mut rec = vec![
        row.q.to_string(),
        row.p.to_string(),
        row.s.to_string(),
        row.d.to_string(),
        row.m.to_string(),
        row.family_id.clone(),
        row.card_a.to_string(),
        row.card_a_ambient.to_string(),
        bracket_status(row).into(),
        exact(&row.va),
        decimal(&row.va),
        exact(&row.mu_q),
        decimal(&row.mu_q),
        exact(&row.abs_error),
        decimal(&row.abs_error),
        decimal_f64(row.error_over_sqrt_q),
        bound(row.main_bound),
        row.bound_satisfied.to_string(),
    ];
    rec.extend(row.s_r.iter().map(|s| s.to_string()));
    rec.push(row.sr_bounds_ok().to_string());
    rec.push(identity_status(row));
    rec.push(row.gamma_bounds_ok().to_string());
    rec.extend(row.diagnostics.iter().map(|h| h.status.to_string()));
    rec
}

pub fn csv(report: &ExperimentReport) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header(report.r_max)).expect("write to memory");
    for row in &report.rows {
        w.write_record(csv_record(row)).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 fields")
}

pub fn summary(report: &ExperimentReport) -> String {
    let mut out = String::new();
    for row in &report.rows {
        summary_row(&mut out, row).expect("write to string");
    }
    out
}

fn summary_row(out: &mut String, row: &ReportRow) -> std::fmt::Result {
    writeln!(out, "family {}", row.family_id)?;
    writeln!(out, "  field: q = {} (p = {}, s = {}), d = {}, m = {}", row.q, row.p, row.s, row.d, row.m)?;
    writeln!(out, "  |A| = {} (constant term 0); with the constant term free: {}", row.card_a, row.card_a_ambient)?;
    let b = &row.card_a_bracket;
    writeln!(
        out,
        "  |A| bracket: {} < |A| <= {} [{}]",
        decimal(&b.lower),
        bound(b.upper.value()),
        bracket_status(row)
    )?;
    writeln!(out, "  V(A) = {} = {}", exact(&row.va), decimal(&row.va))?;
    writeln!(out, "  mu_d q = {} = {}", exact(&row.mu_q), decimal(&row.mu_q))?;
    writeln!(out, "  |V(A) - mu_d q| = {} = {}", exact(&row.abs_error), decimal(&row.abs_error))?;
    writeln!(out, "  error / sqrt(q) = {}", decimal_f64(row.error_over_sqrt_q))?;
    writeln!(
        out,
        "  main bound: {} (satisfied: {}; log-space with +2^-30 relative slack)",
        bound(row.main_bound),
        row.bound_satisfied
    )?;

    writeln!(out, "  interpolating-set counts:")?;
    for (c, s) in row.sr_checks.iter().zip(&row.s_r) {
        writeln!(
            out,
            "    S_{} = {}; |S_r - q^(d-m)/r!| = {} <= {}: {}",
            c.r,
            s,
            decimal(&c.deviation),
            bound(c.bound.value()),
            c.ok
        )?;
    }
    writeln!(out, "  incidence counts:")?;
    for ((ic, gs), ge) in row.incidence.iter().zip(&row.gamma_star).zip(&row.gamma_eq) {
        writeln!(
            out,
            "    r = {}: |Gamma_r| = {}, |Gamma_r*| = {}, |Gamma_r*=| = {}",
            ic.r, ic.gamma_r, ic.gamma_r_star, ic.gamma_r_star_eq
        )?;
        writeln!(
            out,
            "      |Gamma_r*| vs q^(d-m) = {}: deviation bound {} ({})",
            gs.main_term,
            bound(gs.bound.value()),
            if gs.within { "within" } else { "exceeded" }
        )?;
        writeln!(
            out,
            "      |Gamma_r*=| <= {}: {} (ratio {})",
            ge.bound,
            ge.holds,
            decimal_f64(ge.ratio)
        )?;
    }
    writeln!(out, "  identities verified ({}):", row.identities.len())?;
    for id in &row.identities {
        writeln!(out, "    {id}")?;
    }
    if !row.skipped.is_empty() {
        writeln!(out, "  oracle stages skipped:")?;
        for s in &row.skipped {
            writeln!(out, "    {s}")?;
        }
    }
    writeln!(out, "  hypothesis diagnostics:")?;
    for h in &row.diagnostics {
        for line in h.text().lines() {
            writeln!(out, "    {line}")?;
        }
    }
    writeln!(out)
}
