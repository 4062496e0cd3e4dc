//! Sampled checks of necessary conditions for the regularity hypotheses on
//! a family.
//!
//! Nothing here certifies a hypothesis. The checks count points over small
//! extensions and compare the counts with what a normal complete
//! intersection with well-behaved discriminant loci would give. Every
//! passing report says so in its text.
//!
//! Counts of `V` use the full coefficient space with the constant term free
//! (dimension `d - m`), i.e. normalized counts times the field size.

use std::fmt;

use num_bigint::BigUint;

use crate::bounds::card_a_bracket;
use crate::error::Result;
use crate::families::{custom_family, for_each_member, map_partitions, FamilySpec};
use crate::ff::{FieldSpec, FqElem};
use crate::multipoly::{jacobian, jacobian_eval_with, MultiPoly};
use crate::poly::{discriminant, is_wild, subdiscriminant_first, MonicFamilyPoly};

pub const NECESSARY_ONLY: &str = "necessary conditions only";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    PassNecessary,
    Fail,
    Inconclusive,
}

impl Status {
    fn combine(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => PassNecessary,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::PassNecessary => "pass-necessary-conditions",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisReport {
    pub name: String,
    pub status: Status,
    /// One line per check performed.
    pub evidence: Vec<String>,
    /// A point or count reproducing a failure or a rank drop.
    pub witness: Option<String>,
    /// Named raw counts behind the evidence lines.
    pub counts: Vec<(String, u128)>,
}

impl HypothesisReport {
    pub fn text(&self) -> String {
        let mut s = format!("[{}] {}", self.name, self.status);
        if self.status == Status::PassNecessary {
            s.push_str(&format!(" ({NECESSARY_ONLY})"));
        }
        s.push('\n');
        for e in &self.evidence {
            s.push_str("  ");
            s.push_str(e);
            s.push('\n');
        }
        if let Some(w) = &self.witness {
            s.push_str("  witness: ");
            s.push_str(w);
            s.push('\n');
        }
        s
    }
}

/// Tunable constants; `None` selects the degree-based default.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagnosticsConfig {
    pub extensions: Vec<usize>,
    /// Largest coordinate space `Q^{d-1}` scanned per extension.
    pub point_budget: u128,
    pub workers: usize,
    /// Singular-locus constant, default `delta_V * max(1, D_V)`.
    pub c_sing: Option<u64>,
    /// Discriminant-locus constants, default `delta_V * d (d - 1)`.
    pub c1: Option<u64>,
    pub c2: Option<u64>,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig { extensions: vec![1, 2], point_budget: 4_000_000, workers: 1, c_sing: None, c1: None, c2: None }
    }
}

fn delta_and_d(spec: &FamilySpec) -> (u64, u64) {
    let delta = spec.degrees().iter().map(|&x| x.max(1) as u64).product();
    let dd = spec.degrees().iter().map(|&x| x.saturating_sub(1) as u64).sum();
    (delta, dd)
}

fn format_point(field: &FieldSpec, a: &[FqElem]) -> String {
    let parts: Vec<String> = a.iter().map(|&x| field.format(x)).collect();
    format!("({})", parts.join(", "))
}

#[derive(Default)]
struct SingularScan {
    points: u128,
    singular: u128,
    witness: Option<(Vec<FqElem>, usize)>,
}

fn scan_singular(spec: &FamilySpec, field: &FieldSpec, workers: usize) -> Result<SingularScan> {
    let partials = jacobian(field, spec.constraints())?;
    let m = spec.m();
    let parts = map_partitions(spec, field, workers, |range| {
        let mut s = SingularScan::default();
        for_each_member(spec, field, range, |a| {
            s.points += 1;
            let rank = jacobian_eval_with(field, &partials, a).expect("arity checked").rank;
            if rank < m {
                s.singular += 1;
                if s.witness.is_none() {
                    s.witness = Some((a.to_vec(), rank));
                }
            }
        });
        s
    });
    let mut total = SingularScan::default();
    for p in parts {
        total.points += p.points;
        total.singular += p.singular;
        if total.witness.is_none() {
            total.witness = p.witness;
        }
    }
    Ok(total)
}

fn lift(spec: &FamilySpec, field: &FieldSpec, k: usize) -> Result<(FieldSpec, FamilySpec)> {
    if k == 1 {
        return Ok((field.clone(), spec.clone()));
    }
    let (big, emb) = field.extension(k)?;
    let gs = spec.constraints().iter().map(|g| g.map_coeffs(&emb)).collect::<Result<Vec<MultiPoly>>>()?;
    Ok((big, custom_family(spec.d(), gs)?))
}

fn h1_h2_named(name: &str, spec: &FamilySpec, field: &FieldSpec, cfg: &DiagnosticsConfig) -> Result<HypothesisReport> {
    let d = spec.d();
    let m = spec.m();
    let (delta, dd) = delta_and_d(spec);
    let c_sing = cfg.c_sing.unwrap_or(delta * dd.max(1));
    let mut status: Option<Status> = None;
    let mut evidence = Vec::new();
    let mut witness = None;
    let mut counts = Vec::new();
    let mut update = |s: Status| status = Some(status.map_or(s, |t: Status| t.combine(s)));
    if d < m + 2 {
        evidence.push(format!("d = {d} < m + 2 = {}: dimension too small for the checks", m + 2));
        update(Status::Inconclusive);
    }
    for &k in &cfg.extensions {
        if d < m + 2 {
            break;
        }
        let big_q = field.q().checked_pow(k as u32);
        let space = big_q.and_then(|bq| (bq as u128).checked_pow(d as u32 - 1));
        let (Some(bq), Some(space)) = (big_q, space) else {
            evidence.push(format!("k={k}: field too large"));
            update(Status::Inconclusive);
            continue;
        };
        if space > cfg.point_budget || bq > u32::MAX as u64 {
            evidence.push(format!("k={k}: {space} coordinate points exceed budget {}", cfg.point_budget));
            update(Status::Inconclusive);
            continue;
        }
        let (bf, bspec) = lift(spec, field, k)?;
        let scan = scan_singular(&bspec, &bf, cfg.workers)?;
        let qb = BigUint::from(bq);
        let dim = (d - m) as u32;
        let n_v = BigUint::from(scan.points) * &qb;
        let n_sing = BigUint::from(scan.singular) * &qb;
        let sing_bound = BigUint::from(c_sing) * qb.pow(dim - 2);
        let codim1 = qb.pow(dim - 1);
        let rank_status = if n_sing <= sing_bound {
            Status::PassNecessary
        } else if BigUint::from(2u8) * &n_sing >= codim1 {
            Status::Fail
        } else {
            Status::Inconclusive
        };
        evidence.push(format!(
            "k={k}: |V(F_{bq})| = {n_v}, rank < {m} at {n_sing} points, allowed {sing_bound} ({rank_status})"
        ));
        update(rank_status);
        counts.push((format!("k{k}_points"), scan.points));
        counts.push((format!("k{k}_singular"), scan.singular));
        if let Some((pt, rank)) = &scan.witness {
            if witness.is_none() || rank_status == Status::Fail {
                witness = Some(format!(
                    "k={k}: Jacobian rank {rank} at (A{}, ..., A1) = {} (any A0)",
                    d - 1,
                    format_point(&bf, pt)
                ));
            }
        }
        let br = card_a_bracket(d, m, spec.degrees().iter().map(|&x| x.max(1)).collect::<Vec<_>>().as_slice(), bq)?;
        if br.threshold_ok {
            let ok = br.contains(scan.points);
            let st = if ok { Status::PassNecessary } else { Status::Fail };
            evidence.push(format!("k={k}: normalized count {} within point-count bracket: {ok}", scan.points));
            if !ok && witness.is_none() {
                witness = Some(format!("k={k}: normalized count {} outside bracket", scan.points));
            }
            update(st);
        } else {
            evidence.push(format!("k={k}: point-count bracket threshold fails at Q = {bq}"));
            update(Status::Inconclusive);
        }
    }
    let status = status.unwrap_or(Status::Inconclusive);
    if status == Status::PassNecessary {
        evidence.push(format!("{NECESSARY_ONLY}: rank and point counts consistent with a normal complete intersection"));
    }
    Ok(HypothesisReport { name: name.into(), status, evidence, witness, counts })
}

/// Jacobian-rank and point-count conditions over `F_{q^k}` for each
/// configured `k`.
pub fn check_h1_h2(spec: &FamilySpec, field: &FieldSpec, cfg: &DiagnosticsConfig) -> Result<HypothesisReport> {
    h1_h2_named("H1/H2", spec, field, cfg)
}

/// The same checks on the highest forms of the constraints.
pub fn check_h3(spec: &FamilySpec, field: &FieldSpec, cfg: &DiagnosticsConfig) -> Result<HypothesisReport> {
    match spec.highest_forms() {
        Ok(h) => h1_h2_named("H3", &h, field, cfg),
        Err(_) => Ok(HypothesisReport {
            name: "H3".into(),
            status: Status::Inconclusive,
            evidence: vec!["a constraint is zero; highest form undefined".into()],
            witness: None,
            counts: Vec::new(),
        }),
    }
}

#[derive(Default)]
struct DiscScan {
    points: u128,
    n1: u128,
    n2: u128,
    wild: u128,
    w1: Option<(Vec<FqElem>, FqElem)>,
    w2: Option<(Vec<FqElem>, FqElem)>,
}

/// Discriminant and first-subdiscriminant locus sizes over `F_q`.
pub fn check_h4(spec: &FamilySpec, field: &FieldSpec, cfg: &DiagnosticsConfig) -> Result<HypothesisReport> {
    let d = spec.d();
    let m = spec.m();
    let (delta, _) = delta_and_d(spec);
    let c1 = cfg.c1.unwrap_or(delta * (d * (d - 1)) as u64);
    let c2 = cfg.c2.unwrap_or(delta * (d * (d - 1)) as u64);
    let parts = map_partitions(spec, field, cfg.workers, |range| {
        let mut s = DiscScan::default();
        for_each_member(spec, field, range, |a| {
            for a0 in field.elements() {
                s.points += 1;
                let f = MonicFamilyPoly::from_member(a, a0).to_unipoly(field);
                if is_wild(field, &f) {
                    s.wild += 1;
                }
                if discriminant(field, &f).expect("degree >= 2").is_zero() {
                    s.n1 += 1;
                    if s.w1.is_none() {
                        s.w1 = Some((a.to_vec(), a0));
                    }
                    if subdiscriminant_first(field, &f).expect("degree >= 2").is_zero() {
                        s.n2 += 1;
                        if s.w2.is_none() {
                            s.w2 = Some((a.to_vec(), a0));
                        }
                    }
                }
            }
        });
        s
    });
    let mut t = DiscScan::default();
    for p in parts {
        t.points += p.points;
        t.n1 += p.n1;
        t.n2 += p.n2;
        t.wild += p.wild;
        t.w1 = t.w1.or(p.w1);
        t.w2 = t.w2.or(p.w2);
    }
    let name = "H4".to_string();
    if t.points == 0 {
        return Ok(HypothesisReport {
            name,
            status: Status::Inconclusive,
            evidence: vec!["family is empty over F_q".into()],
            witness: None,
            counts: Vec::new(),
        });
    }
    if d < m + 2 {
        return Ok(HypothesisReport {
            name,
            status: Status::Inconclusive,
            evidence: vec![format!("d = {d} < m + 2 = {}", m + 2)],
            witness: None,
            counts: Vec::new(),
        });
    }
    let q = BigUint::from(field.q());
    let dim = (d - m) as u32;
    let n1 = BigUint::from(t.n1);
    let n2 = BigUint::from(t.n2);
    let b1 = BigUint::from(c1) * q.pow(dim - 1);
    let b2 = BigUint::from(c2) * q.pow(dim - 2);
    let two = BigUint::from(2u8);
    let full1 = &two * &n1 >= q.pow(dim);
    let full2 = n2 >= &two * BigUint::from(c1) * q.pow(dim - 1);
    let everywhere = t.n1 == t.points;
    let mut evidence = vec![
        format!("|V(F_q)| = {}", t.points),
        format!("N1 = #(Disc = 0) = {}, allowed {b1}", t.n1),
        format!("N2 = #(Disc = Subdisc = 0) = {}, allowed {b2}", t.n2),
    ];
    if t.wild > 0 {
        evidence.push(format!("{} points have f' = 0 (Disc and Subdisc reported as 0)", t.wild));
    }
    let pt = |w: &Option<(Vec<FqElem>, FqElem)>| {
        w.as_ref().map(|(a, a0)| {
            let mut v = a.clone();
            v.push(*a0);
            format!("(A{}, ..., A0) = {}", d - 1, format_point(field, &v))
        })
    };
    let (status, witness) = if everywhere || full1 {
        let why = if everywhere { format!("N1 = |V(F_q)| = {}", t.n1) } else { format!("N1 = {} >= q^{dim}/2", t.n1) };
        (Status::Fail, Some(format!("{why}; first point {}", pt(&t.w1).unwrap_or_default())))
    } else if full2 {
        (Status::Fail, Some(format!("N2 = {}; first point {}", t.n2, pt(&t.w2).unwrap_or_default())))
    } else if n1 <= b1 && n2 <= b2 {
        evidence.push(format!("{NECESSARY_ONLY}: locus sizes consistent with codimension one and two"));
        (Status::PassNecessary, None)
    } else {
        (Status::Inconclusive, pt(&t.w2).or(pt(&t.w1)))
    };
    let counts = vec![("points".into(), t.points), ("n1".into(), t.n1), ("n2".into(), t.n2), ("wild".into(), t.wild)];
    Ok(HypothesisReport { name, status, evidence, witness, counts })
}

/// All three reports.
pub fn run_all(spec: &FamilySpec, field: &FieldSpec, cfg: &DiagnosticsConfig) -> Result<[HypothesisReport; 3]> {
    Ok([check_h1_h2(spec, field, cfg)?, check_h3(spec, field, cfg)?, check_h4(spec, field, cfg)?])
}
