//! Point counts of the incidence varieties `Gamma_r` and `Gamma_r^*`.
//!
//! `Gamma_r` holds `(a, a_0, alpha_1, ..., alpha_r)` with the `alpha_i`
//! pairwise distinct roots of `f_a + a_0`. `Gamma_r^*` replaces distinctness
//! and the root condition by the vanishing of every prefix divided
//! difference `Delta^{i-1} F(a_0, alpha_1, ..., alpha_i)`, which allows
//! repeated coordinates at repeated roots.

use num_bigint::BigUint;

use crate::bounds::{constants, gamma_star_bound, SqrtForm};
use crate::error::{Error, Result};
use crate::families::{enumerate_family, for_each_member, map_partitions, FamilySpec};
use crate::ff::{FieldSpec, FqElem};
use crate::poly::{extend_complete_homogeneous, MonicFamilyPoly};
use crate::valueset::{falling_factorial, summarize};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IncidenceCounts {
    pub r: usize,
    pub gamma_r: u128,
    pub gamma_r_star: u128,
    pub gamma_r_star_eq: u128,
}

fn check_r(spec: &FamilySpec, r: usize) -> Result<()> {
    if r == 0 || r > spec.d() {
        return Err(Error::ParameterRange(format!("need 1 <= r <= {}, got r = {r}", spec.d())));
    }
    Ok(())
}

/// `|Gamma_r(F_q)| = sum_{f, a_0} (n)_r`.
pub fn count_gamma_r(spec: &FamilySpec, field: &FieldSpec, r: usize) -> Result<u128> {
    check_r(spec, r)?;
    Ok(summarize(spec, field, 1).gamma_r[r - 1])
}

/// Tuple counts found by the prefix search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct StarCounts {
    all: u128,
    with_repeat: u128,
}

struct Dfs<'a> {
    field: &'a FieldSpec,
    order: &'a [FqElem],
    r: usize,
    d: usize,
    /// `h[i]` holds `h_0..=h_d` at the nodes `alpha_1..alpha_{i+1}`.
    h: Vec<Vec<FqElem>>,
    chosen: Vec<FqElem>,
    counts: StarCounts,
}

impl Dfs<'_> {
    /// Extends a prefix of length `i` (with `h[i-1]` filled) to depth `r`.
    fn descend(&mut self, poly: &MonicFamilyPoly, i: usize, repeat: bool) {
        if i == self.r {
            self.counts.all += 1;
            if repeat {
                self.counts.with_repeat += 1;
            }
            return;
        }
        for k in 0..self.order.len() {
            let x = self.order[k];
            let (prev, rest) = self.h.split_at_mut(i);
            extend_complete_homogeneous(self.field, &prev[i - 1], x, &mut rest[0]);
            // level i+1 equation; does not involve a_0 once i >= 1
            let dd = poly.divided_difference_from_h(self.field, i + 1, &self.h[i][..=self.d + 1 - (i + 1)]);
            if dd.is_zero() {
                let rep = repeat || self.chosen.contains(&x);
                self.chosen.push(x);
                self.descend(poly, i + 1, rep);
                self.chosen.pop();
            }
        }
    }
}

fn gamma_star_range(
    spec: &FamilySpec,
    field: &FieldSpec,
    r: usize,
    order: &[FqElem],
    range: std::ops::Range<u128>,
) -> StarCounts {
    let d = spec.d();
    let mut dfs = Dfs {
        field,
        order,
        r,
        d,
        h: vec![vec![field.zero(); d + 1]; r],
        chosen: Vec::with_capacity(r),
        counts: StarCounts::default(),
    };
    for_each_member(spec, field, range, |a| {
        // constant term 0 here; level 1 fixes a_0 = -f(alpha_1)
        let poly = MonicFamilyPoly::from_member(a, field.zero());
        for &x in order {
            let h0 = &mut dfs.h[0];
            h0[0] = field.one();
            for k in 1..=d {
                h0[k] = field.mul(h0[k - 1], x);
            }
            dfs.chosen.push(x);
            dfs.descend(&poly, 1, false);
            dfs.chosen.pop();
        }
    });
    dfs.counts
}

fn gamma_star_all(spec: &FamilySpec, field: &FieldSpec, r: usize, order: &[FqElem], workers: usize) -> StarCounts {
    map_partitions(spec, field, workers, |range| gamma_star_range(spec, field, r, order, range))
        .into_iter()
        .fold(StarCounts::default(), |acc, c| StarCounts { all: acc.all + c.all, with_repeat: acc.with_repeat + c.with_repeat })
}

/// `|Gamma_r^*(F_q)|` by depth-first search over the `alpha_i`, pruning a
/// prefix as soon as its divided difference is nonzero.
pub fn count_gamma_r_star(spec: &FamilySpec, field: &FieldSpec, r: usize) -> Result<u128> {
    check_r(spec, r)?;
    let order: Vec<FqElem> = field.elements().collect();
    Ok(gamma_star_all(spec, field, r, &order, 1).all)
}

/// Same count with candidate values tried in `order`, which must list every
/// field element once.
pub fn count_gamma_r_star_with_order(spec: &FamilySpec, field: &FieldSpec, r: usize, order: &[FqElem]) -> Result<u128> {
    check_r(spec, r)?;
    let mut idx: Vec<u64> = order.iter().map(|x| x.index()).collect();
    idx.sort_unstable();
    if idx.len() as u64 != field.q() || idx.iter().enumerate().any(|(i, &x)| i as u64 != x) {
        return Err(Error::ParameterRange("order must be a permutation of the field".into()));
    }
    for &x in order {
        field.check(x)?;
    }
    Ok(gamma_star_all(spec, field, r, order, 1).all)
}

/// Points of `Gamma_r^*` with some `alpha_i = alpha_j`, `i != j`.
pub fn count_gamma_r_star_eq(spec: &FamilySpec, field: &FieldSpec, r: usize) -> Result<u128> {
    check_r(spec, r)?;
    let order: Vec<FqElem> = field.elements().collect();
    Ok(gamma_star_all(spec, field, r, &order, 1).with_repeat)
}

/// All three counts for one `r`, from a single search plus the root-count
/// formula.
pub fn incidence_counts(spec: &FamilySpec, field: &FieldSpec, r: usize, workers: usize) -> Result<IncidenceCounts> {
    check_r(spec, r)?;
    let gamma_r = summarize(spec, field, workers).gamma_r[r - 1];
    let order: Vec<FqElem> = field.elements().collect();
    let star = gamma_star_all(spec, field, r, &order, workers);
    Ok(IncidenceCounts { r, gamma_r, gamma_r_star: star.all, gamma_r_star_eq: star.with_repeat })
}

/// Every `(alpha_1, ..., alpha_r)` found by the search for the single
/// polynomial `F(a_0, T)` given by `poly` (its own constant term is used).
pub fn gamma_r_star_tuples(field: &FieldSpec, poly: &MonicFamilyPoly, r: usize) -> Result<Vec<Vec<FqElem>>> {
    if r == 0 || r > poly.degree() {
        return Err(Error::ParameterRange(format!("need 1 <= r <= {}, got r = {r}", poly.degree())));
    }
    let mut out = Vec::new();
    let mut tuple = Vec::with_capacity(r);
    fn rec(field: &FieldSpec, poly: &MonicFamilyPoly, r: usize, tuple: &mut Vec<FqElem>, out: &mut Vec<Vec<FqElem>>) {
        if tuple.len() == r {
            out.push(tuple.clone());
            return;
        }
        for x in field.elements() {
            tuple.push(x);
            if poly.divided_difference(field, tuple).expect("nonempty").is_zero() {
                rec(field, poly, r, tuple, out);
            }
            tuple.pop();
        }
    }
    rec(field, poly, r, &mut tuple, &mut out);
    Ok(out)
}

fn oracle_cost(spec: &FamilySpec, field: &FieldSpec, r: usize, budget: u128) -> Result<()> {
    let q = field.q() as u128;
    let needed = spec.space_size(field).saturating_mul(q.saturating_pow(r as u32 + 1));
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

fn tuples(field: &FieldSpec, r: usize) -> impl Iterator<Item = Vec<FqElem>> + '_ {
    let q = field.q();
    let total = q.pow(r as u32);
    (0..total).map(move |mut i| {
        let mut t = Vec::with_capacity(r);
        for _ in 0..r {
            t.push(field.from_index(i % q).expect("below q"));
            i /= q;
        }
        t
    })
}

/// `|Gamma_r(F_q)|` by enumerating every `(a, a_0, alpha_1, ..., alpha_r)`.
pub fn count_gamma_r_raw(spec: &FamilySpec, field: &FieldSpec, r: usize, budget: u128) -> Result<u128> {
    check_r(spec, r)?;
    oracle_cost(spec, field, r, budget)?;
    let mut n = 0u128;
    for m in enumerate_family(spec, field, None) {
        for a0 in field.elements() {
            let f = MonicFamilyPoly::from_member(&m.a, a0).to_unipoly(field);
            for t in tuples(field, r) {
                let distinct = (0..r).all(|i| (i + 1..r).all(|j| t[i] != t[j]));
                if distinct && t.iter().all(|&x| f.eval(field, x).unwrap().is_zero()) {
                    n += 1;
                }
            }
        }
    }
    Ok(n)
}

/// `|Gamma_r^*(F_q)|` as the number of tuples whose product `prod (T -
/// alpha_i)` divides `f_a + a_0`.
pub fn count_gamma_r_star_hermite(spec: &FamilySpec, field: &FieldSpec, r: usize, budget: u128) -> Result<u128> {
    check_r(spec, r)?;
    oracle_cost(spec, field, r, budget)?;
    let mut n = 0u128;
    for m in enumerate_family(spec, field, None) {
        for a0 in field.elements() {
            let poly = MonicFamilyPoly::from_member(&m.a, a0);
            for t in tuples(field, r) {
                if poly.hermite_divides(field, &t)? {
                    n += 1;
                }
            }
        }
    }
    Ok(n)
}

/// `|Gamma_r^*|` against its main term `q^{d-m}` and error bound.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaStarReport {
    pub count: u128,
    pub main_term: u128,
    pub bound: SqrtForm,
    pub within: bool,
}

pub fn gamma_star_estimate_report(spec: &FamilySpec, field: &FieldSpec, r: usize) -> Result<GammaStarReport> {
    let count = count_gamma_r_star(spec, field, r)?;
    gamma_star_report_from(spec, field, r, count)
}

pub fn gamma_star_report_from(spec: &FamilySpec, field: &FieldSpec, r: usize, count: u128) -> Result<GammaStarReport> {
    let q = field.q();
    let e = (spec.d() - spec.m()) as u32;
    let main_term = (q as u128).pow(e);
    let bound = gamma_star_bound(spec.d(), spec.m(), spec.degrees(), r, q)?;
    let dev = BigUint::from(count.abs_diff(main_term));
    let within = bound.admits(&dev);
    Ok(GammaStarReport { count, main_term, bound, within })
}

/// `|Gamma_r^{*,=}| <= delta_r C(r, 2) q^{d-m-1}`, compared exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaEqCheck {
    pub count: u128,
    pub bound: BigUint,
    pub holds: bool,
    /// `count / bound`, or 0 when the bound is 0.
    pub ratio: f64,
}

pub fn gamma_eq_bound_check(spec: &FamilySpec, field: &FieldSpec, r: usize) -> Result<GammaEqCheck> {
    let count = count_gamma_r_star_eq(spec, field, r)?;
    gamma_eq_check_from(spec, field, r, count)
}

pub fn gamma_eq_check_from(spec: &FamilySpec, field: &FieldSpec, r: usize, count: u128) -> Result<GammaEqCheck> {
    let c = constants(spec.d(), spec.degrees(), r)?;
    let pairs = BigUint::from((r * r.saturating_sub(1) / 2) as u64);
    let e = spec.d() - spec.m() - 1;
    let bound = &c.delta_r * pairs * BigUint::from(field.q()).pow(e as u32);
    let holds = BigUint::from(count) <= bound;
    let ratio = if bound == BigUint::from(0u8) {
        0.0
    } else {
        count as f64 / crate::bounds::biguint_to_f64(&bound)
    };
    Ok(GammaEqCheck { count, bound, holds, ratio })
}

/// Contribution `(n)_r` of a single polynomial with `n` distinct roots.
pub fn gamma_r_single(field: &FieldSpec, poly: &MonicFamilyPoly, r: usize) -> Result<u128> {
    let n = crate::poly::roots_in_field(field, &poly.to_unipoly(field))?.len() as u128;
    Ok(falling_factorial(n, r))
}
