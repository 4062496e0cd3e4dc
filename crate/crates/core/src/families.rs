//! Constrained families of monic polynomials with `f(0) = 0`.
//!
//! A member is a coefficient vector `(a_{d-1}, ..., a_1)` on which every
//! constraint vanishes. The constant term is not part of the member; the
//! counting code quantifies over it explicitly.
//!
//! Enumeration is an odometer with `a_1` moving fastest, each coordinate in
//! field enumeration order. The position of `a` in the full space
//! `F_q^{d-1}` is `sum_j index(a_j) * q^{j-1}`.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::Variables;
use crate::ff::{FieldSpec, FqElem};
use crate::multipoly::{elementary_symmetric_in, matrix_rank, weighted_compose, MultiPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Linear,
    Symmetric,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    d: usize,
    kind: FamilyKind,
    constraints: Vec<MultiPoly>,
    degrees: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FamilyMember {
    pub a: Vec<FqElem>,
}

impl FamilySpec {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn constraints(&self) -> &[MultiPoly] {
        &self.constraints
    }

    /// Total degrees `d_1, ..., d_m`; a zero constraint has degree 0.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn variables(&self) -> Variables {
        Variables::coefficients(self.d)
    }

    /// Size of the coordinate space `F_q^{d-1}`.
    pub fn space_size(&self, field: &FieldSpec) -> u128 {
        (field.q() as u128).pow(self.d as u32 - 1)
    }

    pub fn contains(&self, field: &FieldSpec, a: &[FqElem]) -> bool {
        self.constraints.iter().all(|g| g.eval_unchecked(field, a).is_zero())
    }

    /// Same family with every constraint replaced by its highest form.
    pub fn highest_forms(&self) -> Result<FamilySpec> {
        let constraints = self.constraints.iter().map(MultiPoly::highest_form).collect::<Result<Vec<_>>>()?;
        Ok(FamilySpec { constraints, ..self.clone() })
    }

    /// Checks `q > d >= m + 2`, required before running experiments.
    pub fn validate_for(&self, field: &FieldSpec) -> Result<()> {
        if field.q() <= self.d as u64 {
            return Err(Error::ParameterRange(format!("q > d required (q = {}, d = {})", field.q(), self.d)));
        }
        if self.d < self.m() + 2 {
            return Err(Error::ParameterRange(format!("d >= m + 2 required (d = {}, m = {})", self.d, self.m())));
        }
        Ok(())
    }
}

fn check_constraints(d: usize, constraints: &[MultiPoly]) -> Result<Vec<u32>> {
    if d < 2 {
        return Err(Error::ParameterRange(format!("need d >= 2, got {d}")));
    }
    if constraints.is_empty() {
        return Err(Error::ParameterRange("need at least one constraint".into()));
    }
    for g in constraints {
        if g.nvars() != d - 1 {
            return Err(Error::ArityMismatch { expected: d - 1, found: g.nvars() });
        }
    }
    Ok(constraints.iter().map(|g| g.total_degree().unwrap_or(0)).collect())
}

/// Family cut out by arbitrary constraints in `A_{d-1}, ..., A_1`.
pub fn custom_family(d: usize, constraints: Vec<MultiPoly>) -> Result<FamilySpec> {
    let degrees = check_constraints(d, &constraints)?;
    Ok(FamilySpec { d, kind: FamilyKind::Custom, constraints, degrees })
}

/// Family cut out by degree-1 forms in `A_{d-1}, ..., A_2` whose linear
/// parts have full rank.
pub fn linear_family(field: &FieldSpec, d: usize, forms: Vec<MultiPoly>) -> Result<FamilySpec> {
    let degrees = check_constraints(d, &forms)?;
    let m = forms.len();
    if m + 2 > d {
        return Err(Error::ParameterRange(format!("need m <= d - 2, got m = {m}, d = {d}")));
    }
    for g in &forms {
        if g.total_degree() != Some(1) {
            return Err(Error::ParameterRange("linear family forms must have degree 1".into()));
        }
        if g.involves(d - 2) {
            return Err(Error::ParameterRange("linear family forms may not involve A1".into()));
        }
    }
    let rows: Vec<Vec<FqElem>> = forms
        .iter()
        .map(|g| {
            let mut row = vec![field.zero(); d - 1];
            for (mono, c) in g.terms() {
                if let Some(i) = mono.exponents().iter().position(|&e| e == 1) {
                    row[i] = c;
                }
            }
            row
        })
        .collect();
    let rank = matrix_rank(field, &rows);
    if rank < m {
        return Err(Error::RankDeficient { rank, expected: m });
    }
    Ok(FamilySpec { d, kind: FamilyKind::Linear, constraints: forms, degrees })
}

/// Family cut out by `S_i(Pi_1, ..., Pi_s) = 0`, where `Pi_k` is the k-th
/// elementary symmetric polynomial in `A_{d-1}, ..., A_2`.
pub fn symmetric_family(field: &FieldSpec, d: usize, s: usize, ss: Vec<MultiPoly>) -> Result<FamilySpec> {
    let m = ss.len();
    if m == 0 || m > s || s + m + 4 > d {
        return Err(Error::ParameterRange(format!("need m <= s <= d - m - 4, got m = {m}, s = {s}, d = {d}")));
    }
    for g in &ss {
        if g.nvars() != s {
            return Err(Error::ArityMismatch { expected: s, found: g.nvars() });
        }
    }
    let vars: Vec<usize> = (0..d - 2).collect();
    let pis = (1..=s)
        .map(|k| elementary_symmetric_in(field, d - 1, &vars, k))
        .collect::<Result<Vec<_>>>()?;
    let constraints = ss.iter().map(|g| weighted_compose(field, g, &pis)).collect::<Result<Vec<_>>>()?;
    let degrees = check_constraints(d, &constraints)?;
    Ok(FamilySpec { d, kind: FamilyKind::Symmetric, constraints, degrees })
}

/// Position of `a` in the odometer order of `F_q^{d-1}`.
pub fn member_index(field: &FieldSpec, a: &[FqElem]) -> u128 {
    let q = field.q() as u128;
    a.iter().fold(0u128, |acc, x| acc * q + x.index() as u128)
}

/// Splits `0..total` into `parts` contiguous, disjoint, covering ranges.
pub fn partitions(total: u128, parts: usize) -> Vec<Range<u128>> {
    let parts = parts.max(1) as u128;
    (0..parts)
        .map(|i| (total * i / parts)..(total * (i + 1) / parts))
        .filter(|r| !r.is_empty())
        .collect()
}

/// Calls `f` on every member whose position lies in `range`, in order.
pub fn for_each_member(spec: &FamilySpec, field: &FieldSpec, range: Range<u128>, mut f: impl FnMut(&[FqElem])) {
    let n = spec.d - 1;
    let q = field.q() as u128;
    let end = range.end.min(spec.space_size(field));
    if range.start >= end {
        return;
    }
    let mut digits = vec![0u64; n];
    let mut rest = range.start;
    for k in (0..n).rev() {
        digits[k] = (rest % q) as u64;
        rest /= q;
    }
    let mut a: Vec<FqElem> = digits.iter().map(|&i| field.from_index(i).expect("digit below q")).collect();
    for _ in range.start..end {
        if spec.contains(field, &a) {
            f(&a);
        }
        for k in (0..n).rev() {
            digits[k] += 1;
            if digits[k] == q as u64 {
                digits[k] = 0;
                a[k] = field.zero();
            } else {
                a[k] = field.from_index(digits[k]).expect("digit below q");
                break;
            }
        }
    }
}

/// Members in `partition` (the whole space when `None`), in odometer order.
pub fn enumerate_family(spec: &FamilySpec, field: &FieldSpec, partition: Option<Range<u128>>) -> Vec<FamilyMember> {
    let range = partition.unwrap_or(0..spec.space_size(field));
    let mut out = Vec::new();
    for_each_member(spec, field, range, |a| out.push(FamilyMember { a: a.to_vec() }));
    out
}

/// Number of chunks the coordinate space is cut into for parallel runs.
/// Fixed so partial results do not depend on the worker count.
const CHUNKS: usize = 64;

/// Runs `job` on a fixed partition of the coordinate space using `workers`
/// threads and returns the per-chunk results in partition order.
pub fn map_partitions<T, F>(spec: &FamilySpec, field: &FieldSpec, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u128>) -> T + Sync + Send,
{
    let parts = partitions(spec.space_size(field), CHUNKS);
    if workers <= 1 {
        return parts.into_iter().map(job).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
    pool.install(|| parts.into_par_iter().map(&job).collect())
}

/// `|A|`, the number of normalized members (constant term fixed to 0).
pub fn family_cardinality(spec: &FamilySpec, field: &FieldSpec) -> u128 {
    let mut n = 0u128;
    for_each_member(spec, field, 0..spec.space_size(field), |_| n += 1);
    n
}

/// `|A| * q`: the count of points of the variety in coefficient space with
/// the constant term free.
pub fn ambient_cardinality(spec: &FamilySpec, field: &FieldSpec) -> u128 {
    family_cardinality(spec, field) * field.q() as u128
}
