//! Value sets and interpolating-set counts over a family.
//!
//! All per-member quantities come from the image histogram
//! `count[v] = #{c : f(c) = v}`: `V(f)` is the number of occupied cells and
//! `f + a_0` has exactly `count[-a_0]` distinct roots.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::families::{for_each_member, map_partitions, FamilySpec};
use crate::ff::{FieldSpec, FqElem};
use crate::poly::UniPoly;

/// Aggregates over a family, with the constant term ranging over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueSetSummary {
    /// `V(f)` for each member in enumeration order.
    pub per_member: Vec<u64>,
    pub card_a: u128,
    pub sum_v: u128,
    /// `S_r` for `r = 1..=d` at index `r - 1`.
    pub s_r: Vec<u128>,
    /// `|Gamma_r(F_q)|` for `r = 1..=d` at index `r - 1`.
    pub gamma_r: Vec<u128>,
}

impl ValueSetSummary {
    /// `V(A) = sum V(f) / |A|`.
    pub fn average(&self) -> Result<BigRational> {
        if self.card_a == 0 {
            return Err(Error::EmptyFamily);
        }
        Ok(BigRational::new(BigInt::from(self.sum_v), BigInt::from(self.card_a)))
    }

    /// `S_r`, zero for `r > d`.
    pub fn s(&self, r: usize) -> u128 {
        if r == 0 {
            return 0;
        }
        self.s_r.get(r - 1).copied().unwrap_or(0)
    }

    fn merge(&mut self, other: ValueSetSummary) {
        self.per_member.extend(other.per_member);
        self.card_a += other.card_a;
        self.sum_v += other.sum_v;
        for (x, y) in self.s_r.iter_mut().zip(other.s_r) {
            *x += y;
        }
        for (x, y) in self.gamma_r.iter_mut().zip(other.gamma_r) {
            *x += y;
        }
    }
}

/// Image histogram of `T^d + a_{d-1} T^{d-1} + ... + a_1 T` into `counts`.
#[inline]
pub(crate) fn image_counts(field: &FieldSpec, a: &[FqElem], counts: &mut [u32]) {
    counts.iter_mut().for_each(|c| *c = 0);
    for c in field.elements() {
        let mut acc = field.one();
        for &aj in a {
            acc = field.add(field.mul(acc, c), aj);
        }
        acc = field.mul(acc, c);
        counts[acc.index() as usize] += 1;
    }
}

/// Binomial coefficients `C(n, r)` for `n, r <= d`.
fn binomial_table(d: usize) -> Vec<Vec<u128>> {
    let mut t = vec![vec![0u128; d + 1]; d + 1];
    for n in 0..=d {
        t[n][0] = 1;
        for r in 1..=n {
            t[n][r] = t[n - 1][r - 1] + if r < n { t[n - 1][r] } else { 0 };
        }
    }
    t
}

/// Falling factorial `(n)_r`.
pub fn falling_factorial(n: u128, r: usize) -> u128 {
    (0..r as u128).map(|i| n.saturating_sub(i)).product()
}

fn summarize_range(spec: &FamilySpec, field: &FieldSpec, range: std::ops::Range<u128>) -> ValueSetSummary {
    let d = spec.d();
    let binom = binomial_table(d);
    let mut counts = vec![0u32; field.q() as usize];
    let mut out = ValueSetSummary {
        per_member: Vec::new(),
        card_a: 0,
        sum_v: 0,
        s_r: vec![0; d],
        gamma_r: vec![0; d],
    };
    for_each_member(spec, field, range, |a| {
        image_counts(field, a, &mut counts);
        let mut v = 0u64;
        for &n in counts.iter().filter(|&&n| n > 0) {
            v += 1;
            let n = n as usize;
            debug_assert!(n <= d);
            for r in 1..=n {
                out.s_r[r - 1] += binom[n][r];
                out.gamma_r[r - 1] += falling_factorial(n as u128, r);
            }
        }
        out.per_member.push(v);
        out.card_a += 1;
        out.sum_v += v as u128;
    });
    out
}

/// One pass over the family computing every aggregate, split across
/// `workers` threads. The result does not depend on `workers`.
pub fn summarize(spec: &FamilySpec, field: &FieldSpec, workers: usize) -> ValueSetSummary {
    let parts = map_partitions(spec, field, workers, |r| summarize_range(spec, field, r));
    let mut it = parts.into_iter();
    let mut acc = it.next().unwrap_or_else(|| summarize_range(spec, field, 0..0));
    for p in it {
        acc.merge(p);
    }
    acc
}

/// `|{f(c) : c in F_q}|` via a presence bitmap.
pub fn value_set_size(field: &FieldSpec, f: &UniPoly) -> Result<u64> {
    for &c in f.coeffs() {
        field.check(c)?;
    }
    let mut seen = vec![false; field.q() as usize];
    let mut v = 0;
    for c in field.elements() {
        let y = f.eval_unchecked(field, c).index() as usize;
        if !seen[y] {
            seen[y] = true;
            v += 1;
        }
    }
    Ok(v)
}

/// `V(A)` as an exact rational.
pub fn avg_value_set(spec: &FamilySpec, field: &FieldSpec) -> Result<BigRational> {
    summarize(spec, field, 1).average()
}

/// `mu_d = sum_{r=1}^d (-1)^{r-1} / r!`.
pub fn mu_d(d: usize) -> BigRational {
    let mut acc = BigRational::zero();
    let mut fact = BigInt::one();
    for r in 1..=d {
        fact *= BigInt::from(r);
        let term = BigRational::new(BigInt::one(), fact.clone());
        if r % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn binomial_u128(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// `S_r` by literal enumeration of `r`-subsets of `F_q`: for every subset,
/// member and constant term, test whether `f + a_0` vanishes on the subset.
/// Refuses to run when `C(q, r) * |A|` exceeds `budget`.
pub fn s_r_direct(spec: &FamilySpec, field: &FieldSpec, r: usize, budget: u128) -> Result<u128> {
    if r == 0 {
        return Err(Error::ParameterRange("need r >= 1".into()));
    }
    let q = field.q() as usize;
    let members: Vec<Vec<FqElem>> = crate::families::enumerate_family(spec, field, None).into_iter().map(|m| m.a).collect();
    let needed = binomial_u128(q as u128, r as u128).saturating_mul(members.len() as u128);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    if r > q {
        return Ok(0);
    }
    let elems: Vec<FqElem> = field.elements().collect();
    let polys: Vec<Vec<FqElem>> = members
        .iter()
        .map(|a| {
            // values of f at every element, constant term 0
            elems
                .iter()
                .map(|&c| {
                    let mut acc = field.one();
                    for &aj in a {
                        acc = field.add(field.mul(acc, c), aj);
                    }
                    field.mul(acc, c)
                })
                .collect()
        })
        .collect();
    let mut total = 0u128;
    let mut subset: Vec<usize> = (0..r).collect();
    loop {
        for vals in &polys {
            for &a0 in &elems {
                if subset.iter().all(|&i| field.add(vals[i], a0).is_zero()) {
                    total += 1;
                }
            }
        }
        // next subset in lexicographic order
        let mut k = r;
        while k > 0 && subset[k - 1] == q - r + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        subset[k - 1] += 1;
        for j in k..r {
            subset[j] = subset[j - 1] + 1;
        }
    }
    Ok(total)
}

/// `S_r = sum_{f, a_0} C(n, r)` with `n` the number of distinct roots of
/// `f + a_0`.
pub fn s_r_fast(spec: &FamilySpec, field: &FieldSpec, r: usize) -> Result<u128> {
    if r == 0 {
        return Err(Error::ParameterRange("need r >= 1".into()));
    }
    Ok(summarize(spec, field, 1).s(r))
}

/// `(1/|A|) sum_r (-1)^{r-1} S_r` and whether it equals `V(A)` exactly.
pub fn inclusion_exclusion_check(spec: &FamilySpec, field: &FieldSpec) -> Result<(BigRational, bool)> {
    let s = summarize(spec, field, 1);
    inclusion_exclusion_from(&s)
}

/// Same check on precomputed aggregates.
pub fn inclusion_exclusion_from(s: &ValueSetSummary) -> Result<(BigRational, bool)> {
    let avg = s.average()?;
    let mut alt = BigInt::zero();
    for (i, &sr) in s.s_r.iter().enumerate() {
        if i % 2 == 0 {
            alt += BigInt::from(sr);
        } else {
            alt -= BigInt::from(sr);
        }
    }
    let lhs = BigRational::new(alt, BigInt::from(s.card_a));
    let ok = lhs == avg;
    Ok((lhs, ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_poly_expr, Variables};
    use crate::families::{custom_family, enumerate_family};
    use crate::poly::MonicFamilyPoly;

    fn f(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    fn family(field: &FieldSpec, d: usize, src: &[&str]) -> FamilySpec {
        let v = Variables::coefficients(d);
        custom_family(d, src.iter().map(|s| parse_poly_expr(s, field, &v).unwrap()).collect()).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn value_set_examples() {
        let f3 = f(3);
        assert_eq!(value_set_size(&f3, &UniPoly::from_ints(&f3, &[0, 0, 1])).unwrap(), 2);
        let f5 = f(5);
        assert_eq!(value_set_size(&f5, &UniPoly::from_ints(&f5, &[0, 0, 0, 1])).unwrap(), 5);
        let f7 = f(7);
        assert_eq!(value_set_size(&f7, &UniPoly::from_ints(&f7, &[0, 0, 0, 1])).unwrap(), 3);
    }

    #[test]
    fn mu_values() {
        assert_eq!(mu_d(1), rat(1, 1));
        assert_eq!(mu_d(2), rat(1, 2));
        assert_eq!(mu_d(3), rat(2, 3));
        assert_eq!(mu_d(4), rat(5, 8));
    }

    // Reference values from an independent brute-force enumeration.
    #[test]
    fn frozen_reference_values() {
        let cases: [(u64, usize, &str, u128, u128, &[u128]); 4] = [
            (5, 3, "A2", 5, 17, &[25, 10, 2]),
            (7, 4, "A3", 49, 226, &[343, 147, 35, 5]),
            (11, 4, "A3", 121, 861, &[1331, 605, 165, 30]),
            (3, 4, "A3^2 - A2", 9, 18, &[27, 9, 0, 0]),
        ];
        for (p, d, g, card, sum_v, s) in cases {
            let field = f(p);
            let fam = family(&field, d, &[g]);
            let sum = summarize(&fam, &field, 1);
            assert_eq!(sum.card_a, card);
            assert_eq!(sum.sum_v, sum_v);
            assert_eq!(sum.s_r, s);
            assert_eq!(sum.average().unwrap(), rat(sum_v as i64, card as i64));
        }
    }

    #[test]
    fn singleton_average_and_range() {
        let f5 = f(5);
        let fam = family(&f5, 3, &["A2 - 1", "A1 - 3"]);
        let avg = avg_value_set(&fam, &f5).unwrap();
        let poly = MonicFamilyPoly::from_member(&[f5.one(), f5.from_int(3)], f5.zero()).to_unipoly(&f5);
        assert_eq!(avg, rat(value_set_size(&f5, &poly).unwrap() as i64, 1));
        let empty = family(&f5, 3, &["1"]);
        assert_eq!(avg_value_set(&empty, &f5), Err(Error::EmptyFamily));
        assert_eq!(inclusion_exclusion_check(&empty, &f5), Err(Error::EmptyFamily));
    }

    #[test]
    fn direct_matches_fast() {
        for (p, d, g) in [(5, 3, "A2"), (5, 4, "A3^2 + A1"), (7, 3, "A2*A1 - 1"), (3, 4, "A3^2 - A2")] {
            let field = f(p);
            let fam = family(&field, d, &[g]);
            let card = summarize(&fam, &field, 1).card_a;
            for r in 1..=d + 1 {
                let direct = s_r_direct(&fam, &field, r, u128::MAX).unwrap();
                assert_eq!(direct, s_r_fast(&fam, &field, r).unwrap(), "p={p} d={d} g={g} r={r}");
                if r == 1 {
                    assert_eq!(direct, card * p as u128);
                }
            }
        }
        let f5 = f(5);
        let fam = family(&f5, 3, &["A2"]);
        assert!(matches!(s_r_direct(&fam, &f5, 2, 10), Err(Error::BudgetExceeded { needed: 50, budget: 10 })));
    }

    #[test]
    fn r_equals_d_counts_split_polynomials() {
        // S_d counts members f and d-subsets X with f + a_0 = prod_{x in X}(T - x)
        let f5 = f(5);
        let fam = family(&f5, 3, &["A2"]);
        let mut want = 0u128;
        for m in enumerate_family(&fam, &f5, None) {
            for a0 in f5.elements() {
                let g = MonicFamilyPoly::from_member(&m.a, a0).to_unipoly(&f5);
                if crate::poly::roots_in_field(&f5, &g).unwrap().len() == 3 {
                    want += 1;
                }
            }
        }
        assert_eq!(s_r_fast(&fam, &f5, 3).unwrap(), want);
    }

    #[test]
    fn inclusion_exclusion_holds() {
        for (p, d, g) in [(5, 3, "A2"), (7, 4, "A3"), (7, 4, "A3^2 + A2 - A1"), (5, 5, "A4*A2 + 1")] {
            let field = f(p);
            let fam = family(&field, d, &[g]);
            let (lhs, ok) = inclusion_exclusion_check(&fam, &field).unwrap();
            assert!(ok);
            assert_eq!(lhs, avg_value_set(&fam, &field).unwrap());
        }
    }

    #[test]
    fn value_set_counts_constants_with_roots() {
        let f7 = f(7);
        let fam = family(&f7, 4, &["A3 + A1"]);
        for m in enumerate_family(&fam, &f7, None) {
            let base = MonicFamilyPoly::from_member(&m.a, f7.zero()).to_unipoly(&f7);
            let v = value_set_size(&f7, &base).unwrap();
            let with_root = f7
                .elements()
                .filter(|&a0| {
                    let g = MonicFamilyPoly::from_member(&m.a, a0).to_unipoly(&f7);
                    !crate::poly::roots_in_field(&f7, &g).unwrap().is_empty()
                })
                .count() as u64;
            assert_eq!(v, with_root);
            for c in f7.elements() {
                let shifted = base.add(&f7, &UniPoly::constant(c));
                assert_eq!(value_set_size(&f7, &shifted).unwrap(), v);
            }
        }
    }

    #[test]
    fn summary_independent_of_workers() {
        let f7 = f(7);
        let fam = family(&f7, 5, &["A4^2 + A3*A2 - A1 + 2"]);
        let one = summarize(&fam, &f7, 1);
        for w in [2, 3, 8] {
            assert_eq!(summarize(&fam, &f7, w), one);
        }
    }

    #[test]
    fn extension_field_identity() {
        let f4 = FieldSpec::new(2, 2, None).unwrap();
        let v = Variables::coefficients(3);
        let g = parse_poly_expr("A2 + x", &f4, &v).unwrap();
        let fam = custom_family(3, vec![g]).unwrap();
        let (_, ok) = inclusion_exclusion_check(&fam, &f4).unwrap();
        assert!(ok);
    }
}
