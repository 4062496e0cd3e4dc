//! Sparse multivariate polynomials over `F_q`.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors under graded
//! lexicographic order, so iteration, `highest_form` and printing are
//! canonical. Zero coefficients are never stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ff::{Embedding, FieldSpec, FqElem};

/// Exponent vector ordered by total degree, then lexicographically with
/// variable 0 most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, FqElem>,
}

/// Jacobian matrix evaluated at a point, with its rank over the field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobianEval {
    pub matrix: Vec<Vec<FqElem>>,
    pub rank: usize,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: FqElem) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    /// The variable with index `i`.
    pub fn var(field: &FieldSpec, nvars: usize, i: usize) -> Result<Self> {
        if i >= nvars {
            return Err(Error::ArityMismatch { expected: nvars, found: i + 1 });
        }
        let mut e = vec![0; nvars];
        e[i] = 1;
        Ok(Self::from_terms(nvars, [(Monomial(e), field.one())]))
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs, summing
    /// repeated monomials and dropping zeros.
    pub fn from_terms_checked(
        field: &FieldSpec,
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, FqElem)>,
    ) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            field.check(c)?;
            if m.0.len() != nvars {
                return Err(Error::ArityMismatch { expected: nvars, found: m.0.len() });
            }
            p.add_term(field, m, c);
        }
        Ok(p)
    }

    fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, FqElem)>) -> Self {
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        MultiPoly { nvars, terms }
    }

    fn add_term(&mut self, field: &FieldSpec, m: Monomial, c: FqElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = field.add(*v, c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, FqElem)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, field: &FieldSpec, m: &Monomial) -> FqElem {
        self.terms.get(m).copied().unwrap_or_else(|| field.zero())
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Whether variable `i` occurs in some term.
    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.0.get(i).is_some_and(|&e| e > 0))
    }

    fn same_arity(&self, other: &MultiPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::ArityMismatch { expected: self.nvars, found: other.nvars });
        }
        Ok(())
    }

    pub fn add(&self, field: &FieldSpec, other: &MultiPoly) -> Result<MultiPoly> {
        self.same_arity(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(field, m.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self, field: &FieldSpec) -> MultiPoly {
        MultiPoly::from_terms(self.nvars, self.terms.iter().map(|(m, &c)| (m.clone(), field.neg(c))))
    }

    pub fn sub(&self, field: &FieldSpec, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(field, &other.neg(field))
    }

    pub fn scale(&self, field: &FieldSpec, c: FqElem) -> MultiPoly {
        MultiPoly::from_terms(self.nvars, self.terms.iter().map(|(m, &x)| (m.clone(), field.mul(x, c))))
    }

    pub fn mul(&self, field: &FieldSpec, other: &MultiPoly) -> Result<MultiPoly> {
        self.same_arity(other)?;
        let mut out = MultiPoly::zero(self.nvars);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(field, ma.mul(mb), field.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, field: &FieldSpec, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.nvars, field.one());
        for _ in 0..e {
            acc = acc.mul(field, self).expect("same arity");
        }
        acc
    }

    pub fn eval(&self, field: &FieldSpec, point: &[FqElem]) -> Result<FqElem> {
        if point.len() != self.nvars {
            return Err(Error::ArityMismatch { expected: self.nvars, found: point.len() });
        }
        for &x in point {
            field.check(x)?;
        }
        Ok(self.eval_unchecked(field, point))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, field: &FieldSpec, point: &[FqElem]) -> FqElem {
        let mut acc = field.zero();
        for (m, &c) in &self.terms {
            let mut t = c;
            for (&x, &e) in point.iter().zip(&m.0) {
                for _ in 0..e {
                    t = field.mul(t, x);
                }
            }
            acc = field.add(acc, t);
        }
        acc
    }

    /// Sum of the terms of maximal total degree.
    pub fn highest_form(&self) -> Result<MultiPoly> {
        let deg = self.total_degree().ok_or(Error::ZeroPolynomial)?;
        Ok(MultiPoly::from_terms(
            self.nvars,
            self.terms.iter().filter(|(m, _)| m.degree() == deg).map(|(m, &c)| (m.clone(), c)),
        ))
    }

    /// Formal partial derivative; `e * c` is reduced mod `p`, so terms whose
    /// exponent is divisible by the characteristic vanish.
    pub fn partial(&self, field: &FieldSpec, i: usize) -> Result<MultiPoly> {
        if i >= self.nvars {
            return Err(Error::ArityMismatch { expected: self.nvars, found: i + 1 });
        }
        let mut out = MultiPoly::zero(self.nvars);
        for (m, &c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut dm = m.0.clone();
            dm[i] -= 1;
            out.add_term(field, Monomial(dm), field.mul_int(c, e as u64));
        }
        Ok(out)
    }

    /// Substitutes `subs[i]` for variable `i`; all substitutes share one arity.
    pub fn compose(&self, field: &FieldSpec, subs: &[MultiPoly]) -> Result<MultiPoly> {
        if subs.len() != self.nvars {
            return Err(Error::ArityMismatch { expected: self.nvars, found: subs.len() });
        }
        let target = subs.first().map_or(0, |s| s.nvars);
        for s in subs {
            if s.nvars != target {
                return Err(Error::ArityMismatch { expected: target, found: s.nvars });
            }
        }
        let mut out = MultiPoly::zero(target);
        for (m, &c) in &self.terms {
            let mut t = MultiPoly::constant(target, c);
            for (s, &e) in subs.iter().zip(&m.0) {
                if e > 0 {
                    t = t.mul(field, &s.pow(field, e))?;
                }
            }
            out = out.add(field, &t)?;
        }
        Ok(out)
    }

    /// Weight of a monomial under `wt(Y_i) = i` (variables are 1-based).
    pub fn weight(m: &Monomial) -> u32 {
        m.0.iter().enumerate().map(|(i, &e)| (i as u32 + 1) * e).sum()
    }

    /// Component of highest weight under `wt(Y_i) = i`.
    pub fn highest_weight_component(&self) -> Result<MultiPoly> {
        let w = self.terms.keys().map(Self::weight).max().ok_or(Error::ZeroPolynomial)?;
        Ok(MultiPoly::from_terms(
            self.nvars,
            self.terms.iter().filter(|(m, _)| Self::weight(m) == w).map(|(m, &c)| (m.clone(), c)),
        ))
    }

    /// Maximal weight over the terms; `None` for zero.
    pub fn max_weight(&self) -> Option<u32> {
        self.terms.keys().map(Self::weight).max()
    }

    /// Re-expresses the polynomial over a larger field.
    pub fn map_coeffs(&self, emb: &Embedding) -> Result<MultiPoly> {
        let mut terms = BTreeMap::new();
        for (m, &c) in &self.terms {
            terms.insert(m.clone(), emb.map(c)?);
        }
        Ok(MultiPoly { nvars: self.nvars, terms })
    }

    /// Moves the polynomial to a new variable set: variable `i` becomes
    /// variable `map[i]` of an `nvars`-variable ring.
    pub fn relabel(&self, nvars: usize, map: &[usize]) -> Result<MultiPoly> {
        if map.len() != self.nvars {
            return Err(Error::ArityMismatch { expected: self.nvars, found: map.len() });
        }
        if let Some(&bad) = map.iter().find(|&&j| j >= nvars) {
            return Err(Error::ArityMismatch { expected: nvars, found: bad + 1 });
        }
        let mut terms = BTreeMap::new();
        for (m, &c) in &self.terms {
            let mut e = vec![0; nvars];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] += x;
            }
            terms.insert(Monomial(e), c);
        }
        Ok(MultiPoly { nvars, terms })
    }
}

/// `Pi_k` in all `nvars` variables.
pub fn elementary_symmetric(field: &FieldSpec, nvars: usize, k: usize) -> Result<MultiPoly> {
    let all: Vec<usize> = (0..nvars).collect();
    elementary_symmetric_in(field, nvars, &all, k)
}

/// `Pi_k` in the listed variables of an `nvars`-variable ring.
pub fn elementary_symmetric_in(field: &FieldSpec, nvars: usize, vars: &[usize], k: usize) -> Result<MultiPoly> {
    if k == 0 || k > vars.len() {
        return Err(Error::ParameterRange(format!("need 1 <= k <= {}, got k = {k}", vars.len())));
    }
    if let Some(&bad) = vars.iter().find(|&&v| v >= nvars) {
        return Err(Error::ArityMismatch { expected: nvars, found: bad + 1 });
    }
    let mut out = MultiPoly::zero(nvars);
    let mut chosen = Vec::with_capacity(k);
    fn rec(
        field: &FieldSpec,
        vars: &[usize],
        start: usize,
        k: usize,
        chosen: &mut Vec<usize>,
        out: &mut MultiPoly,
    ) {
        if chosen.len() == k {
            let mut e = vec![0; out.nvars];
            for &v in chosen.iter() {
                e[v] += 1;
            }
            out.add_term(field, Monomial(e), field.one());
            return;
        }
        for idx in start..vars.len() {
            chosen.push(vars[idx]);
            rec(field, vars, idx + 1, k, chosen, out);
            chosen.pop();
        }
    }
    rec(field, vars, 0, k, &mut chosen, &mut out);
    Ok(out)
}

/// `S(Pi_1, ..., Pi_s)` expanded.
pub fn weighted_compose(field: &FieldSpec, s_poly: &MultiPoly, pis: &[MultiPoly]) -> Result<MultiPoly> {
    s_poly.compose(field, pis)
}

/// Rank over the field by Gaussian elimination.
pub fn matrix_rank(field: &FieldSpec, rows: &[Vec<FqElem>]) -> usize {
    let mut m: Vec<Vec<FqElem>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = field.inv(m[rank][col]).expect("pivot is nonzero");
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = field.mul(m[r][col], inv);
                for c in col..ncols {
                    let v = field.mul(f, m[rank][c]);
                    m[r][c] = field.sub(m[r][c], v);
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Jacobian of `gs` at `point` (rows = polynomials) and its rank.
pub fn jacobian_eval(field: &FieldSpec, gs: &[MultiPoly], point: &[FqElem]) -> Result<JacobianEval> {
    let nvars = point.len();
    for g in gs {
        if g.nvars != nvars {
            return Err(Error::ArityMismatch { expected: nvars, found: g.nvars });
        }
    }
    let partials = jacobian(field, gs)?;
    jacobian_eval_with(field, &partials, point)
}

/// Symbolic Jacobian, `partials[i][j] = d g_i / d x_j`.
pub fn jacobian(field: &FieldSpec, gs: &[MultiPoly]) -> Result<Vec<Vec<MultiPoly>>> {
    gs.iter()
        .map(|g| (0..g.nvars).map(|j| g.partial(field, j)).collect())
        .collect()
}

/// Evaluates a precomputed symbolic Jacobian.
pub fn jacobian_eval_with(field: &FieldSpec, partials: &[Vec<MultiPoly>], point: &[FqElem]) -> Result<JacobianEval> {
    let mut matrix = Vec::with_capacity(partials.len());
    for row in partials {
        let mut r = Vec::with_capacity(row.len());
        for d in row {
            r.push(d.eval(field, point)?);
        }
        matrix.push(r);
    }
    let rank = matrix_rank(field, &matrix);
    Ok(JacobianEval { matrix, rank })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    fn mono(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    fn poly(field: &FieldSpec, n: usize, t: &[(&[u32], i64)]) -> MultiPoly {
        MultiPoly::from_terms_checked(field, n, t.iter().map(|(e, c)| (mono(e), field.from_int(*c)))).unwrap()
    }

    #[test]
    fn eval_examples() {
        // variables ordered (A3, A2, A1)
        let f5 = f(5);
        let a3 = MultiPoly::var(&f5, 3, 0).unwrap();
        let pt: Vec<_> = [2, 0, 1].iter().map(|&c| f5.from_int(c)).collect();
        assert_eq!(a3.eval(&f5, &pt).unwrap(), f5.from_int(2));
        let f3 = f(3);
        let g = poly(&f3, 3, &[(&[0, 1, 1], 1), (&[0, 0, 0], 1)]);
        let pt: Vec<_> = [0, 2, 2].iter().map(|&c| f3.from_int(c)).collect();
        assert_eq!(g.eval(&f3, &pt).unwrap(), f3.from_int(2));
        assert_eq!(MultiPoly::zero(3).eval(&f3, &pt).unwrap(), f3.zero());
        assert_eq!(g.eval(&f3, &pt[..2]), Err(Error::ArityMismatch { expected: 3, found: 2 }));
    }

    #[test]
    fn highest_form_examples() {
        let f5 = f(5);
        let g = poly(&f5, 3, &[(&[2, 0, 0], 1), (&[0, 1, 0], 1)]);
        assert_eq!(g.highest_form().unwrap(), poly(&f5, 3, &[(&[2, 0, 0], 1)]));
        let h = poly(&f5, 3, &[(&[1, 1, 0], 1), (&[0, 0, 2], 3)]);
        assert_eq!(h.highest_form().unwrap(), h);
        let k = poly(&f5, 3, &[(&[1, 1, 0], 1), (&[1, 0, 0], 1), (&[0, 0, 0], 1)]);
        assert_eq!(k.highest_form().unwrap(), poly(&f5, 3, &[(&[1, 1, 0], 1)]));
        assert_eq!(MultiPoly::zero(3).highest_form(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn highest_form_is_homogeneous() {
        let f7 = f(7);
        let g = poly(&f7, 3, &[(&[2, 1, 0], 3), (&[0, 1, 2], 1), (&[1, 1, 0], 5), (&[0, 0, 0], 2)]);
        let h = g.highest_form().unwrap();
        let deg = h.total_degree().unwrap() as u64;
        for lam in f7.elements().skip(1) {
            for a in f7.elements() {
                for b in f7.elements() {
                    let x = [a, b, f7.from_int(3)];
                    let lx: Vec<_> = x.iter().map(|&v| f7.mul(lam, v)).collect();
                    let lhs = h.eval(&f7, &lx).unwrap();
                    let rhs = f7.mul(f7.pow(lam, deg), h.eval(&f7, &x).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn jacobian_examples() {
        let f5 = f(5);
        let a3 = MultiPoly::var(&f5, 3, 0).unwrap();
        let pt = [f5.from_int(1), f5.from_int(2), f5.from_int(3)];
        assert_eq!(jacobian_eval(&f5, &[a3.clone()], &pt).unwrap().rank, 1);
        let f2 = f(2);
        let sq = poly(&f2, 3, &[(&[2, 0, 0], 1)]);
        let j = jacobian_eval(&f2, &[sq], &[f2.one(), f2.zero(), f2.zero()]).unwrap();
        assert_eq!(j.rank, 0);
        assert!(j.matrix[0].iter().all(|c| c.is_zero()));
        let l1 = poly(&f5, 3, &[(&[1, 0, 0], 1), (&[0, 1, 0], 2)]);
        let l2 = l1.scale(&f5, f5.from_int(3));
        assert_eq!(jacobian_eval(&f5, &[l1, l2], &pt).unwrap().rank, 1);
    }

    #[test]
    fn elementary_symmetric_examples() {
        let f7 = f(7);
        let p1 = elementary_symmetric(&f7, 3, 1).unwrap();
        assert_eq!(p1, poly(&f7, 3, &[(&[1, 0, 0], 1), (&[0, 1, 0], 1), (&[0, 0, 1], 1)]));
        let p2 = elementary_symmetric(&f7, 3, 2).unwrap();
        assert_eq!(p2, poly(&f7, 3, &[(&[1, 1, 0], 1), (&[1, 0, 1], 1), (&[0, 1, 1], 1)]));
        assert!(matches!(elementary_symmetric(&f7, 3, 4), Err(Error::ParameterRange(_))));
        // S = Y1^2 + Y2: both terms have weight 2
        let s = poly(&f7, 2, &[(&[2, 0], 1), (&[0, 1], 1)]);
        assert_eq!(s.highest_weight_component().unwrap(), s);
        let s2 = poly(&f7, 2, &[(&[2, 0], 1), (&[0, 1], 1), (&[1, 0], 4)]);
        assert_eq!(s2.highest_weight_component().unwrap(), s);
    }

    #[test]
    fn elementary_symmetric_is_permutation_invariant() {
        let f7 = f(7);
        let p2 = elementary_symmetric(&f7, 3, 2).unwrap();
        for a in f7.elements() {
            for b in f7.elements() {
                let c = f7.from_int(5);
                let v = p2.eval(&f7, &[a, b, c]).unwrap();
                for perm in [[b, a, c], [c, b, a], [a, c, b], [b, c, a]] {
                    assert_eq!(p2.eval(&f7, &perm).unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn weighted_compose_respects_weight_bound() {
        let f5 = f(5);
        let pis: Vec<_> = (1..=3).map(|k| elementary_symmetric(&f5, 4, k).unwrap()).collect();
        let s = poly(&f5, 3, &[(&[2, 0, 0], 1), (&[0, 1, 0], 3), (&[1, 0, 1], 1), (&[0, 0, 0], 2)]);
        let g = weighted_compose(&f5, &s, &pis).unwrap();
        assert!(g.total_degree().unwrap() <= s.max_weight().unwrap());
        // evaluation commutes with composition
        let pt = [f5.from_int(1), f5.from_int(2), f5.from_int(4), f5.from_int(3)];
        let ys: Vec<_> = pis.iter().map(|p| p.eval(&f5, &pt).unwrap()).collect();
        assert_eq!(g.eval(&f5, &pt).unwrap(), s.eval(&f5, &ys).unwrap());
    }

    #[test]
    fn partial_derivative_in_characteristic() {
        let f3 = f(3);
        let g = poly(&f3, 2, &[(&[3, 1], 1), (&[2, 0], 1)]);
        assert_eq!(g.partial(&f3, 0).unwrap(), poly(&f3, 2, &[(&[1, 0], 2)]));
        assert_eq!(g.partial(&f3, 1).unwrap(), poly(&f3, 2, &[(&[3, 0], 1)]));
    }

    #[test]
    fn relabel_moves_variables() {
        let f5 = f(5);
        let g = poly(&f5, 2, &[(&[1, 2], 3)]);
        let h = g.relabel(4, &[3, 1]).unwrap();
        assert_eq!(h, poly(&f5, 4, &[(&[0, 2, 0, 1], 3)]));
    }
}
