//! Dense univariate polynomials over `F_q`.
//!
//! Coefficients are stored in ascending degree order; the zero polynomial is
//! the empty vector and the last stored coefficient is always nonzero.

use crate::error::{Error, Result};
use crate::ff::{FieldSpec, FqElem};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<FqElem>,
}

impl UniPoly {
    pub fn new(field: &FieldSpec, coeffs: Vec<FqElem>) -> Result<Self> {
        for &c in &coeffs {
            field.check(c)?;
        }
        Ok(Self::from_vec(coeffs))
    }

    pub(crate) fn from_vec(mut coeffs: Vec<FqElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    /// Polynomial with integer coefficients reduced into the prime subfield.
    pub fn from_ints(field: &FieldSpec, coeffs: &[i64]) -> Self {
        Self::from_vec(coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: FqElem) -> Self {
        Self::from_vec(vec![c])
    }

    /// `c * T^k`
    pub fn monomial(field: &FieldSpec, c: FqElem, k: usize) -> Self {
        let mut v = vec![field.zero(); k + 1];
        v[k] = c;
        Self::from_vec(v)
    }

    /// `prod (T - r)` over the given roots, with multiplicity.
    pub fn from_roots(field: &FieldSpec, roots: &[FqElem]) -> Self {
        let mut acc = UniPoly::constant(field.one());
        for &r in roots {
            let lin = UniPoly::from_vec(vec![field.neg(r), field.one()]);
            acc = acc.mul(field, &lin);
        }
        acc
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    /// Coefficient of `T^k` (zero past the degree).
    pub fn coeff(&self, field: &FieldSpec, k: usize) -> FqElem {
        self.coeffs.get(k).copied().unwrap_or_else(|| field.zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<FqElem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self, field: &FieldSpec) -> bool {
        self.leading() == Some(field.one())
    }

    /// Horner evaluation.
    pub fn eval(&self, field: &FieldSpec, x: FqElem) -> Result<FqElem> {
        field.check(x)?;
        Ok(self.eval_unchecked(field, x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, field: &FieldSpec, x: FqElem) -> FqElem {
        self.coeffs
            .iter()
            .rev()
            .fold(field.zero(), |acc, &c| field.add(field.mul(acc, x), c))
    }

    pub fn add(&self, field: &FieldSpec, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|k| field.add(self.coeff(field, k), other.coeff(field, k)))
            .collect();
        UniPoly::from_vec(v)
    }

    pub fn neg(&self, field: &FieldSpec) -> UniPoly {
        UniPoly::from_vec(self.coeffs.iter().map(|&c| field.neg(c)).collect())
    }

    pub fn sub(&self, field: &FieldSpec, other: &UniPoly) -> UniPoly {
        self.add(field, &other.neg(field))
    }

    pub fn scale(&self, field: &FieldSpec, c: FqElem) -> UniPoly {
        UniPoly::from_vec(self.coeffs.iter().map(|&x| field.mul(x, c)).collect())
    }

    pub fn mul(&self, field: &FieldSpec, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut v = vec![field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] = field.add(v[i + j], field.mul(a, b));
            }
        }
        UniPoly::from_vec(v)
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, field: &FieldSpec, divisor: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        let ld = divisor.leading().ok_or(Error::ZeroPolynomial)?;
        let inv = field.inv(ld)?;
        let dd = divisor.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((UniPoly::zero(), self.clone()));
        }
        let mut q = vec![field.zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = field.mul(r[k], inv);
            if c.is_zero() {
                continue;
            }
            q[k - dd] = c;
            for (i, &dc) in divisor.coeffs.iter().enumerate() {
                let idx = k - dd + i;
                r[idx] = field.sub(r[idx], field.mul(c, dc));
            }
        }
        r.truncate(dd);
        Ok((UniPoly::from_vec(q), UniPoly::from_vec(r)))
    }

    pub fn rem(&self, field: &FieldSpec, divisor: &UniPoly) -> Result<UniPoly> {
        Ok(self.div_rem(field, divisor)?.1)
    }

    /// Scales to leading coefficient one; the zero polynomial is returned as is.
    pub fn monic(&self, field: &FieldSpec) -> UniPoly {
        match self.leading() {
            None => UniPoly::zero(),
            Some(lc) => self.scale(field, field.inv(lc).expect("leading coefficient is nonzero")),
        }
    }

    /// Formal derivative; coefficients `j * a_j` are reduced mod `p`.
    pub fn derivative(&self, field: &FieldSpec) -> UniPoly {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| field.mul_int(c, j as u64))
            .collect();
        UniPoly::from_vec(v)
    }
}

/// Distinct roots of `f` in `F_q`, in enumeration order, found by evaluating
/// at every field element.
pub fn roots_in_field(field: &FieldSpec, f: &UniPoly) -> Result<Vec<FqElem>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(field.elements().filter(|&x| f.eval_unchecked(field, x).is_zero()).collect())
}

/// Monic gcd by the Euclidean algorithm.
pub fn gcd(field: &FieldSpec, f: &UniPoly, g: &UniPoly) -> Result<UniPoly> {
    if f.is_zero() && g.is_zero() {
        return Err(Error::BothZero);
    }
    let (mut a, mut b) = (f.clone(), g.clone());
    while !b.is_zero() {
        let r = a.rem(field, &b)?;
        a = b;
        b = r;
    }
    Ok(a.monic(field))
}

fn sign_epsilon(i: usize) -> bool {
    // (-1)^{i(i-1)/2} is negative iff i mod 4 is 2 or 3
    matches!(i % 4, 2 | 3)
}

/// Signed subresultant sequence of `p`, `q` with `deg q < deg p`: returns
/// the signed principal coefficients `sRes_j` for `j = 0..=deg p`.
/// Defective steps (degree drops larger than one) go through the gap
/// formulas so no pseudo-remainder ever leaves the field.
fn signed_subresultant_coeffs(field: &FieldSpec, p: &UniPoly, q: &UniPoly) -> Vec<FqElem> {
    let pd = p.degree().expect("nonzero");
    let zero = field.zero();
    let mut s = vec![zero; pd + 1];
    let mut t = vec![zero; pd + 1];
    let mut srp: Vec<UniPoly> = vec![UniPoly::zero(); pd + 1];
    srp[pd] = p.clone();
    srp[pd - 1] = q.clone();
    s[pd] = field.one();
    t[pd] = field.one();
    t[pd - 1] = q.leading().unwrap_or(zero);

    let mut i = pd + 1;
    let mut j = pd;
    while !srp[j - 1].is_zero() {
        let k = srp[j - 1].degree().expect("nonzero");
        let denom = field.inv(field.mul(s[j], t[i - 1])).expect("regular subresultant coefficients are nonzero");
        if k == j - 1 {
            s[j - 1] = t[j - 1];
            if k >= 1 {
                let num = srp[i - 1].scale(field, field.mul(s[j - 1], s[j - 1]));
                let r = num.rem(field, &srp[j - 1]).expect("nonzero divisor");
                srp[k - 1] = r.scale(field, field.neg(denom));
            }
        } else {
            s[j - 1] = zero;
            let sj_inv = field.inv(s[j]).expect("nonzero");
            for delta in 1..(j - k) {
                let mut v = field.mul(field.mul(t[j - 1], t[j - delta]), sj_inv);
                if delta % 2 == 1 {
                    v = field.neg(v);
                }
                t[j - delta - 1] = v;
            }
            s[k] = t[k];
            let tj_inv = field.inv(t[j - 1]).expect("nonzero");
            srp[k] = srp[j - 1].scale(field, field.mul(s[k], tj_inv));
            for l in (k + 1)..=(j - 2) {
                srp[l] = UniPoly::zero();
                s[l] = zero;
            }
            if k >= 1 {
                let num = srp[i - 1].scale(field, field.mul(t[j - 1], s[k]));
                let r = num.rem(field, &srp[j - 1]).expect("nonzero divisor");
                srp[k - 1] = r.scale(field, field.neg(denom));
            }
        }
        if k == 0 {
            return s;
        }
        t[k - 1] = srp[k - 1].leading().unwrap_or(zero);
        i = j;
        j = k;
    }
    // the sequence stopped at a zero subresultant: all lower coefficients vanish
    for c in s.iter_mut().take(j) {
        *c = zero;
    }
    s
}

/// Principal subresultant coefficients `sres_j(f, g)` for `j = 0..=deg g`,
/// with `deg f > deg g >= 0`, in the ordinary determinant convention
/// (`sres_0 = Res(f, g)`, `sres_j` the determinant of the Sylvester
/// submatrix for index `j`).
pub fn principal_subresultants(field: &FieldSpec, f: &UniPoly, g: &UniPoly) -> Result<Vec<FqElem>> {
    let n = f.degree().ok_or(Error::ZeroPolynomial)?;
    let m = g.degree().ok_or(Error::ZeroPolynomial)?;
    if m >= n {
        return Err(Error::DegreeMismatch(format!("need deg f > deg g, got {n} and {m}")));
    }
    let signed = signed_subresultant_coeffs(field, f, g);
    Ok((0..=m)
        .map(|j| if sign_epsilon(n - j) { field.neg(signed[j]) } else { signed[j] })
        .collect())
}

/// `Res(f, g)`, equal to the Sylvester determinant and to
/// `lc(f)^{deg g} prod g(alpha)` over the roots of `f` in the closure.
/// Both inputs must be nonzero.
pub fn resultant(field: &FieldSpec, f: &UniPoly, g: &UniPoly) -> Result<FqElem> {
    let n = f.degree().ok_or(Error::ZeroPolynomial)?;
    let m = g.degree().ok_or(Error::ZeroPolynomial)?;
    let swap_sign = |x: FqElem| if (n * m) % 2 == 1 { field.neg(x) } else { x };
    if m == 0 {
        return Ok(field.pow(g.coeffs[0], n as u64));
    }
    if n == 0 {
        return Ok(field.pow(f.coeffs[0], m as u64));
    }
    if n > m {
        return Ok(principal_subresultants(field, f, g)?[0]);
    }
    if n < m {
        return Ok(swap_sign(resultant(field, g, f)?));
    }
    // equal degrees: Res(g, f) = lc(g)^{deg f - deg r} Res(g, r), r = f mod g
    let r = f.rem(field, g)?;
    if r.is_zero() {
        return Ok(field.zero());
    }
    let dr = r.degree().expect("nonzero");
    let lc = g.leading().expect("nonzero");
    let res_gf = field.mul(field.pow(lc, (n - dr) as u64), resultant(field, g, &r)?);
    Ok(swap_sign(res_gf))
}

/// True when the formal derivative vanishes identically (every exponent
/// with a nonzero coefficient is divisible by `p`).
pub fn is_wild(field: &FieldSpec, f: &UniPoly) -> bool {
    f.derivative(field).is_zero()
}

/// `Disc(f) := Res(f, f')`, with no sign or leading-coefficient
/// normalization. When `f' = 0` the value is `Res(f, 0) = 0`; use
/// [`is_wild`] to tell that case apart.
pub fn discriminant(field: &FieldSpec, f: &UniPoly) -> Result<FqElem> {
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    if d < 2 {
        return Err(Error::DegreeTooLow { needed: 2, found: d });
    }
    let df = f.derivative(field);
    if df.is_zero() {
        return Ok(field.zero());
    }
    resultant(field, f, &df)
}

/// First principal subresultant coefficient `sres_1(f, f')`.
///
/// With `f'` read at formal degree `d - 1`, a derivative of actual degree
/// zero gives `sres_1 = 0`; a vanishing derivative gives zero as well.
pub fn subdiscriminant_first(field: &FieldSpec, f: &UniPoly) -> Result<FqElem> {
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    if d < 2 {
        return Err(Error::DegreeTooLow { needed: 2, found: d });
    }
    let df = f.derivative(field);
    match df.degree() {
        None | Some(0) => Ok(field.zero()),
        Some(_) => Ok(principal_subresultants(field, f, &df)?[1]),
    }
}

/// `h_k(x_1, ..., x_{i+1})` for `k = 0..out.len()` from the values over
/// `x_1, ..., x_i` (in `prev`), using `h_k(.., x) = h_k(..) + x h_{k-1}(.., x)`.
#[inline]
pub fn extend_complete_homogeneous(field: &FieldSpec, prev: &[FqElem], x: FqElem, out: &mut [FqElem]) {
    let mut last = field.zero();
    for (k, o) in out.iter_mut().enumerate() {
        let base = prev.get(k).copied().unwrap_or_else(|| field.zero());
        let v = if k == 0 { base } else { field.add(base, field.mul(x, last)) };
        *o = v;
        last = v;
    }
}

/// Complete homogeneous symmetric polynomials `h_0..=h_kmax` at `points`.
pub fn complete_homogeneous(field: &FieldSpec, points: &[FqElem], kmax: usize) -> Vec<FqElem> {
    // h over the empty set: h_0 = 1, h_k = 0 for k > 0
    let mut cur = vec![field.zero(); kmax + 1];
    cur[0] = field.one();
    let mut next = cur.clone();
    for &x in points {
        extend_complete_homogeneous(field, &cur, x, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// `F(a_0, T) = T^d + a_{d-1} T^{d-1} + ... + a_0` for a fixed coefficient
/// vector; `a` is stored in the order `(a_{d-1}, ..., a_1, a_0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonicFamilyPoly {
    a: Vec<FqElem>,
}

impl MonicFamilyPoly {
    pub fn new(field: &FieldSpec, a: Vec<FqElem>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::DegreeTooLow { needed: 1, found: 0 });
        }
        for &c in &a {
            field.check(c)?;
        }
        Ok(MonicFamilyPoly { a })
    }

    /// From a family member `(a_{d-1}, ..., a_1)` and a constant term.
    pub fn from_member(member: &[FqElem], a0: FqElem) -> Self {
        let mut a = Vec::with_capacity(member.len() + 1);
        a.extend_from_slice(member);
        a.push(a0);
        MonicFamilyPoly { a }
    }

    pub fn degree(&self) -> usize {
        self.a.len()
    }

    /// `a_j` for `0 <= j <= d`, with `a_d = 1`.
    pub fn coeff(&self, field: &FieldSpec, j: usize) -> FqElem {
        let d = self.degree();
        if j == d {
            field.one()
        } else {
            self.a[d - 1 - j]
        }
    }

    pub fn to_unipoly(&self, field: &FieldSpec) -> UniPoly {
        let d = self.degree();
        UniPoly::from_vec((0..=d).map(|j| self.coeff(field, j)).collect())
    }

    /// `Delta^{i-1} F(a_0, x_1, ..., x_i)` via
    /// `Delta^{i-1}(T^j) = h_{j-i+1}(x_1, ..., x_i)`. Nodes may coincide.
    pub fn divided_difference(&self, field: &FieldSpec, points: &[FqElem]) -> Result<FqElem> {
        if points.is_empty() {
            return Err(Error::EmptyPoints);
        }
        for &x in points {
            field.check(x)?;
        }
        let d = self.degree();
        let i = points.len();
        if i > d + 1 {
            return Ok(field.zero());
        }
        let h = complete_homogeneous(field, points, d + 1 - i);
        Ok(self.divided_difference_from_h(field, i, &h))
    }

    /// `sum_{j >= i-1} a_j h_{j-i+1}` given `h_0..=h_{d-i+1}` at `i` nodes.
    #[inline]
    pub(crate) fn divided_difference_from_h(&self, field: &FieldSpec, i: usize, h: &[FqElem]) -> FqElem {
        let d = self.degree();
        let mut acc = h[d + 1 - i];
        for j in (i - 1)..d {
            acc = field.add(acc, field.mul(self.a[d - 1 - j], h[j + 1 - i]));
        }
        acc
    }

    /// Whether `prod (T - alpha_i)` divides `F(a_0, T)`, multiplicities included.
    pub fn hermite_divides(&self, field: &FieldSpec, points: &[FqElem]) -> Result<bool> {
        for &x in points {
            field.check(x)?;
        }
        if points.len() > self.degree() {
            return Ok(false);
        }
        let div = UniPoly::from_roots(field, points);
        Ok(self.to_unipoly(field).rem(field, &div)?.is_zero())
    }
}
