//! Explicit constants and error bounds.
//!
//! Bounds of the form `(a sqrt(q) + b) q^e / den` with integer `a, b` are
//! kept symbolic in [`SqrtForm`] and compared against exact counts by
//! squaring, so those checks involve no rounding at all. Bounds with
//! transcendental factors are evaluated as [`LogMagnitude`] values whose
//! natural log is pushed up by `2^-30` after evaluation.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Upward slack added to the natural log of transcendental bounds.
pub const LOG_SLACK: f64 = 1.0 / (1u64 << 30) as f64;

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * big(k))
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Natural log of a positive integer, accurate to a few ulps.
fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("finite");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn biguint_to_f64(n: &BigUint) -> f64 {
    n.to_f64().unwrap_or(f64::INFINITY)
}

/// `p_r = q^r + q^{r-1} + ... + 1`, the number of points of projective
/// `r`-space.
pub fn p_r(q: u64, r: u32) -> BigUint {
    (0..=r).fold(BigUint::zero(), |acc, k| acc + big(q).pow(k))
}

/// `|V(F_q)| <= deg * q^dim` for an affine variety.
pub fn affine_point_bound(dim: u32, deg: u64, q: u64) -> BigUint {
    big(deg) * big(q).pow(dim)
}

/// `|V(F_q)| <= deg * p_dim` for a projective variety.
pub fn projective_point_bound(dim: u32, deg: u64, q: u64) -> BigUint {
    big(deg) * p_r(q, dim)
}

/// Degree bound for an intersection of hypersurfaces of the given degrees.
pub fn bezout_degree_bound(degs: &[u32]) -> BigUint {
    degs.iter().fold(BigUint::one(), |acc, &d| acc * big(d as u64))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundConstants {
    pub d: usize,
    pub m: usize,
    pub degrees: Vec<u32>,
    pub r: usize,
    pub delta_v: BigUint,
    pub big_d_v: BigUint,
    pub delta_delta: BigUint,
    pub big_d_delta: BigUint,
    pub delta_r: BigUint,
    pub big_d_r: BigUint,
}

/// `delta_V, D_V` of the family and `delta, D` of the divided-difference
/// system for a given `r`.
pub fn constants(d: usize, degs: &[u32], r: usize) -> Result<BoundConstants> {
    if degs.is_empty() {
        return Err(Error::ParameterRange("degree list is empty".into()));
    }
    if degs.contains(&0) {
        return Err(Error::ParameterRange("constraint degrees must be >= 1".into()));
    }
    if r == 0 || r > d {
        return Err(Error::ParameterRange(format!("need 1 <= r <= d = {d}, got r = {r}")));
    }
    let delta_v = bezout_degree_bound(degs);
    let big_d_v = degs.iter().fold(BigUint::zero(), |acc, &x| acc + big(x as u64 - 1));
    let delta_delta = factorial(d as u64) / factorial((d - r) as u64);
    let big_d_delta = big((r * d - r * (r + 1) / 2) as u64);
    Ok(BoundConstants {
        d,
        m: degs.len(),
        degrees: degs.to_vec(),
        r,
        delta_r: &delta_v * &delta_delta,
        big_d_r: &big_d_v + &big_d_delta,
        delta_v,
        big_d_v,
        delta_delta,
        big_d_delta,
    })
}

/// `delta (D - 2) + 2`, which may be negative in principle.
fn affine_coeff(delta: &BigUint, dd: &BigUint) -> BigInt {
    BigInt::from(delta.clone()) * (BigInt::from(dd.clone()) - 2) + 2
}

/// A nonnegative real stored as sign and natural log.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogMagnitude {
    /// -1, 0 or 1.
    pub sign: i8,
    /// `ln |value|`; meaningless when `sign == 0`.
    pub ln: f64,
}

impl LogMagnitude {
    pub fn zero() -> Self {
        LogMagnitude { sign: 0, ln: f64::NEG_INFINITY }
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        match n.sign() {
            Sign::NoSign => Self::zero(),
            s => LogMagnitude { sign: if s == Sign::Minus { -1 } else { 1 }, ln: ln_biguint(n.magnitude()) },
        }
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        Self::from_bigint(&BigInt::from(n.clone()))
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::zero()
        } else {
            LogMagnitude { sign: if x < 0.0 { -1 } else { 1 }, ln: x.abs().ln() }
        }
    }

    /// `e^x`.
    pub fn exp(x: f64) -> Self {
        LogMagnitude { sign: 1, ln: x }
    }

    pub fn mul(self, other: Self) -> Self {
        if self.sign == 0 || other.sign == 0 {
            return Self::zero();
        }
        LogMagnitude { sign: self.sign * other.sign, ln: self.ln + other.ln }
    }

    pub fn add(self, other: Self) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (hi, lo) = if self.ln >= other.ln { (self, other) } else { (other, self) };
        let t = (lo.ln - hi.ln).exp();
        if hi.sign == lo.sign {
            LogMagnitude { sign: hi.sign, ln: hi.ln + t.ln_1p() }
        } else if t >= 1.0 {
            Self::zero()
        } else {
            LogMagnitude { sign: hi.sign, ln: hi.ln + (-t).ln_1p() }
        }
    }

    /// Pushes the magnitude of a positive value up by the slack factor.
    pub fn rounded_up(self) -> Self {
        match self.sign {
            1 => LogMagnitude { sign: 1, ln: self.ln + LOG_SLACK },
            -1 => LogMagnitude { sign: -1, ln: self.ln - LOG_SLACK },
            _ => self,
        }
    }

    pub fn log10(self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }

    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => s as f64 * self.ln.exp(),
        }
    }

    /// Whether `n <= self`; `n` is exact.
    pub fn admits(self, n: &BigUint) -> bool {
        if n.is_zero() {
            return self.sign >= 0;
        }
        self.sign > 0 && ln_biguint(n) <= self.ln
    }

    /// Whether the nonnegative rational `x <= self`.
    pub fn admits_rational(self, x: &BigRational) -> bool {
        if x.is_zero() {
            return self.sign >= 0;
        }
        self.sign > 0 && ln_biguint(x.numer().magnitude()) - ln_biguint(x.denom().magnitude()) <= self.ln
    }
}

/// `(a sqrt(q) + b) q^e / den` with integer `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtForm {
    pub q: u64,
    pub a: BigInt,
    pub b: BigInt,
    pub e: u32,
    pub den: BigUint,
}

impl SqrtForm {
    pub fn value(&self) -> LogMagnitude {
        let sq = LogMagnitude { sign: 1, ln: 0.5 * (self.q as f64).ln() };
        let qe = LogMagnitude { sign: 1, ln: self.e as f64 * (self.q as f64).ln() };
        let inner = LogMagnitude::from_bigint(&self.a).mul(sq).add(LogMagnitude::from_bigint(&self.b));
        let v = inner.mul(qe);
        LogMagnitude { sign: v.sign, ln: v.ln - ln_biguint(&self.den) }.rounded_up()
    }

    pub fn to_f64(&self) -> f64 {
        let q = self.q as f64;
        let a = self.a.to_f64().unwrap_or(f64::INFINITY);
        let b = self.b.to_f64().unwrap_or(f64::INFINITY);
        (a * q.sqrt() + b) * q.powi(self.e as i32) / biguint_to_f64(&self.den)
    }

    /// Whether `num / den <= self`, decided exactly.
    pub fn admits_ratio(&self, num: &BigUint, den: &BigUint) -> bool {
        let qe = BigInt::from(big(self.q).pow(self.e));
        // num * self.den <= den * (a sqrt(q) + b) q^e
        let lhs = BigInt::from(num * &self.den) - BigInt::from(den.clone()) * &self.b * &qe;
        let c = BigInt::from(den.clone()) * &self.a * &qe;
        let q = BigInt::from(self.q);
        match (c.is_negative(), lhs.is_positive()) {
            (false, false) => true,
            (false, true) => &lhs * &lhs <= &c * &c * q,
            (true, true) => false,
            (true, false) => &lhs * &lhs >= &c * &c * q,
        }
    }

    /// Whether `n <= self`, decided exactly.
    pub fn admits(&self, n: &BigUint) -> bool {
        self.admits_ratio(n, &BigUint::one())
    }
}

fn check_dm(d: usize, m: usize) -> Result<()> {
    if d < m + 2 {
        return Err(Error::ParameterRange(format!("d >= m + 2 required (d = {d}, m = {m})")));
    }
    Ok(())
}

fn family_constants(degs: &[u32]) -> Result<(BigUint, BigUint)> {
    if degs.is_empty() || degs.contains(&0) {
        return Err(Error::ParameterRange("degrees must be a nonempty list of positive integers".into()));
    }
    let delta = bezout_degree_bound(degs);
    let dd = degs.iter().fold(BigUint::zero(), |acc, &x| acc + big(x as u64 - 1));
    Ok((delta, dd))
}

/// `(delta (D - 2) + 2) q^{l - 1/2} + 14 D^2 delta^2 q^{l-1}` for a normal
/// complete intersection of dimension `l` and the given multidegree.
pub fn normal_ci_form(l: u32, degs: &[u32], q: u64) -> Result<SqrtForm> {
    if l < 2 {
        return Err(Error::ParameterRange(format!("need l >= 2, got {l}")));
    }
    let (delta, dd) = family_constants(degs)?;
    let b = BigInt::from(14u8) * BigInt::from(&dd * &dd * &delta * &delta);
    Ok(SqrtForm { q, a: affine_coeff(&delta, &dd), b, e: l - 1, den: BigUint::one() })
}

pub fn normal_ci_bound(l: u32, degs: &[u32], q: u64) -> Result<LogMagnitude> {
    Ok(normal_ci_form(l, degs, q)?.value())
}

/// Bracket on the normalized family size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CardABracket {
    /// `q^{d-m-1} / 2`, exclusive.
    pub lower: BigRational,
    /// `q^{d-m-1} + 2(delta (D - 2) + 2 + 14 D^2 delta^2 q^{-1/2}) q^{d-m-3/2}`.
    pub upper: SqrtForm,
    /// `q > 16 (D delta + 14 D^2 delta^2 q^{-1/2})^2`, decided exactly.
    pub threshold_ok: bool,
}

impl CardABracket {
    pub fn contains(&self, n: u128) -> bool {
        let n = BigUint::from(n);
        BigRational::from_integer(BigInt::from(n.clone())) > self.lower && self.upper.admits(&n)
    }
}

pub fn card_a_bracket(d: usize, m: usize, degs: &[u32], q: u64) -> Result<CardABracket> {
    check_dm(d, m)?;
    let (delta, dd) = family_constants(degs)?;
    let e = (d - m - 1) as u32;
    let qb = big(q);
    let lower = BigRational::new(BigInt::from(qb.pow(e)), BigInt::from(2));
    // (2 c sqrt(q) + q + 28 D^2 delta^2) q^{e-1}
    let dd2 = &dd * &dd * &delta * &delta;
    let upper = SqrtForm {
        q,
        a: affine_coeff(&delta, &dd) * 2,
        b: BigInt::from(&qb + BigUint::from(28u8) * &dd2),
        e: e - 1,
        den: BigUint::one(),
    };
    // sqrt(q) > 4 (D delta + 14 D^2 delta^2 / sqrt(q))  <=>
    // q - 56 D^2 delta^2 > 4 D delta sqrt(q)
    let x = &dd * &delta;
    let lhs = BigInt::from(qb.clone()) - BigInt::from(BigUint::from(56u8) * &dd2);
    let threshold_ok = lhs.is_positive() && &lhs * &lhs > BigInt::from(BigUint::from(16u8) * &x * &x * &qb);
    Ok(CardABracket { lower, upper, threshold_ok })
}

/// `|S_r - q^{d-m}/r!| <=` this form, whose `q^{d-m-1}` multiplier is
/// `((delta_r (D_r - 2) + 2) sqrt(q) + 14 D_r^2 delta_r^2 + C(r,2) delta_r + 4 r delta_V) / r!`.
pub fn s_r_form(d: usize, m: usize, degs: &[u32], r: usize, q: u64) -> Result<SqrtForm> {
    check_dm(d, m)?;
    if degs.len() != m {
        return Err(Error::ArityMismatch { expected: m, found: degs.len() });
    }
    let c = constants(d, degs, r)?;
    let dr2 = &c.big_d_r * &c.big_d_r * &c.delta_r * &c.delta_r;
    let b = BigUint::from(14u8) * dr2 + binomial(r as u64, 2) * &c.delta_r + big(4 * r as u64) * &c.delta_v;
    Ok(SqrtForm {
        q,
        a: affine_coeff(&c.delta_r, &c.big_d_r),
        b: BigInt::from(b),
        e: (d - m - 1) as u32,
        den: factorial(r as u64),
    })
}

pub fn s_r_bound(d: usize, m: usize, degs: &[u32], r: usize, q: u64) -> Result<LogMagnitude> {
    Ok(s_r_form(d, m, degs, r, q)?.value())
}

/// `(delta_r (D_r - 2) + 2) q^{d-m-1/2} + (14 D_r^2 delta_r^2 + 4 r delta_V) q^{d-m-1}`.
pub fn gamma_star_bound(d: usize, m: usize, degs: &[u32], r: usize, q: u64) -> Result<SqrtForm> {
    check_dm(d, m)?;
    let c = constants(d, degs, r)?;
    let dr2 = &c.big_d_r * &c.big_d_r * &c.delta_r * &c.delta_r;
    let b = BigUint::from(14u8) * dr2 + big(4 * r as u64) * &c.delta_v;
    Ok(SqrtForm {
        q,
        a: affine_coeff(&c.delta_r, &c.big_d_r),
        b: BigInt::from(b),
        e: (d - m - 1) as u32,
        den: BigUint::one(),
    })
}

/// `c1 sqrt(q) + c2 d^{d+5} e^{2 sqrt(d) - d}`.
fn main_shape(c1: &BigUint, c2: &BigUint, d: usize, q: u64) -> LogMagnitude {
    let df = d as f64;
    let t1 = LogMagnitude::from_biguint(c1).mul(LogMagnitude { sign: 1, ln: 0.5 * (q as f64).ln() });
    let poly = LogMagnitude::from_biguint(&(c2 * big(d as u64).pow(d as u32 + 5)));
    let t2 = poly.mul(LogMagnitude::exp(2.0 * df.sqrt() - df));
    t1.add(t2).rounded_up()
}

/// `2^d delta_V (3 D_V + d^2) q^{1/2} + 67 delta_V^2 (D_V + 2)^2 d^{d+5} e^{2 sqrt(d) - d}`.
pub fn main_bound(d: usize, m: usize, degs: &[u32], q: u64) -> Result<LogMagnitude> {
    check_dm(d, m)?;
    if degs.len() != m {
        return Err(Error::ArityMismatch { expected: m, found: degs.len() });
    }
    let (delta, dd) = family_constants(degs)?;
    let c1 = big(2).pow(d as u32) * &delta * (big(3) * &dd + big((d * d) as u64));
    let dd2 = &dd + big(2);
    let c2 = big(67) * &delta * &delta * &dd2 * &dd2;
    Ok(main_shape(&c1, &c2, d, q))
}

/// `2^d d^2 q^{1/2} + 268 d^{d+5} e^{2 sqrt(d) - d}`.
pub fn linear_bound(d: usize, q: u64) -> Result<LogMagnitude> {
    if d < 3 {
        return Err(Error::ParameterRange(format!("d >= 3 required, got {d}")));
    }
    let c1 = big(2).pow(d as u32) * big((d * d) as u64);
    Ok(main_shape(&c1, &big(268), d, q))
}

/// The main bound with `delta_N`, `D_N` taken from the symmetric
/// constraints' degrees.
pub fn symmetric_bound(d: usize, m: usize, degs: &[u32], q: u64) -> Result<LogMagnitude> {
    main_bound(d, m, degs, q)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HkAnalysis {
    pub d: usize,
    /// `h(k) = C(d, k)^2 (d - k)!` for `k = 0..d`.
    pub values: Vec<BigUint>,
    /// `floor(-1/2 + sqrt(5 + 4d)/2)`.
    pub k0_floor: usize,
    /// Largest index attaining the maximum.
    pub peak: usize,
    /// Strictly increasing over `0..d`.
    pub increasing: bool,
    /// Nondecreasing up to `k0_floor`, strictly decreasing after it.
    pub unimodal: bool,
    pub peak_at_k0: bool,
    pub sum: BigUint,
    /// `d * h(k0_floor)`, which equals `C(d)`.
    pub sum_bound: BigUint,
    pub sum_ok: bool,
    /// `(5/2) e^{109/30} d^{d+1} e^{2 sqrt(d)} / (sqrt(2 pi) e^d)`.
    pub c_bound: LogMagnitude,
    pub c_bound_ok: bool,
}

pub fn hk_analysis(d: usize) -> Result<HkAnalysis> {
    if d < 2 {
        return Err(Error::ParameterRange(format!("need d >= 2, got {d}")));
    }
    let du = d as u64;
    let values: Vec<BigUint> = (0..du).map(|k| {
        let c = binomial(du, k);
        &c * &c * factorial(du - k)
    }).collect();
    // largest k with (2k + 1)^2 <= 5 + 4d
    let s = (5 + 4 * du).sqrt();
    let k0_floor = ((s - 1) / 2) as usize;
    let max = values.iter().max().expect("d >= 2").clone();
    let peak = values.iter().rposition(|v| *v == max).expect("max present");
    let increasing = values.windows(2).all(|w| w[0] < w[1]);
    let k = k0_floor.min(d - 1);
    let unimodal = values[..=k].windows(2).all(|w| w[0] <= w[1]) && values[k..].windows(2).all(|w| w[0] > w[1]);
    let peak_at_k0 = values[k] == max;
    let sum = values.iter().fold(BigUint::zero(), |acc, v| acc + v);
    let sum_bound = big(du) * &values[k];
    let sum_ok = sum <= sum_bound;
    let df = d as f64;
    let ln_c = (2.5f64).ln() + 109.0 / 30.0 + (df + 1.0) * df.ln() + 2.0 * df.sqrt()
        - 0.5 * (2.0 * std::f64::consts::PI).ln()
        - df;
    let c_bound = LogMagnitude { sign: 1, ln: ln_c }.rounded_up();
    let c_bound_ok = c_bound.admits(&sum_bound);
    Ok(HkAnalysis { d, values, k0_floor, peak, increasing, unimodal, peak_at_k0, sum, sum_bound, sum_ok, c_bound, c_bound_ok })
}
