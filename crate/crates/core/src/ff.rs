//! Finite fields `F_q`, `q = p^s`, represented as `F_p[x]/(modulus)`.
//!
//! An element is stored as its enumeration index: the coordinate vector
//! `(c_0, ..., c_{s-1})` read as a base-`p` counter with `c_0` least
//! significant. The index order is the public enumeration order, so
//! `F_q` always enumerates as `0, 1, ..., q-1` under that encoding.

use std::fmt;

use crate::error::{Error, Result};

const MAX_S: usize = 32;

/// An element of some [`FieldSpec`]. Cheap to copy; carries a fingerprint
/// of its field so that mixing fields can be detected.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FqElem {
    idx: u32,
    tag: u32,
}

impl FqElem {
    /// Position of the element in the field's enumeration order.
    pub fn index(self) -> u64 {
        self.idx as u64
    }

    pub fn is_zero(self) -> bool {
        self.idx == 0
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.idx)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u64,
    s: usize,
    q: u64,
    /// Monic modulus, ascending coefficients, length `s + 1`. `[0, 1]` for prime fields.
    modulus: Vec<u64>,
    tag: u32,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.s == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{} mod {:?}", self.p, self.s, self.modulus)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut k = 3u64;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

fn fingerprint(p: u64, s: usize, modulus: &[u64]) -> u32 {
    // FNV-1a
    let mut h: u32 = 0x811c_9dc5;
    let mut feed = |w: u64| {
        for b in w.to_le_bytes() {
            h ^= b as u32;
            h = h.wrapping_mul(0x0100_0193);
        }
    };
    feed(p);
    feed(s as u64);
    for &c in modulus {
        feed(c);
    }
    h
}

// Dense polynomials over F_p as ascending coefficient vectors, used only to
// validate and search moduli.
mod fp_poly {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        super::pow_mod(a, p - 2, p)
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        trim(&mut a);
        let lb = *b.last().expect("nonzero divisor");
        let ilb = inv(lb, p);
        while a.len() >= b.len() && !a.is_empty() {
            let c = a[a.len() - 1] * ilb % p;
            let sh = a.len() - b.len();
            for (i, &bc) in b.iter().enumerate() {
                a[i + sh] = (a[i + sh] + p - c * bc % p) % p;
            }
            trim(&mut a);
        }
        a
    }

    pub fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut r = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + x * y) % p;
            }
        }
        rem(&r, m, p)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Ben-Or: a monic `f` of degree `s` is irreducible iff
    /// `gcd(x^{p^i} - x, f) = 1` for all `1 <= i <= s/2`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let s = f.len() - 1;
        if s <= 1 {
            return s == 1;
        }
        let x = rem(&[0, 1], f, p);
        let mut xp = x.clone();
        for _ in 1..=s / 2 {
            // xp <- xp^p mod f
            let mut acc = vec![1u64];
            let mut base = xp.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul_mod(&acc, &base, f, p);
                }
                base = mul_mod(&base, &base, f, p);
                e >>= 1;
            }
            xp = acc;
            let mut diff = xp.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            trim(&mut diff);
            if diff.is_empty() {
                return false;
            }
            if gcd(&diff, f, p).len() > 1 {
                return false;
            }
        }
        true
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

impl FieldSpec {
    /// Builds `F_{p^s}`. For `s > 1` the modulus is given as ascending
    /// coefficients `c_0, ..., c_s` with `c_s = 1`; when omitted, the first
    /// irreducible monic polynomial in counter order (`c_0` least
    /// significant) is used. The modulus is ignored for `s = 1`.
    pub fn new(p: u64, s: usize, modulus: Option<&[u64]>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::CompositeP(p));
        }
        if s == 0 {
            return Err(Error::DegreeMismatch("extension degree must be at least 1".into()));
        }
        let q = (p as u128).checked_pow(s as u32).filter(|&q| q <= u32::MAX as u128);
        let q = match q {
            Some(q) if s <= MAX_S => q as u64,
            _ => return Err(Error::FieldTooLarge { p, s }),
        };
        let modulus = if s == 1 {
            vec![0, 1]
        } else if let Some(m) = modulus {
            if m.len() != s + 1 {
                return Err(Error::DegreeMismatch(format!(
                    "modulus has {} coefficients, expected {}",
                    m.len(),
                    s + 1
                )));
            }
            let m: Vec<u64> = m.iter().map(|&c| c % p).collect();
            if m[s] != 1 {
                return Err(Error::DegreeMismatch("modulus must be monic".into()));
            }
            if !fp_poly::is_irreducible(&m, p) {
                return Err(Error::ReducibleModulus { p });
            }
            m
        } else {
            Self::first_irreducible(p, s)
        };
        let tag = fingerprint(p, s, &modulus);
        Ok(FieldSpec { p, s, q, modulus, tag })
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1, None)
    }

    fn first_irreducible(p: u64, s: usize) -> Vec<u64> {
        let count = p.pow(s as u32);
        for n in 0..count {
            let mut m = Vec::with_capacity(s + 1);
            let mut k = n;
            for _ in 0..s {
                m.push(k % p);
                k /= p;
            }
            m.push(1);
            if m[0] != 0 && fp_poly::is_irreducible(&m, p) {
                return m;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn contains(&self, a: FqElem) -> bool {
        a.tag == self.tag
    }

    pub fn check(&self, a: FqElem) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    #[inline]
    fn mk(&self, idx: u64) -> FqElem {
        FqElem { idx: idx as u32, tag: self.tag }
    }

    pub fn zero(&self) -> FqElem {
        self.mk(0)
    }

    pub fn one(&self) -> FqElem {
        self.mk(1)
    }

    /// Element with enumeration index `idx`.
    pub fn from_index(&self, idx: u64) -> Result<FqElem> {
        if idx >= self.q {
            return Err(Error::ParameterRange(format!("index {idx} >= q = {}", self.q)));
        }
        Ok(self.mk(idx))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FqElem {
        self.mk((n.rem_euclid(self.p as i64)) as u64)
    }

    pub fn from_coords(&self, coords: &[u64]) -> Result<FqElem> {
        if coords.len() > self.s {
            return Err(Error::DegreeMismatch(format!(
                "{} coordinates for extension degree {}",
                coords.len(),
                self.s
            )));
        }
        let mut buf = [0u64; MAX_S];
        for (b, &c) in buf.iter_mut().zip(coords) {
            *b = c % self.p;
        }
        Ok(self.mk(self.encode(&buf)))
    }

    pub fn coords(&self, a: FqElem) -> Vec<u64> {
        let mut buf = [0u64; MAX_S];
        self.decode(a.idx as u64, &mut buf);
        buf[..self.s].to_vec()
    }

    /// The class of `x` in `F_p[x]/(modulus)`; `None` for prime fields.
    pub fn generator(&self) -> Option<FqElem> {
        if self.s == 1 {
            None
        } else {
            Some(self.mk(self.p))
        }
    }

    /// All `q` elements in enumeration order.
    pub fn elements(&self) -> impl ExactSizeIterator<Item = FqElem> + '_ {
        (0..self.q as u32).map(move |i| self.mk(i as u64))
    }

    #[inline]
    fn decode(&self, mut idx: u64, out: &mut [u64; MAX_S]) {
        for c in out.iter_mut().take(self.s) {
            *c = idx % self.p;
            idx /= self.p;
        }
    }

    #[inline]
    fn encode(&self, c: &[u64; MAX_S]) -> u64 {
        c[..self.s].iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        debug_assert!(self.contains(a) && self.contains(b));
        if self.s == 1 {
            return self.mk((a.idx as u64 + b.idx as u64) % self.p);
        }
        let (mut x, mut y) = ([0u64; MAX_S], [0u64; MAX_S]);
        self.decode(a.idx as u64, &mut x);
        self.decode(b.idx as u64, &mut y);
        for i in 0..self.s {
            x[i] = (x[i] + y[i]) % self.p;
        }
        self.mk(self.encode(&x))
    }

    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        debug_assert!(self.contains(a));
        if self.s == 1 {
            return self.mk((self.p - a.idx as u64) % self.p);
        }
        let mut x = [0u64; MAX_S];
        self.decode(a.idx as u64, &mut x);
        for c in x.iter_mut().take(self.s) {
            *c = (self.p - *c) % self.p;
        }
        self.mk(self.encode(&x))
    }

    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        debug_assert!(self.contains(a) && self.contains(b));
        let p = self.p;
        if self.s == 1 {
            return self.mk(a.idx as u64 * b.idx as u64 % p);
        }
        let s = self.s;
        let (mut x, mut y) = ([0u64; MAX_S], [0u64; MAX_S]);
        self.decode(a.idx as u64, &mut x);
        self.decode(b.idx as u64, &mut y);
        let mut prod = [0u64; 2 * MAX_S];
        for i in 0..s {
            if x[i] == 0 {
                continue;
            }
            for j in 0..s {
                prod[i + j] = (prod[i + j] + x[i] * y[j]) % p;
            }
        }
        for k in (s..2 * s - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..s {
                prod[k - s + i] = (prod[k - s + i] + (p - c) * self.modulus[i]) % p;
            }
        }
        let mut out = [0u64; MAX_S];
        out[..s].copy_from_slice(&prod[..s]);
        self.mk(self.encode(&out))
    }

    /// Square-and-multiply.
    pub fn pow(&self, a: FqElem, mut e: u64) -> FqElem {
        let mut acc = self.one();
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem> {
        self.check(a)?;
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// Quotient `a / b`.
    pub fn div(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        self.check(a)?;
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn try_add(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add(a, b))
    }

    pub fn try_mul(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    pub fn try_neg(&self, a: FqElem) -> Result<FqElem> {
        self.check(a)?;
        Ok(self.neg(a))
    }

    pub fn try_pow(&self, a: FqElem, e: u64) -> Result<FqElem> {
        self.check(a)?;
        Ok(self.pow(a, e))
    }

    /// Multiplies by an integer through the prime subfield.
    pub fn mul_int(&self, a: FqElem, n: u64) -> FqElem {
        self.mul(a, self.from_int((n % self.p) as i64))
    }

    /// Renders an element: an integer in `[0, p)` for prime fields, a
    /// polynomial in `x` otherwise.
    pub fn format(&self, a: FqElem) -> String {
        if self.s == 1 {
            return a.idx.to_string();
        }
        let c = self.coords(a);
        let mut parts = Vec::new();
        for (i, &ci) in c.iter().enumerate().rev() {
            if ci == 0 {
                continue;
            }
            let mon = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            parts.push(match (ci, i) {
                (_, 0) => ci.to_string(),
                (1, _) => mon,
                _ => format!("{ci}*{mon}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// The degree-`k` extension `F_{q^k}` together with an embedding of
    /// `self` into it.
    pub fn extension(&self, k: usize) -> Result<(FieldSpec, Embedding)> {
        if k == 0 {
            return Err(Error::ParameterRange("extension degree must be >= 1".into()));
        }
        let big = FieldSpec::new(self.p, self.s * k, None)?;
        // image of x: a root in `big` of the base modulus
        let beta = if self.s == 1 {
            big.zero()
        } else {
            big.elements()
                .find(|&z| {
                    let mut acc = big.zero();
                    for &c in self.modulus.iter().rev() {
                        acc = big.add(big.mul(acc, z), big.from_int(c as i64));
                    }
                    acc.is_zero()
                })
                .expect("an irreducible of degree s splits in every extension of degree divisible by s")
        };
        let images = self
            .elements()
            .map(|a| {
                let mut acc = big.zero();
                for &c in self.coords(a).iter().rev() {
                    acc = big.add(big.mul(acc, beta), big.from_int(c as i64));
                }
                acc
            })
            .collect();
        let emb = Embedding { source_tag: self.tag, images };
        Ok((big, emb))
    }
}

/// Field embedding `F_q -> F_{q^k}` stored as an image table.
#[derive(Clone, Debug)]
pub struct Embedding {
    source_tag: u32,
    images: Vec<FqElem>,
}

impl Embedding {
    pub fn map(&self, a: FqElem) -> Result<FqElem> {
        if a.tag != self.source_tag {
            return Err(Error::FieldMismatch);
        }
        Ok(self.images[a.idx as usize])
    }
}
