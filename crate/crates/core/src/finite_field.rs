//! Finite fields `F_{p^k}` with integer-encoded elements.
//!
//! An element is stored as its encoding in `[0, q)`: the base-`p` digits of
//! the encoding are the coefficients of the polynomial-basis representation,
//! least significant digit first (that digit is the constant term).
//! Multiplication goes through discrete log/antilog tables built once per
//! field, so a [`FiniteField`] is meant to be constructed once and shared;
//! cloning it is an `Arc` bump.
//!
//! When no modulus is supplied, [`default_modulus`] picks one. The table it
//! consults is part of the public contract, so encodings stay stable:
//!
//! | field  | modulus (highest degree first) |
//! |--------|--------------------------------|
//! | `2^2`  | `x^2 + x + 1`                  |
//! | `2^3`  | `x^3 + x + 1`                  |
//! | `2^4`  | `x^4 + x + 1`                  |
//! | `2^5`  | `x^5 + x^2 + 1`                |
//! | `3^2`  | `x^2 + 2x + 2`                 |
//! | `3^3`  | `x^3 + 2x + 1`                 |
//! | `5^2`  | `x^2 + 4x + 2`                 |
//! | `5^3`  | `x^3 + 3x + 3`                 |
//! | `7^2`  | `x^2 + 6x + 3`                 |
//!
//! Prime fields use `x`. Any other `(p, k)` falls back to the first monic
//! irreducible polynomial of degree `k` when the lower coefficients are read
//! as a base-`p` integer (constant term least significant) and counted up
//! from zero.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    CompositeCharacteristic(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} exceeds the supported maximum of 2^20")]
    OrderTooLarge { p: u32, k: u32 },
    #[error("modulus must be monic of degree {k} with {} coefficients below {p}", k + 1)]
    MalformedModulus { p: u32, k: u32 },
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u32 },
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("division by zero")]
    DivisionByZero,
    #[error("subfield degree {t} does not divide the extension degree {k}")]
    NonDivisorDegree { t: u32, k: u32 },
    #[error("encoding {value} is out of range for a field of order {q}")]
    EncodingOutOfRange { value: u64, q: u32 },
    #[error("invalid field spec `{0}`, expected `p^k`")]
    BadSpec(String),
}

/// A field element in canonical integer encoding.
///
/// `Elem` does not know its field; arithmetic goes through the owning
/// [`FiniteField`]. Use [`FieldElement`] where operands must be checked.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    /// Wraps a raw encoding without range checking.
    #[inline]
    pub const fn from_raw(encoding: u32) -> Self {
        Elem(encoding)
    }

    #[inline]
    pub const fn encoding(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `p^k` as written on the command line.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FieldSpec {
    pub p: u32,
    pub k: u32,
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FieldError::BadSpec(s.to_string());
        let t = s.trim();
        let (p, k) = match t.split_once('^') {
            Some((p, k)) => (p.trim(), k.trim()),
            None => (t, "1"),
        };
        let p = p.parse().map_err(|_| bad())?;
        let k = k.parse().map_err(|_| bad())?;
        Ok(FieldSpec { p, k })
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.k)
    }
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    /// Ascending coefficients, `k + 1` entries, last one is 1.
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for `i < 2(q-1)`, doubled so log sums need no reduction.
    exp: Vec<u32>,
    /// `log[a]` for nonzero `a`; `log[0]` is unused.
    log: Vec<u32>,
}

/// An immutable finite field `F_{p^k}`; cheap to clone.
#[derive(Clone)]
pub struct FiniteField(Arc<Inner>);

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.0.p)
            .field("k", &self.0.k)
            .field("modulus", &self.0.modulus)
            .finish()
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{}", self.0.p, self.0.k)
        }
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.k == other.0.k && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FiniteField {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

const MODULUS_TABLE: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (7, 2, &[3, 6, 1]),
];

/// The modulus used when [`FiniteField::new`] is called without one.
pub fn default_modulus(p: u32, k: u32) -> Result<Vec<u32>, FieldError> {
    check_parameters(p, k)?;
    if k == 1 {
        return Ok(vec![0, 1]);
    }
    if let Some((_, _, m)) = MODULUS_TABLE.iter().find(|(tp, tk, _)| *tp == p && *tk == k) {
        return Ok(m.to_vec());
    }
    let q = (p as u64).pow(k);
    for low in 0..q {
        let mut coeffs = Vec::with_capacity(k as usize + 1);
        let mut x = low;
        for _ in 0..k {
            coeffs.push((x % p as u64) as u32);
            x /= p as u64;
        }
        coeffs.push(1);
        if is_irreducible(p, &coeffs) {
            return Ok(coeffs);
        }
    }
    unreachable!("every finite field has an irreducible polynomial of each degree")
}

fn check_parameters(p: u32, k: u32) -> Result<u32, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::CompositeCharacteristic(p));
    }
    if k == 0 {
        return Err(FieldError::ZeroDegree);
    }
    match (p as u64).checked_pow(k) {
        Some(q) if q <= MAX_ORDER => Ok(q as u32),
        _ => Err(FieldError::OrderTooLarge { p, k }),
    }
}

// Dense polynomials over F_p, ascending coefficients. Used only while
// validating moduli and building tables.

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    r as u32
}

fn poly_rem(p: u32, num: &[u32], den: &[u32]) -> Vec<u32> {
    let den = trim(den.to_vec());
    let mut r = trim(num.to_vec());
    let dl = den.len();
    let lead_inv = inv_mod_p(*den.last().expect("nonzero divisor"), p) as u64;
    while r.len() >= dl {
        let shift = r.len() - dl;
        let c = (*r.last().unwrap() as u64 * lead_inv) % p as u64;
        for (i, &dc) in den.iter().enumerate() {
            let sub = (c * dc as u64) % p as u64;
            let slot = &mut r[shift + i];
            *slot = ((*slot as u64 + p as u64 - sub) % p as u64) as u32;
        }
        r = trim(r);
    }
    r
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(p: u32, coeffs: &[u32]) -> bool {
    let f = trim(coeffs.to_vec());
    if f.len() < 2 {
        return false;
    }
    let deg = f.len() - 1;
    for dd in 1..=deg / 2 {
        let count = (p as u64).pow(dd as u32);
        for low in 0..count {
            let mut g = Vec::with_capacity(dd + 1);
            let mut x = low;
            for _ in 0..dd {
                g.push((x % p as u64) as u32);
                x /= p as u64;
            }
            g.push(1);
            if poly_rem(p, &f, &g).is_empty() {
                return false;
            }
        }
    }
    true
}

fn to_digits(p: u32, k: u32, mut x: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(k as usize);
    for _ in 0..k {
        d.push(x % p);
        x /= p;
    }
    d
}

fn from_digits(p: u32, digits: &[u32]) -> u32 {
    digits.iter().rev().fold(0u32, |acc, &d| acc * p + d)
}

/// Schoolbook product reduced by the monic modulus; used for table setup.
fn slow_mul(p: u32, k: u32, modulus: &[u32], a: u32, b: u32) -> u32 {
    let da = to_digits(p, k, a);
    let db = to_digits(p, k, b);
    let k = k as usize;
    let mut prod = vec![0u64; 2 * k - 1];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    for top in (k..prod.len()).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        prod[top] = 0;
        for (i, &m) in modulus[..k].iter().enumerate() {
            let slot = &mut prod[top - k + i];
            *slot = (*slot + (p as u64 - c) * m as u64) % p as u64;
        }
    }
    let low: Vec<u32> = prod[..k].iter().map(|&c| c as u32).collect();
    from_digits(p, &low)
}

fn slow_pow(p: u32, k: u32, modulus: &[u32], a: u32, mut e: u64) -> u32 {
    let mut r = 1;
    let mut base = a;
    while e > 0 {
        if e & 1 == 1 {
            r = slow_mul(p, k, modulus, r, base);
        }
        base = slow_mul(p, k, modulus, base, base);
        e >>= 1;
    }
    r
}

impl FiniteField {
    /// Builds `F_{p^k}`. Without a modulus the documented default is used.
    ///
    /// Moduli are given as `k + 1` ascending coefficients and must be monic
    /// and irreducible over `F_p`.
    pub fn new(p: u32, k: u32, modulus: Option<&[u32]>) -> Result<Self, FieldError> {
        let q = check_parameters(p, k)?;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != k as usize + 1 || m[k as usize] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(FieldError::MalformedModulus { p, k });
                }
                if !is_irreducible(p, m) {
                    return Err(FieldError::ReducibleModulus { p });
                }
                m.to_vec()
            }
            None => default_modulus(p, k)?,
        };

        let order = q as u64 - 1;
        let factors = prime_factors(order);
        let generator = if q == 2 {
            1
        } else {
            (2..q)
                .chain(std::iter::once(1))
                .find(|&g| factors.iter().all(|&f| slow_pow(p, k, &modulus, g, order / f) != 1))
                .expect("multiplicative group is cyclic")
        };

        let n = q as usize - 1;
        let mut exp = vec![0u32; 2 * n];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..n {
            exp[i] = x;
            exp[i + n] = x;
            log[x as usize] = i as u32;
            x = if k == 1 {
                ((x as u64 * generator as u64) % p as u64) as u32
            } else {
                slow_mul(p, k, &modulus, x, generator)
            };
        }

        Ok(FiniteField(Arc::new(Inner {
            p,
            k,
            q,
            modulus,
            exp,
            log,
        })))
    }

    pub fn prime(p: u32) -> Result<Self, FieldError> {
        Self::new(p, 1, None)
    }

    /// Parses `"p^k"` (or a bare prime) and builds the field with its default modulus.
    pub fn from_spec(spec: &str) -> Result<Self, FieldError> {
        let FieldSpec { p, k } = spec.parse()?;
        Self::new(p, k, None)
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.0.p,
            k: self.0.k,
        }
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.0.k
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn element(&self, encoding: u64) -> Result<Elem, FieldError> {
        if encoding < self.0.q as u64 {
            Ok(Elem(encoding as u32))
        } else {
            Err(FieldError::EncodingOutOfRange {
                value: encoding,
                q: self.0.q,
            })
        }
    }

    /// The image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.0.p as i64) as u32)
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.0.q).map(Elem)
    }

    pub fn contains(&self, a: Elem) -> bool {
        a.0 < self.0.q
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.0.p;
        if self.0.k == 1 {
            let s = a.0 + b.0;
            return Elem(if s >= p { s - p } else { s });
        }
        if p == 2 {
            return Elem(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let (mut out, mut place) = (0u32, 1u32);
        while x > 0 || y > 0 {
            let s = x % p + y % p;
            out += if s >= p { s - p } else { s } * place;
            x /= p;
            y /= p;
            place *= p;
        }
        Elem(out)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.0.p;
        if p == 2 {
            return a;
        }
        if self.0.k == 1 {
            return Elem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let mut x = a.0;
        let (mut out, mut place) = (0u32, 1u32);
        while x > 0 {
            let d = x % p;
            if d != 0 {
                out += (p - d) * place;
            }
            x /= p;
            place *= p;
        }
        Elem(out)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let inner = &*self.0;
        Elem(inner.exp[(inner.log[a.0 as usize] + inner.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let n = self.0.q - 1;
        let l = self.0.log[a.0 as usize];
        Ok(Elem(self.0.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.0 == 0 {
            return Elem::ZERO;
        }
        let n = (self.0.q - 1) as u64;
        let l = self.0.log[a.0 as usize] as u64;
        Elem(self.0.exp[((l * (e % n)) % n) as usize])
    }

    /// `x -> x^p`.
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.0.p as u64)
    }

    /// The unique subfield of order `p^t`, sorted by encoding.
    pub fn subfield_elements(&self, t: u32) -> Result<Vec<Elem>, FieldError> {
        if t == 0 || !self.0.k.is_multiple_of(t) {
            return Err(FieldError::NonDivisorDegree { t, k: self.0.k });
        }
        let pt = (self.0.p as u64).pow(t);
        Ok(self.elements().filter(|&x| self.pow(x, pt) == x).collect())
    }

    /// Base-`p` digits of an element, constant term first.
    pub fn digits(&self, a: Elem) -> Vec<u32> {
        to_digits(self.0.p, self.0.k, a.0)
    }

    pub fn wrap(&self, value: Elem) -> Result<FieldElement, FieldError> {
        if self.contains(value) {
            Ok(FieldElement {
                field: self.clone(),
                value,
            })
        } else {
            Err(FieldError::EncodingOutOfRange {
                value: value.0 as u64,
                q: self.0.q,
            })
        }
    }
}

/// An element paired with its field; arithmetic checks that owners agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    field: FiniteField,
    value: Elem,
}

impl FieldElement {
    pub fn new(field: &FiniteField, encoding: u64) -> Result<Self, FieldError> {
        let value = field.element(encoding)?;
        Ok(FieldElement {
            field: field.clone(),
            value,
        })
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn encoding(&self) -> u32 {
        self.value.0
    }

    fn same_field(&self, other: &Self) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::MixedFields)
        }
    }

    fn with(&self, value: Elem) -> Self {
        FieldElement {
            field: self.field.clone(),
            value,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        Ok(self.with(self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        Ok(self.with(self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        Ok(self.with(self.field.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> Self {
        self.with(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        Ok(self.with(self.field.inv(self.value)?))
    }

    pub fn pow(&self, e: u64) -> Self {
        self.with(self.field.pow(self.value, e))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value.0)
    }
}
