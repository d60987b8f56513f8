//! Exact arithmetic over prime fields, small extension fields and the
//! rationals.
//!
//! A [`Field`] is a cheap, shareable handle. Elements are plain values that
//! only make sense together with the field they came from; every operation
//! goes through the field handle.
//!
//! Finite field elements are encoded as integers in `[0, q)`. For
//! `F_{p^k} = F_p[a]/(m(a))` the element `c_0 + c_1 a + ... + c_{k-1} a^{k-1}`
//! has code `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`, so the canonical element
//! order (by code) is lexicographic on the coefficient vector read from the
//! highest power down, and the prime subfield occupies codes `0..p`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest field order for which log/Zech tables are built.
const TABLE_LIMIT: u64 = 1 << 20;
/// Largest supported extension degree.
pub const MAX_EXTENSION_DEGREE: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Finite(u32),
    Rational(Box<BigRational>),
}

impl FieldElement {
    pub fn code(&self) -> u32 {
        match self {
            FieldElement::Finite(c) => *c,
            FieldElement::Rational(_) => panic!("rational element has no finite code"),
        }
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (FieldElement::Finite(a), FieldElement::Finite(b)) => a.cmp(b),
            (FieldElement::Rational(a), FieldElement::Rational(b)) => a
                .denom()
                .cmp(b.denom())
                .then_with(|| a.numer().cmp(b.numer())),
            (FieldElement::Finite(_), FieldElement::Rational(_)) => Ordering::Less,
            (FieldElement::Rational(_), FieldElement::Finite(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Discrete log tables for a finite field with a fixed primitive element.
#[derive(Debug)]
struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[n] = log(1 + g^n)`, or `u32::MAX` when `1 + g^n = 0`.
    zech: Vec<u32>,
}

/// A finite field `F_q`, `q = p^k`.
#[derive(Debug)]
pub struct FiniteField {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus coefficients, constant term first (length `k + 1`).
    modulus: Vec<u32>,
    tables: OnceLock<Option<Tables>>,
    generator: OnceLock<u32>,
}

type Digits = SmallVec<[u32; 8]>;

impl FiniteField {
    fn new(p: u32, k: u32) -> Result<Self> {
        let q = (p as u64)
            .checked_pow(k)
            .filter(|&q| q < (1u64 << 31))
            .ok_or_else(|| Error::FieldTooLarge(format!("{p}^{k}")))? as u32;
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p, k)
        };
        let field = FiniteField {
            p,
            k,
            q,
            modulus,
            tables: OnceLock::new(),
            generator: OnceLock::new(),
        };
        if k > 1 {
            // Extension arithmetic runs off the tables when they fit.
            let _ = field.tables();
        }
        Ok(field)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn tables(&self) -> Option<&Tables> {
        self.tables
            .get_or_init(|| {
                if (self.q as u64) <= TABLE_LIMIT {
                    Some(self.build_tables())
                } else {
                    None
                }
            })
            .as_ref()
    }

    fn build_tables(&self) -> Tables {
        let g = self.generator();
        let n = (self.q - 1) as usize;
        let mut exp = Vec::with_capacity(n);
        let mut log = vec![0u32; self.q as usize];
        let mut x = 1u32;
        for i in 0..n {
            exp.push(x);
            log[x as usize] = i as u32;
            x = self.mul_direct(x, g);
        }
        let zech = (0..n)
            .map(|i| {
                let s = self.add_direct(1, exp[i]);
                if s == 0 {
                    u32::MAX
                } else {
                    log[s as usize]
                }
            })
            .collect();
        Tables { exp, log, zech }
    }

    /// Smallest primitive element (by code).
    pub fn generator(&self) -> u32 {
        *self.generator.get_or_init(|| {
            let n = (self.q - 1) as u64;
            let primes = prime_factors(n);
            (1..self.q)
                .find(|&g| {
                    primes
                        .iter()
                        .all(|&r| self.pow_direct(g, n / r) != 1)
                })
                .expect("multiplicative group is cyclic")
        })
    }

    fn digits(&self, mut code: u32) -> Digits {
        let mut d = Digits::new();
        for _ in 0..self.k {
            d.push(code % self.p);
            code /= self.p;
        }
        d
    }

    fn encode(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0u32, |acc, &c| acc * self.p + c)
    }

    fn add_direct(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return ((a as u64 + b as u64) % self.p as u64) as u32;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let s: Digits = da
            .iter()
            .zip(db.iter())
            .map(|(&x, &y)| ((x as u64 + y as u64) % self.p as u64) as u32)
            .collect();
        self.encode(&s)
    }

    fn neg_direct(&self, a: u32) -> u32 {
        let d: Digits = self
            .digits(a)
            .iter()
            .map(|&x| if x == 0 { 0 } else { self.p - x })
            .collect();
        self.encode(&d)
    }

    fn mul_direct(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        if self.k == 1 {
            return ((a as u64 * b as u64) % p) as u32;
        }
        let k = self.k as usize;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * k - 1];
        for i in 0..k {
            for j in 0..k {
                prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % p;
            }
        }
        // Reduce with the monic modulus: a^k = -(m_0 + ... + m_{k-1} a^{k-1}).
        for top in (k..2 * k - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for i in 0..k {
                let m = self.modulus[i] as u64;
                prod[top - k + i] = (prod[top - k + i] + (p - c) * m) % p;
            }
        }
        let digits: Digits = prod[..k].iter().map(|&c| c as u32).collect();
        self.encode(&digits)
    }

    fn pow_direct(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_direct(acc, base);
            }
            base = self.mul_direct(base, base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            let s = a as u64 + b as u64;
            let p = self.p as u64;
            return if s >= p { (s - p) as u32 } else { s as u32 };
        }
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        match self.tables() {
            Some(t) => {
                let n = self.q - 1;
                let la = t.log[a as usize];
                let lb = t.log[b as usize];
                let diff = if lb >= la { lb - la } else { lb + n - la };
                let z = t.zech[diff as usize];
                if z == u32::MAX {
                    0
                } else {
                    t.exp[((la as u64 + z as u64) % n as u64) as usize]
                }
            }
            None => self.add_direct(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else if self.k == 1 {
            self.p - a
        } else {
            self.neg_direct(a)
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        match self.tables() {
            Some(t) => {
                let n = (self.q - 1) as u64;
                let s = (t.log[a as usize] as u64 + t.log[b as usize] as u64) % n;
                t.exp[s as usize]
            }
            None => self.mul_direct(a, b),
        }
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if self.k > 1 {
            if let Some(t) = self.tables() {
                let n = (self.q - 1) as u64;
                let s = (t.log[a as usize] as u64 * (e % n)) % n;
                return t.exp[s as usize];
            }
        }
        let mut base = a;
        let mut acc = 1u32;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        if self.k == 1 {
            let inv = BigInt::from(a)
                .extended_gcd(&BigInt::from(self.p))
                .x
                .mod_floor(&BigInt::from(self.p));
            return inv.to_u32();
        }
        match self.tables() {
            Some(t) => {
                let n = self.q - 1;
                let l = t.log[a as usize];
                Some(t.exp[((n - l) % n) as usize])
            }
            None => Some(self.pow_direct(a, self.q as u64 - 2)),
        }
    }

    /// Discrete log with respect to [`FiniteField::generator`].
    fn log(&self, a: u32) -> Option<u64> {
        if a == 0 {
            return None;
        }
        if let Some(t) = self.tables() {
            return Some(t.log[a as usize] as u64);
        }
        None
    }

    /// Smallest (by code) solution of `x^d = a`, if any.
    pub fn nth_root(&self, a: u32, d: u64) -> Option<u32> {
        if a == 0 {
            return Some(0);
        }
        let n = (self.q - 1) as u64;
        let g = n.gcd(&d);
        if self.pow(a, n / g) != 1 {
            return None;
        }
        if let Some(la) = self.log(a) {
            // d * x = la (mod n): x = (la / g) * (d/g)^{-1} mod n/g, plus multiples.
            let (d1, n1) = (d / g, n / g);
            let inv = BigInt::from(d1)
                .extended_gcd(&BigInt::from(n1))
                .x
                .mod_floor(&BigInt::from(n1))
                .to_u64()
                .unwrap_or(0);
            let x0 = ((la / g) as u128 * inv as u128 % n1 as u128) as u64;
            let t = self.tables().expect("log implies tables");
            return (0..g)
                .map(|i| t.exp[((x0 + i * n1) % n) as usize])
                .min();
        }
        if g == 1 {
            let e = BigInt::from(d)
                .extended_gcd(&BigInt::from(n))
                .x
                .mod_floor(&BigInt::from(n))
                .to_u64()
                .unwrap_or(0);
            return Some(self.pow(a, e));
        }
        (1..self.q).find(|&x| self.pow(x, d) == a)
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2u64;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 1;
    }
    true
}

/// Remainder of `a` modulo monic `m` over `F_p`; coefficients constant first.
fn poly_rem(p: u64, a: &[u64], m: &[u64]) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if c != 0 {
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - c) * mi) % p;
            }
        }
        r.pop();
    }
    r
}

/// Exhaustive irreducibility check: no monic factor of degree `1..=k/2`.
pub fn is_irreducible(p: u32, poly: &[u32]) -> bool {
    let p = p as u64;
    let k = poly.len() - 1;
    let f: Vec<u64> = poly.iter().map(|&c| c as u64).collect();
    for deg in 1..=k / 2 {
        let count = p.pow(deg as u32);
        for code in 0..count {
            let mut div = Vec::with_capacity(deg + 1);
            let mut c = code;
            for _ in 0..deg {
                div.push(c % p);
                c /= p;
            }
            div.push(1);
            if poly_rem(p, &f, &div).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible polynomial of degree `k`,
/// comparing the non-leading coefficients from degree `k - 1` down.
fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = (p as u64).pow(k);
    for code in 0..count {
        let mut poly = Vec::with_capacity(k as usize + 1);
        let mut c = code;
        for _ in 0..k {
            poly.push((c % p as u64) as u32);
            c /= p as u64;
        }
        poly.push(1);
        if poly[0] != 0 && is_irreducible(p, &poly) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[derive(Debug)]
enum Inner {
    Finite(FiniteField),
    Rational,
}

/// Handle to an exact field: `F_p`, `F_{p^k}` or `Q`.
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({self})")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.inner {
            Inner::Rational => write!(f, "Q"),
            Inner::Finite(ff) if ff.k == 1 => write!(f, "p:{}", ff.p),
            Inner::Finite(ff) => write!(f, "ext:{}^{}", ff.p, ff.k),
        }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.inner, &other.inner) {
            return true;
        }
        match (&*self.inner, &*other.inner) {
            (Inner::Rational, Inner::Rational) => true,
            (Inner::Finite(a), Inner::Finite(b)) => a.p == b.p && a.k == b.k,
            _ => false,
        }
    }
}

impl Eq for Field {}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidFieldSpec(s.to_string());
        if s == "Q" {
            return Ok(Field::rationals());
        }
        if let Some(rest) = s.strip_prefix("p:") {
            let p: u64 = rest.trim().parse().map_err(|_| bad())?;
            return Field::prime(p);
        }
        if let Some(rest) = s.strip_prefix("ext:") {
            let (p, k) = rest.split_once('^').ok_or_else(bad)?;
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            let k: u32 = k.trim().parse().map_err(|_| bad())?;
            return Field::extension(p, k);
        }
        Err(bad())
    }
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        Field::extension(p, 1)
    }

    pub fn extension(p: u64, k: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 || k > MAX_EXTENSION_DEGREE {
            return Err(Error::InvalidFieldSpec(format!("ext:{p}^{k}")));
        }
        let p32 = u32::try_from(p).map_err(|_| Error::FieldTooLarge(format!("p = {p}")))?;
        Ok(Field {
            inner: Arc::new(Inner::Finite(FiniteField::new(p32, k)?)),
        })
    }

    pub fn rationals() -> Field {
        Field {
            inner: Arc::new(Inner::Rational),
        }
    }

    /// Fast `u32` arithmetic, for finite fields only.
    pub fn finite(&self) -> Option<&FiniteField> {
        match &*self.inner {
            Inner::Finite(ff) => Some(ff),
            Inner::Rational => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.finite().is_some()
    }

    pub fn require_finite(&self) -> Result<&FiniteField> {
        self.finite().ok_or(Error::InfiniteField)
    }

    /// 0 for the rationals.
    pub fn characteristic(&self) -> u64 {
        self.finite().map_or(0, |ff| ff.p as u64)
    }

    pub fn extension_degree(&self) -> u32 {
        self.finite().map_or(1, |ff| ff.k)
    }

    pub fn order(&self) -> Option<u64> {
        self.finite().map(|ff| ff.q as u64)
    }

    /// Errors with `CharDividesDegree` unless `gcd(char, d) = 1`.
    pub fn check_degree_coprime(&self, d: u64) -> Result<()> {
        let p = self.characteristic();
        if p != 0 && d.gcd(&p) != 1 {
            return Err(Error::CharDividesDegree { p, d });
        }
        Ok(())
    }

    /// `F_{p^e}` over the prime field of this field. Only prime fields embed
    /// into their extensions by code.
    pub fn extension_of_degree(&self, e: u32) -> Result<Field> {
        let ff = self.require_finite()?;
        if ff.k != 1 {
            return Err(Error::Unsupported(
                "extensions of non-prime fields".to_string(),
            ));
        }
        if e == 1 {
            return Ok(self.clone());
        }
        Field::extension(ff.p as u64, e)
    }

    /// True when `self` is `F_p` and `other` is `F_{p^e}` (or equal).
    pub fn embeds_into(&self, other: &Field) -> bool {
        if self == other {
            return true;
        }
        match (self.finite(), other.finite()) {
            (Some(a), Some(b)) => a.k == 1 && a.p == b.p,
            _ => false,
        }
    }

    /// Image of an element of this field in `target` (see [`Field::embeds_into`]).
    pub fn embed(&self, target: &Field, a: &FieldElement) -> Result<FieldElement> {
        if !self.embeds_into(target) {
            return Err(Error::FieldMismatch(format!("{self} does not embed into {target}")));
        }
        Ok(a.clone())
    }

    pub fn zero(&self) -> FieldElement {
        match &*self.inner {
            Inner::Finite(_) => FieldElement::Finite(0),
            Inner::Rational => FieldElement::Rational(Box::new(BigRational::zero())),
        }
    }

    pub fn one(&self) -> FieldElement {
        match &*self.inner {
            Inner::Finite(_) => FieldElement::Finite(1),
            Inner::Rational => FieldElement::Rational(Box::new(BigRational::one())),
        }
    }

    pub fn from_i64(&self, n: i64) -> FieldElement {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElement {
        match &*self.inner {
            Inner::Finite(ff) => {
                let r = n.mod_floor(&BigInt::from(ff.p));
                FieldElement::Finite(r.to_u32().expect("reduced below p"))
            }
            Inner::Rational => FieldElement::Rational(Box::new(BigRational::from_integer(n.clone()))),
        }
    }

    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<FieldElement> {
        let n = self.from_bigint(num);
        let d = self.from_bigint(den);
        self.div(&n, &d)
            .ok_or_else(|| Error::InvalidElement(format!("{num}/{den}")))
    }

    /// Element with the given code (finite fields).
    pub fn element(&self, code: u32) -> FieldElement {
        debug_assert!(self.finite().is_some_and(|ff| code < ff.q));
        FieldElement::Finite(code)
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> Result<impl Iterator<Item = FieldElement>> {
        let q = self.require_finite()?.q;
        Ok((0..q).map(FieldElement::Finite))
    }

    pub fn is_zero(&self, a: &FieldElement) -> bool {
        match a {
            FieldElement::Finite(c) => *c == 0,
            FieldElement::Rational(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self, a: &FieldElement) -> bool {
        match a {
            FieldElement::Finite(c) => *c == 1,
            FieldElement::Rational(r) => r.is_one(),
        }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        match (&*self.inner, a, b) {
            (Inner::Finite(ff), FieldElement::Finite(x), FieldElement::Finite(y)) => {
                FieldElement::Finite(ff.add(*x, *y))
            }
            (Inner::Rational, FieldElement::Rational(x), FieldElement::Rational(y)) => {
                FieldElement::Rational(Box::new(&**x + &**y))
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        match (&*self.inner, a, b) {
            (Inner::Finite(ff), FieldElement::Finite(x), FieldElement::Finite(y)) => {
                FieldElement::Finite(ff.sub(*x, *y))
            }
            (Inner::Rational, FieldElement::Rational(x), FieldElement::Rational(y)) => {
                FieldElement::Rational(Box::new(&**x - &**y))
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        match (&*self.inner, a) {
            (Inner::Finite(ff), FieldElement::Finite(x)) => FieldElement::Finite(ff.neg(*x)),
            (Inner::Rational, FieldElement::Rational(x)) => {
                FieldElement::Rational(Box::new(-(&**x)))
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        match (&*self.inner, a, b) {
            (Inner::Finite(ff), FieldElement::Finite(x), FieldElement::Finite(y)) => {
                FieldElement::Finite(ff.mul(*x, *y))
            }
            (Inner::Rational, FieldElement::Rational(x), FieldElement::Rational(y)) => {
                FieldElement::Rational(Box::new(&**x * &**y))
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        match (&*self.inner, a) {
            (Inner::Finite(ff), FieldElement::Finite(x)) => ff.inv(*x).map(FieldElement::Finite),
            (Inner::Rational, FieldElement::Rational(x)) => {
                if x.is_zero() {
                    None
                } else {
                    Some(FieldElement::Rational(Box::new(x.recip())))
                }
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Option<FieldElement> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    pub fn pow(&self, a: &FieldElement, e: u64) -> FieldElement {
        match (&*self.inner, a) {
            (Inner::Finite(ff), FieldElement::Finite(x)) => FieldElement::Finite(ff.pow(*x, e)),
            (Inner::Rational, FieldElement::Rational(x)) => {
                let e = i32::try_from(e).expect("exponent fits in i32");
                FieldElement::Rational(Box::new(x.pow(e)))
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    /// Canonical `x` with `x^d = a`, if one exists in this field: smallest
    /// code for finite fields, the positive root (or the only one) over `Q`.
    pub fn nth_root(&self, a: &FieldElement, d: u64) -> Option<FieldElement> {
        match (&*self.inner, a) {
            (Inner::Finite(ff), FieldElement::Finite(x)) => {
                ff.nth_root(*x, d).map(FieldElement::Finite)
            }
            (Inner::Rational, FieldElement::Rational(x)) => {
                let d32 = u32::try_from(d).ok()?;
                let neg = x.is_negative();
                if neg && d.is_multiple_of(2) {
                    return None;
                }
                let num = x.numer().abs();
                let den = x.denom().clone();
                let rn = num.nth_root(d32);
                let rd = den.nth_root(d32);
                if rn.pow(d32) != num || rd.pow(d32) != den {
                    return None;
                }
                let r = BigRational::new(if neg { -rn } else { rn }, rd);
                Some(FieldElement::Rational(Box::new(r)))
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    /// Smallest `e >= 1` with `d | q^e - 1` (finite fields, `gcd(p, d) = 1`).
    pub fn root_of_unity_extension_degree(&self, d: u64) -> Result<u64> {
        let ff = self.require_finite()?;
        self.check_degree_coprime(d)?;
        let q = ff.q as u64 % d;
        let mut acc = q;
        let mut e = 1;
        while acc % d != 1 % d {
            acc = (acc * q) % d;
            e += 1;
        }
        Ok(e)
    }

    /// Canonical primitive `d`-th root of unity (smallest in canonical order),
    /// or `None` when the field has none.
    pub fn root_of_unity(&self, d: u64) -> Result<Option<FieldElement>> {
        if d == 0 {
            return Err(Error::InvalidDegree(0));
        }
        match &*self.inner {
            Inner::Rational => Ok(match d {
                1 => Some(self.one()),
                2 => Some(self.from_i64(-1)),
                _ => None,
            }),
            Inner::Finite(ff) => {
                self.check_degree_coprime(d)?;
                let n = (ff.q - 1) as u64;
                if !n.is_multiple_of(d) {
                    return Ok(None);
                }
                let base = ff.pow(ff.generator(), n / d);
                let best = (1..=d)
                    .filter(|t| t.gcd(&d) == 1)
                    .map(|t| ff.pow(base, t))
                    .min()
                    .expect("t = 1 is coprime");
                Ok(Some(FieldElement::Finite(best)))
            }
        }
    }

    /// Text form: integers for `F_p`, `n` or `n/m` for `Q`, polynomials in
    /// `a` (e.g. `3*a+2`) for extension fields.
    pub fn format(&self, a: &FieldElement) -> String {
        match (&*self.inner, a) {
            (Inner::Finite(ff), FieldElement::Finite(c)) => {
                if ff.k == 1 {
                    return c.to_string();
                }
                let digits = ff.digits(*c);
                let mut parts = Vec::new();
                for (i, &coef) in digits.iter().enumerate().rev() {
                    if coef == 0 {
                        continue;
                    }
                    let s = match (i, coef) {
                        (0, c) => c.to_string(),
                        (1, 1) => "a".to_string(),
                        (1, c) => format!("{c}*a"),
                        (i, 1) => format!("a^{i}"),
                        (i, c) => format!("{c}*a^{i}"),
                    };
                    parts.push(s);
                }
                if parts.is_empty() {
                    "0".to_string()
                } else {
                    parts.join("+")
                }
            }
            (Inner::Rational, FieldElement::Rational(r)) => {
                if r.denom().is_one() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    /// True when [`Field::format`] yields a plain (possibly signed) integer
    /// or fraction that needs no parentheses inside polynomial text.
    pub fn is_plain(&self, a: &FieldElement) -> bool {
        match a {
            FieldElement::Finite(c) => self.finite().is_none_or(|ff| *c < ff.p),
            FieldElement::Rational(_) => true,
        }
    }

    /// Inverse of [`Field::format`].
    pub fn parse_element(&self, s: &str) -> Result<FieldElement> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidElement(s.clone());
        if s.is_empty() {
            return Err(bad());
        }
        match &*self.inner {
            Inner::Rational => {
                let (num, den) = match s.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (s.as_str(), "1"),
                };
                let num: BigInt = num.parse().map_err(|_| bad())?;
                let den: BigInt = den.parse().map_err(|_| bad())?;
                self.from_ratio(&num, &den)
            }
            Inner::Finite(ff) => {
                if let Ok(n) = s.parse::<BigInt>() {
                    return Ok(self.from_bigint(&n));
                }
                if ff.k == 1 {
                    if let Some((n, d)) = s.split_once('/') {
                        let num: BigInt = n.parse().map_err(|_| bad())?;
                        let den: BigInt = d.parse().map_err(|_| bad())?;
                        return self.from_ratio(&num, &den);
                    }
                    return Err(bad());
                }
                self.parse_ext_element(&s).ok_or_else(bad)
            }
        }
    }

    fn parse_ext_element(&self, s: &str) -> Option<FieldElement> {
        let ff = self.finite()?;
        let mut acc = 0u32;
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut negative = false;
            if bytes[i] == b'+' || bytes[i] == b'-' {
                negative = bytes[i] == b'-';
                i += 1;
            }
            let start = i;
            while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
                i += 1;
            }
            let term = &s[start..i];
            if term.is_empty() {
                return None;
            }
            let (coef, power) = match term.find('a') {
                None => (term.parse::<u64>().ok()?, 0u32),
                Some(pos) => {
                    let coef = match &term[..pos] {
                        "" => 1,
                        c => c.strip_suffix('*')?.parse::<u64>().ok()?,
                    };
                    let power = match &term[pos + 1..] {
                        "" => 1,
                        e => e.strip_prefix('^')?.parse::<u32>().ok()?,
                    };
                    (coef, power)
                }
            };
            let c = (coef % ff.p as u64) as u32;
            let mut value = ff.mul(c, ff.pow(if ff.k > 1 { ff.p } else { 0 }, power as u64));
            if negative {
                value = ff.neg(value);
            }
            acc = ff.add(acc, value);
        }
        Some(FieldElement::Finite(acc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Field {
        s.parse().unwrap()
    }

    #[test]
    fn root_of_unity_examples() {
        let f7 = f("p:7");
        assert_eq!(f7.root_of_unity(3).unwrap(), Some(f7.element(2)));
        assert_eq!(f7.root_of_unity(1).unwrap(), Some(f7.one()));
        let f5 = f("p:5");
        assert_eq!(f5.root_of_unity(3).unwrap(), None);
        assert_eq!(
            f7.root_of_unity(7),
            Err(Error::CharDividesDegree { p: 7, d: 7 })
        );
    }

    #[test]
    fn root_of_unity_matches_exhaustive_search() {
        for spec in ["p:7", "p:13", "ext:5^2", "ext:2^3", "ext:3^2"] {
            let field = f(spec);
            let q = field.order().unwrap();
            for d in 1..=12u64 {
                if field.check_degree_coprime(d).is_err() {
                    continue;
                }
                let expected = field.elements().unwrap().find(|x| {
                    !field.is_zero(x)
                        && field.is_one(&field.pow(x, d))
                        && (1..d).all(|j| !field.is_one(&field.pow(x, j)))
                });
                let got = field.root_of_unity(d).unwrap();
                assert_eq!(got, expected, "{spec} d={d}");
                if let Some(rho) = got {
                    let mut powers: Vec<_> = (0..d).map(|j| field.pow(&rho, j)).collect();
                    powers.sort();
                    powers.dedup();
                    assert_eq!(powers.len() as u64, d);
                    assert_eq!((q - 1) % d, 0);
                }
            }
        }
    }

    #[test]
    fn canonical_moduli() {
        // x^2 + 1 is the smallest monic irreducible quadratic over F_7.
        assert_eq!(f("ext:7^2").finite().unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(f("ext:2^2").finite().unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(f("ext:2^3").finite().unwrap().modulus(), &[1, 1, 0, 1]);
        assert!(!is_irreducible(5, &[1, 0, 1]));
        assert!(is_irreducible(5, &[2, 0, 1]));
    }

    #[test]
    fn extension_has_q_distinct_elements_and_table_arithmetic_agrees() {
        for spec in ["ext:2^4", "ext:3^3", "ext:5^2"] {
            let field = f(spec);
            let ff = field.finite().unwrap();
            let q = ff.order();
            let mut seen = std::collections::BTreeSet::new();
            for a in 0..q {
                seen.insert(field.format(&FieldElement::Finite(a)));
                for b in 0..q {
                    assert_eq!(ff.add(a, b), ff.add_direct(a, b));
                    assert_eq!(ff.mul(a, b), ff.mul_direct(a, b));
                }
            }
            assert_eq!(seen.len() as u32, q);
        }
    }

    #[test]
    fn element_text_round_trip() {
        for spec in ["p:13", "ext:3^2", "ext:5^3"] {
            let field = f(spec);
            for x in field.elements().unwrap() {
                let s = field.format(&x);
                assert_eq!(field.parse_element(&s).unwrap(), x, "{spec} {s}");
            }
        }
        let q = Field::rationals();
        let x = q.parse_element("-6/4").unwrap();
        assert_eq!(q.format(&x), "-3/2");
        assert_eq!(f("p:7").parse_element("-1").unwrap(), FieldElement::Finite(6));
    }

    #[test]
    fn field_spec_parsing() {
        assert_eq!(f("p:7").to_string(), "p:7");
        assert_eq!(f("ext:7^2").to_string(), "ext:7^2");
        assert_eq!(f("ext:7^1"), f("p:7"));
        assert_eq!(f("Q"), Field::rationals());
        assert!(matches!("p:8".parse::<Field>(), Err(Error::NotPrime(8))));
        assert!("x:7".parse::<Field>().is_err());
    }

    #[test]
    fn nth_roots() {
        let f13 = f("p:13");
        // Cubes in F_13 are {1, 5, 8, 12}.
        let cubes: Vec<u32> = (1..13).filter(|&a| f13.nth_root(&f13.element(a), 3).is_some()).collect();
        assert_eq!(cubes, vec![1, 5, 8, 12]);
        for a in 1..13 {
            if let Some(r) = f13.nth_root(&f13.element(a), 3) {
                assert_eq!(f13.pow(&r, 3), f13.element(a));
            }
        }
        let q = Field::rationals();
        assert_eq!(
            q.nth_root(&q.parse_element("-8/27").unwrap(), 3),
            Some(q.parse_element("-2/3").unwrap())
        );
        assert_eq!(q.nth_root(&q.from_i64(2), 2), None);
    }

    #[test]
    fn rational_order_is_denominator_then_numerator() {
        let q = Field::rationals();
        let a = q.parse_element("5").unwrap();
        let b = q.parse_element("1/2").unwrap();
        let c = q.parse_element("-1/2").unwrap();
        assert!(a < b);
        assert!(c < b);
    }

    #[test]
    fn minimal_root_extension() {
        assert_eq!(f("p:5").root_of_unity_extension_degree(3).unwrap(), 2);
        assert_eq!(f("p:7").root_of_unity_extension_degree(3).unwrap(), 1);
    }
}
