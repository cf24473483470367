//! Finite fields GF(p^h) with their subfield chain.
//!
//! Elements are encoded as integers `c0 + c1 p + ... + c_{h-1} p^{h-1}` where
//! `c_i` are the coordinates with respect to the power basis `1, g, ..., g^{h-1}`
//! of the distinguished generator `g`. The integer order of the encoding is the
//! order of coefficient tuples read from `c_{h-1}` down to `c0`.
//!
//! A [`FieldTower`] owns the arithmetic tables. A [`Field`] is a view of one
//! subfield of a tower; elements of a subfield keep the encoding of the tower,
//! so vectors over `GF(q)` and over `GF(q^t)` can be mixed freely.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const MAX_ORDER: u64 = 1 << 20;

const ADD_TABLE_LIMIT: u32 = 1024;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
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

/// Splits a prime power `q = p^e` into `(p, e)`.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let f = prime_factors(q);
    if f.len() != 1 {
        return None;
    }
    let p = f[0];
    let mut e = 0;
    let mut m = q;
    while m > 1 {
        m /= p;
        e += 1;
    }
    Some((p as u32, e))
}

// Polynomials over GF(p): coefficient vectors, lowest degree first.

fn poly_trim(a: &mut Vec<u32>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    // m monic
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let v = (r[shift + i] + p - (lead * c) % p) % p;
                r[shift + i] = v;
            }
        }
        r.pop();
        poly_trim(&mut r);
    }
    r
}

fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let h = modulus.len() - 1;
    if h <= 1 {
        return true;
    }
    for deg in 1..=h / 2 {
        let count = (p as u64).pow(deg as u32);
        for code in 0..count {
            let mut div = Vec::with_capacity(deg + 1);
            let mut c = code;
            for _ in 0..deg {
                div.push((c % p as u64) as u32);
                c /= p as u64;
            }
            div.push(1);
            let r = poly_rem(modulus, &div, p);
            if r.iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

/// Powers of `x` modulo `modulus`, as element codes. Returns `None` when `x`
/// is not primitive.
fn power_table(modulus: &[u32], p: u32) -> Option<Vec<u32>> {
    let h = modulus.len() - 1;
    let order = (p as u64).pow(h as u32) as usize;
    let mut cur = vec![0u32; h];
    cur[0] = 1;
    let mut exp = Vec::with_capacity(order - 1);
    for k in 0..order - 1 {
        let code = encode(&cur, p);
        if k > 0 && code == 1 {
            return None;
        }
        exp.push(code);
        // multiply by x
        let top = cur[h - 1];
        for i in (1..h).rev() {
            cur[i] = (cur[i - 1] + p - (top * modulus[i]) % p) % p;
        }
        cur[0] = (p - (top * modulus[0]) % p) % p;
    }
    if encode(&cur, p) != 1 {
        return None;
    }
    Some(exp)
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

fn decode(mut code: u32, p: u32, h: u32) -> Vec<u32> {
    (0..h)
        .map(|_| {
            let c = code % p;
            code /= p;
            c
        })
        .collect()
}

fn smallest_primitive_root(p: u32) -> u32 {
    if p == 2 {
        return 1;
    }
    let factors = prime_factors(p as u64 - 1);
    (2..p)
        .find(|&g| {
            factors
                .iter()
                .all(|&f| modpow(g as u64, (p as u64 - 1) / f, p as u64) != 1)
        })
        .expect("every prime has a primitive root")
}

fn modpow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

struct TowerInner {
    p: u32,
    h: u32,
    order: u32,
    modulus: Vec<u32>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

/// The field GF(p^h) with a fixed modulus and primitive generator.
#[derive(Clone)]
pub struct FieldTower(Arc<TowerInner>);

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.h)
    }
}

impl PartialEq for FieldTower {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.h == other.0.h && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldTower {}

impl FieldTower {
    /// Builds GF(p^h). Without a modulus the smallest primitive irreducible
    /// polynomial is used; for `h = 1` the modulus is `x`.
    pub fn new(p: u32, h: u32, modulus: Option<&[u32]>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if h == 0 {
            return Err(Error::InvalidDegree(h));
        }
        let order = (p as u64)
            .checked_pow(h)
            .filter(|&o| o <= MAX_ORDER)
            .ok_or(Error::FieldTooLarge((p as u64).saturating_pow(h)))?;
        let order = order as u32;

        let (modulus, generator, exp) = if h == 1 {
            if let Some(m) = modulus {
                if m.len() != 2 || m[1] != 1 || m[0] >= p {
                    return Err(Error::BadModulus(1));
                }
            }
            let g = smallest_primitive_root(p);
            let mut exp = Vec::with_capacity(order as usize - 1);
            let mut cur = 1u64;
            for _ in 0..order - 1 {
                exp.push(cur as u32);
                cur = cur * g as u64 % p as u64;
            }
            let m = modulus.map(|m| m.to_vec()).unwrap_or_else(|| vec![0, 1]);
            (m, g, exp)
        } else if let Some(m) = modulus {
            if m.len() != h as usize + 1 || m[h as usize] != 1 || m.iter().any(|&c| c >= p) {
                return Err(Error::BadModulus(h));
            }
            if !is_irreducible(m, p) {
                return Err(Error::ReducibleModulus);
            }
            let exp = power_table(m, p).ok_or(Error::NonPrimitiveModulus)?;
            (m.to_vec(), p, exp)
        } else {
            let mut found = None;
            for code in 0..order {
                let mut m = decode(code, p, h);
                m.push(1);
                if !is_irreducible(&m, p) {
                    continue;
                }
                if let Some(exp) = power_table(&m, p) {
                    found = Some((m, exp));
                    break;
                }
            }
            let (m, exp) = found.expect("a primitive polynomial exists for every degree");
            (m, p, exp)
        };

        let n1 = order as usize - 1;
        let mut log = vec![0u32; order as usize];
        for (k, &e) in exp.iter().enumerate() {
            log[e as usize] = k as u32;
        }
        let mut exp2 = exp.clone();
        exp2.extend_from_slice(&exp);
        debug_assert_eq!(exp2.len(), 2 * n1);

        let neg = (0..order)
            .map(|x| {
                let c = decode(x, p, h);
                let n: Vec<u32> = c.iter().map(|&v| (p - v) % p).collect();
                encode(&n, p)
            })
            .collect();
        let add = if p != 2 && order <= ADD_TABLE_LIMIT {
            let mut t = vec![0u32; (order * order) as usize];
            for a in 0..order {
                let ca = decode(a, p, h);
                for b in 0..order {
                    let cb = decode(b, p, h);
                    let s: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
                    t[(a * order + b) as usize] = encode(&s, p);
                }
            }
            Some(t)
        } else {
            None
        };
        Ok(FieldTower(Arc::new(TowerInner {
            p,
            h,
            order,
            modulus,
            generator,
            exp: exp2,
            log,
            neg,
            add,
        })))
    }

    /// Builds the tower of order `q` (a prime power) with the default modulus.
    pub fn of_order(q: u64) -> Result<Self> {
        let (p, h) = prime_power(q).ok_or(Error::NotPrime(q))?;
        Self::new(p, h, None)
    }

    /// Parses `p^h` or `p^h:poly=c0,c1,...,1`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let (head, poly) = match spec.split_once(':') {
            Some((h, rest)) => {
                let coeffs = rest
                    .trim()
                    .strip_prefix("poly=")
                    .ok_or_else(|| Error::Parse(format!("expected poly= in {spec:?}")))?;
                let c = coeffs
                    .split(',')
                    .map(|s| s.trim().parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::Parse(e.to_string()))?;
                (h, Some(c))
            }
            None => (spec, None),
        };
        let (p, h) = match head.trim().split_once('^') {
            Some((p, h)) => (p.trim(), h.trim()),
            None => (head.trim(), "1"),
        };
        let p = p.parse::<u32>().map_err(|e| Error::Parse(e.to_string()))?;
        let h = h.parse::<u32>().map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(p, h, poly.as_deref())
    }

    pub fn spec_string(&self) -> String {
        let m: Vec<String> = self.0.modulus.iter().map(|c| c.to_string()).collect();
        format!("{}^{}:poly={}", self.0.p, self.0.h, m.join(","))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn h(&self) -> u32 {
        self.0.h
    }

    pub fn order(&self) -> u32 {
        self.0.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn generator(&self) -> u32 {
        self.0.generator
    }

    pub fn subfield_degrees(&self) -> Vec<u32> {
        (1..=self.0.h).filter(|d| self.0.h.is_multiple_of(*d)).collect()
    }

    /// Coefficients of `x` in the power basis of the generator.
    pub fn coefficients(&self, x: u32) -> Vec<u32> {
        decode(x, self.0.p, self.0.h)
    }

    pub fn from_coefficients(&self, c: &[u32]) -> Result<u32> {
        if c.len() != self.0.h as usize {
            return Err(Error::DimensionMismatch {
                expected: self.0.h as usize,
                got: c.len(),
            });
        }
        if c.iter().any(|&v| v >= self.0.p) {
            return Err(Error::Parse(format!("coefficient out of range in {c:?}")));
        }
        Ok(encode(c, self.0.p))
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let t = &*self.0;
        if t.p == 2 {
            return a ^ b;
        }
        if let Some(tab) = &t.add {
            return tab[(a * t.order + b) as usize];
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0u32, 1u32);
        while a > 0 || b > 0 {
            out += ((a % t.p + b % t.p) % t.p) * place;
            a /= t.p;
            b /= t.p;
            place *= t.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.0.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = &*self.0;
        t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
    }

    /// Multiplicative inverse. Panics on zero; see [`FieldTower::try_inv`].
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.try_inv(a).expect("inverse of zero")
    }

    #[inline]
    pub fn try_inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let t = &*self.0;
        let n1 = t.order - 1;
        Some(t.exp[((n1 - t.log[a as usize]) % n1) as usize])
    }

    #[inline]
    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    /// `a^e` by square-and-multiply.
    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Discrete logarithm with respect to the generator.
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.0.log[a as usize])
    }

    /// `g^k` for the generator `g`.
    pub fn exp(&self, k: u64) -> u32 {
        self.0.exp[(k % (self.0.order as u64 - 1)) as usize]
    }

    /// `x -> x^{p^s}` through the logarithm table (fast path).
    #[inline]
    pub fn frob(&self, a: u32, s: u32) -> u32 {
        if a == 0 || s.is_multiple_of(self.0.h) {
            return a;
        }
        let n1 = (self.0.order - 1) as u64;
        let e = (self.0.p as u64).pow(s % self.0.h) % n1;
        let l = self.0.log[a as usize] as u64;
        self.0.exp[(l * e % n1) as usize]
    }

    fn check_divisor(&self, d: u32) -> Result<()> {
        if d == 0 || !self.0.h.is_multiple_of(d) {
            return Err(Error::NotADivisor(d, self.0.h));
        }
        Ok(())
    }

    /// `x^{p^d}` computed by repeated squaring.
    pub fn frobenius(&self, x: u32, d: u32) -> Result<u32> {
        self.check_divisor(d)?;
        Ok(self.pow(x, (self.0.p as u64).pow(d)))
    }

    /// Trace from GF(p^h) down to the subfield of order `p^d`.
    pub fn trace_to(&self, x: u32, d: u32) -> Result<u32> {
        self.check_divisor(d)?;
        let t = self.0.h / d;
        let mut acc = 0;
        let mut y = x;
        for _ in 0..t {
            acc = self.add(acc, y);
            y = self.frob(y, d);
        }
        Ok(acc)
    }

    /// Norm from GF(p^h) down to the subfield of order `p^d`.
    pub fn norm_to(&self, x: u32, d: u32) -> Result<u32> {
        self.check_divisor(d)?;
        let t = self.0.h / d;
        let mut acc = 1;
        let mut y = x;
        for _ in 0..t {
            acc = self.mul(acc, y);
            y = self.frob(y, d);
        }
        Ok(acc)
    }

    /// Quadratic character of a nonzero element; always true in characteristic 2.
    pub fn is_square(&self, x: u32) -> Result<bool> {
        if x == 0 {
            return Err(Error::ZeroSquareTest);
        }
        if self.0.p == 2 {
            return Ok(true);
        }
        Ok(self.pow(x, (self.0.order as u64 - 1) / 2) == 1)
    }

    pub fn in_subfield(&self, x: u32, d: u32) -> Result<bool> {
        self.check_divisor(d)?;
        Ok(self.frob(x, d) == x)
    }

    /// The subfield of order `p^d` as a [`Field`] view.
    pub fn subfield(&self, d: u32) -> Result<Field> {
        self.check_divisor(d)?;
        let n = self.0.order;
        let mut elements: Vec<u32> = if d == self.0.h {
            (0..n).collect()
        } else {
            let step = (n as u64 - 1) / ((self.0.p as u64).pow(d) - 1);
            let mut v = vec![0u32];
            let cnt = (self.0.p as u64).pow(d) - 1;
            v.extend((0..cnt).map(|k| self.exp(k * step)));
            v
        };
        elements.sort_unstable();
        let mut rank = vec![u32::MAX; n as usize];
        for (i, &e) in elements.iter().enumerate() {
            rank[e as usize] = i as u32;
        }
        Ok(Field {
            tower: self.clone(),
            degree: d,
            elements: Arc::new(elements),
            rank: Arc::new(rank),
        })
    }

    pub fn full(&self) -> Field {
        self.subfield(self.0.h).expect("h divides h")
    }

    /// Coordinates of `x` over the subfield of order `p^d` in the basis
    /// `1, g, ..., g^{t-1}`, `t = h/d`.
    pub fn to_vector(&self, x: u32, d: u32) -> Result<Vec<u32>> {
        Ok(SubfieldBasis::new(self, d)?.coords(x).to_vec())
    }

    pub fn from_vector(&self, v: &[u32], d: u32) -> Result<u32> {
        SubfieldBasis::new(self, d)?.combine(v)
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        if value >= self.0.order {
            return Err(Error::Parse(format!("element code {value} out of range")));
        }
        Ok(FieldElement {
            tower: self.clone(),
            value,
        })
    }

    /// Serialized form `[c0,...,c_{h-1}]`.
    pub fn format_element(&self, x: u32) -> String {
        let c: Vec<String> = self.coefficients(x).iter().map(|v| v.to_string()).collect();
        format!("[{}]", c.join(","))
    }

    /// Parses `[c0,...,c_{h-1}]`, or a bare integer code.
    pub fn parse_element(&self, s: &str) -> Result<u32> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let c = inner
                .split(',')
                .map(|v| v.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(e.to_string()))?;
            return self.from_coefficients(&c);
        }
        let v = s.parse::<u32>().map_err(|e| Error::Parse(e.to_string()))?;
        if v >= self.0.order {
            return Err(Error::Parse(format!("element code {v} out of range")));
        }
        Ok(v)
    }
}

/// A subfield view of a tower. Arithmetic is the tower's; enumeration and
/// membership are restricted to the subfield.
#[derive(Clone)]
pub struct Field {
    tower: FieldTower,
    degree: u32,
    elements: Arc<Vec<u32>>,
    rank: Arc<Vec<u32>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) in {:?}", self.tower.p(), self.degree, self.tower)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.tower == other.tower
    }
}

impl Eq for Field {}

impl Field {
    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn p(&self) -> u32 {
        self.tower.p()
    }

    pub fn order(&self) -> u32 {
        self.elements.len() as u32
    }

    /// Subfield elements in increasing code order.
    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn nonzero(&self) -> &[u32] {
        &self.elements[1..]
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        (x as usize) < self.rank.len() && self.rank[x as usize] != u32::MAX
    }

    /// Position of `x` in [`Field::elements`].
    #[inline]
    pub fn rank_of(&self, x: u32) -> u32 {
        self.rank[x as usize]
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.tower.add(a, b)
    }
    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.tower.sub(a, b)
    }
    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.tower.neg(a)
    }
    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.tower.mul(a, b)
    }
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.tower.inv(a)
    }
    #[inline]
    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.tower.div(a, b)
    }
    #[inline]
    pub fn frob(&self, a: u32, s: u32) -> u32 {
        self.tower.frob(a, s)
    }

    /// A generator of the multiplicative group of this subfield.
    pub fn primitive(&self) -> u32 {
        let n = self.tower.order() as u64 - 1;
        let step = n / (self.order() as u64 - 1);
        self.tower.exp(step)
    }

    pub fn is_prime_field(&self) -> bool {
        self.degree == 1
    }

    /// Whether a nonzero `x` is a square in this subfield.
    pub fn is_square(&self, x: u32) -> Result<bool> {
        if x == 0 {
            return Err(Error::ZeroSquareTest);
        }
        if !self.contains(x) {
            return Err(Error::NotInSubfield(x));
        }
        if self.p() == 2 {
            return Ok(true);
        }
        Ok(self.tower.pow(x, (self.order() as u64 - 1) / 2) == 1)
    }
}

/// Coordinates of GF(q^t) over GF(q) in the power basis `1, g, ..., g^{t-1}`.
#[derive(Clone)]
pub struct SubfieldBasis {
    tower: FieldTower,
    sub: Field,
    t: usize,
    basis: Vec<u32>,
    coords: Arc<Vec<u32>>,
}

impl fmt::Debug for SubfieldBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubfieldBasis({:?} over degree {})", self.tower, self.sub.degree())
    }
}

impl SubfieldBasis {
    pub fn new(tower: &FieldTower, d: u32) -> Result<Self> {
        let sub = tower.subfield(d)?;
        let t = (tower.h() / d) as usize;
        let g = tower.generator();
        let basis: Vec<u32> = (0..t).map(|i| tower.pow(g, i as u64)).collect();
        let n = tower.order() as usize;
        let mut coords = vec![0u32; n * t];
        let q = sub.order() as usize;
        let mut digits = vec![0usize; t];
        for _ in 0..n {
            let mut x = 0;
            for (i, &dg) in digits.iter().enumerate() {
                x = tower.add(x, tower.mul(sub.elements()[dg], basis[i]));
            }
            for (i, &dg) in digits.iter().enumerate() {
                coords[x as usize * t + i] = sub.elements()[dg];
            }
            for dg in digits.iter_mut() {
                *dg += 1;
                if *dg < q {
                    break;
                }
                *dg = 0;
            }
        }
        Ok(SubfieldBasis {
            tower: tower.clone(),
            sub,
            t,
            basis,
            coords: Arc::new(coords),
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn subfield(&self) -> &Field {
        &self.sub
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    #[inline]
    pub fn coords(&self, x: u32) -> &[u32] {
        let t = self.t;
        &self.coords[x as usize * t..x as usize * t + t]
    }

    pub fn combine(&self, v: &[u32]) -> Result<u32> {
        if v.len() != self.t {
            return Err(Error::DimensionMismatch {
                expected: self.t,
                got: v.len(),
            });
        }
        let mut x = 0;
        for (&a, &b) in v.iter().zip(&self.basis) {
            if !self.sub.contains(a) {
                return Err(Error::NotInSubfield(a));
            }
            x = self.tower.add(x, self.tower.mul(a, b));
        }
        Ok(x)
    }
}

/// Operations accepted by [`arithmetic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A field element carrying its tower, for checked arithmetic.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    tower: FieldTower,
    value: u32,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tower.format_element(self.value))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tower.format_element(self.value))
    }
}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn coefficients(&self) -> Vec<u32> {
        self.tower.coefficients(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inverse(&self) -> Result<FieldElement> {
        let v = self.tower.try_inv(self.value).ok_or(Error::DivisionByZero)?;
        Ok(FieldElement {
            tower: self.tower.clone(),
            value: v,
        })
    }
}

/// Exact arithmetic on two elements of the same tower.
pub fn arithmetic(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    if a.tower != b.tower {
        return Err(Error::FieldMismatch);
    }
    let t = &a.tower;
    let value = match op {
        ArithOp::Add => t.add(a.value, b.value),
        ArithOp::Sub => t.sub(a.value, b.value),
        ArithOp::Mul => t.mul(a.value, b.value),
        ArithOp::Div => t.mul(a.value, t.try_inv(b.value).ok_or(Error::DivisionByZero)?),
    };
    Ok(FieldElement {
        tower: t.clone(),
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_moduli() {
        let f4 = FieldTower::new(2, 2, None).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let f2 = FieldTower::new(2, 1, None).unwrap();
        assert_eq!(f2.modulus(), &[0, 1]);
        assert_eq!(f2.order(), 2);
        let f9 = FieldTower::new(3, 2, None).unwrap();
        assert_eq!(f9.order(), 9);
        assert_eq!(f9.full().nonzero().len(), 8);
        // x^2 + 1 is irreducible over GF(3) but x has order 4, so x^2 + x + 2 wins
        assert_eq!(f9.modulus(), &[2, 1, 1]);
        let f8 = FieldTower::new(2, 3, None).unwrap();
        assert_eq!(f8.modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(FieldTower::new(4, 1, None).unwrap_err(), Error::NotPrime(4));
        assert_eq!(
            FieldTower::new(2, 2, Some(&[1, 0, 1])).unwrap_err(),
            Error::ReducibleModulus
        );
        assert_eq!(
            FieldTower::new(3, 2, Some(&[1, 0, 1])).unwrap_err(),
            Error::NonPrimitiveModulus
        );
        assert!(FieldTower::new(2, 2, Some(&[1, 1])).is_err());
    }

    #[test]
    fn gf4_products() {
        let f = FieldTower::new(2, 2, None).unwrap();
        let w = f.generator();
        assert_eq!(f.coefficients(w), vec![0, 1]);
        assert_eq!(f.mul(w, w), f.add(w, 1));
        assert_eq!(f.frobenius(w, 1).unwrap(), f.add(w, 1));
        assert_eq!(f.trace_to(w, 1).unwrap(), 1);
        assert_eq!(f.trace_to(1, 1).unwrap(), 0);
        assert_eq!(f.trace_to(0, 1).unwrap(), 0);
        assert_eq!(f.to_vector(w, 1).unwrap(), vec![0, 1]);
    }

    #[test]
    fn gf9_inverses_and_squares() {
        let f = FieldTower::new(3, 2, None).unwrap();
        for x in 1..9 {
            assert_eq!(f.mul(x, f.inv(x)), 1);
        }
        let minus_one = f.neg(1);
        assert!(f.is_square(minus_one).unwrap());
        assert!(!f.is_square(f.generator()).unwrap());
        assert_eq!(f.is_square(0).unwrap_err(), Error::ZeroSquareTest);
        let squares = (1..9).filter(|&x| f.is_square(x).unwrap()).count();
        assert_eq!(squares, 4);
    }

    #[test]
    fn spec_strings_round_trip() {
        let f = FieldTower::from_spec("2^4").unwrap();
        let g = FieldTower::from_spec(&f.spec_string()).unwrap();
        assert_eq!(f, g);
        let h = FieldTower::from_spec("3^2:poly=2,1,1").unwrap();
        assert_eq!(h.order(), 9);
        assert_eq!(h.parse_element("[0,1]").unwrap(), h.generator());
        assert_eq!(h.format_element(5), "[2,1]");
        assert!(FieldTower::from_spec("2^2:poly=1,0,1").is_err());
    }

    #[test]
    fn frobenius_errors() {
        let f = FieldTower::new(2, 4, None).unwrap();
        assert_eq!(f.frobenius(3, 3).unwrap_err(), Error::NotADivisor(3, 4));
        assert_eq!(f.trace_to(3, 3).unwrap_err(), Error::NotADivisor(3, 4));
        for x in 0..16 {
            assert_eq!(f.frobenius(x, 4).unwrap(), x);
        }
        assert_eq!(f.frobenius(0, 2).unwrap(), 0);
    }

    #[test]
    fn checked_arithmetic() {
        let f = FieldTower::new(2, 2, None).unwrap();
        let g = FieldTower::new(3, 1, None).unwrap();
        let a = f.element(2).unwrap();
        let z = f.element(0).unwrap();
        let b = g.element(1).unwrap();
        assert_eq!(arithmetic(&a, &b, ArithOp::Add).unwrap_err(), Error::FieldMismatch);
        assert_eq!(arithmetic(&a, &z, ArithOp::Div).unwrap_err(), Error::DivisionByZero);
        assert_eq!(arithmetic(&a, &z, ArithOp::Add).unwrap(), a);
        let sq = arithmetic(&a, &a, ArithOp::Mul).unwrap();
        assert_eq!(sq.coefficients(), vec![1, 1]);
    }

    #[test]
    fn vector_conversion_rejects_bad_input() {
        let f = FieldTower::new(2, 4, None).unwrap();
        assert!(f.from_vector(&[1, 0, 0], 2).is_err());
        // 2 is g, not in GF(4) inside GF(16)
        assert_eq!(f.from_vector(&[2, 0], 2).unwrap_err(), Error::NotInSubfield(2));
        assert_eq!(f.to_vector(0, 2).unwrap(), vec![0, 0]);
    }
}
