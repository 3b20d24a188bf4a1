//! Arithmetic in F_p and F_{p^m} for odd primes p.
//!
//! A field is described by its characteristic and a monic irreducible
//! polynomial; elements live in power-basis coordinates over the generator z.
//! Irreducibility is verified eagerly at construction (degrees up to 12),
//! primitivity of z on demand. All operations are pure; `ExtField` is
//! immutable after construction and safe to share across threads.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest supported extension degree. Every instance of interest fits, and
/// the eager irreducibility check stays cheap.
pub const MAX_DEGREE: usize = 12;

/// Largest supported field order; keeps element indices inside u32 range and
/// the order factorization trivial.
const MAX_ORDER: u64 = 1 << 31;

/// An element of F_{p^m} in power-basis coordinates `coords[u]` of z^u,
/// each reduced into [0, p).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    coords: Vec<u64>,
}

impl FieldElem {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (u, &c) in self.coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match u {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "z")?,
                1 => write!(f, "{c}z")?,
                _ if c == 1 => write!(f, "z^{u}")?,
                _ => write!(f, "{c}z^{u}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// F_{p^m} presented as F_p[z] modulo a monic irreducible polynomial.
pub struct ExtField {
    p: u64,
    m: usize,
    /// Length m+1, constant term first, monic.
    min_poly: Vec<u64>,
    /// reduction[r] = coordinates of z^{m+r}, for r in 0..m-1.
    reduction: Vec<Vec<u64>>,
    /// tr_pow[u] = Tr(z^u) for u in 0..2m-1.
    tr_pow: Vec<u64>,
    /// Inverse of the Gram matrix G[u][v] = Tr(z^{u+v}).
    gram_inv: Vec<Vec<u64>>,
    primitive: OnceLock<bool>,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtField")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("min_poly", &self.min_poly)
            .finish()
    }
}

impl PartialEq for ExtField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.min_poly == other.min_poly
    }
}
impl Eq for ExtField {}

impl ExtField {
    /// Builds F_{p^m} from a monic minimal polynomial given constant term
    /// first (e.g. `[2, 4, 1]` for z^2 + 4z + 2 over F_5). Rejects composite
    /// or even p, non-monic or reducible polynomials, and degrees beyond
    /// [`MAX_DEGREE`].
    pub fn new(p: u64, min_poly: Vec<u64>) -> Result<ExtField> {
        if !is_odd_prime(p) {
            return Err(Error::Domain(format!("p = {p} is not an odd prime")));
        }
        if min_poly.len() < 2 {
            return Err(Error::Domain("minimal polynomial needs degree >= 1".into()));
        }
        let m = min_poly.len() - 1;
        if m > MAX_DEGREE {
            return Err(Error::Domain(format!(
                "degree {m} exceeds the supported maximum {MAX_DEGREE}"
            )));
        }
        if min_poly.iter().any(|&c| c >= p) {
            return Err(Error::Domain("minimal polynomial coefficients must be reduced mod p".into()));
        }
        if min_poly[m] != 1 {
            return Err(Error::Domain("minimal polynomial must be monic".into()));
        }
        let order = checked_pow(p, m as u32).filter(|&q| q <= MAX_ORDER).ok_or_else(|| {
            Error::Domain(format!("field order p^m = {p}^{m} exceeds the supported range"))
        })?;
        if m >= 2 && !poly_is_irreducible(&min_poly, p) {
            return Err(Error::Domain(format!(
                "polynomial {min_poly:?} is reducible over F_{p}"
            )));
        }

        let mut field = ExtField {
            p,
            m,
            min_poly,
            reduction: Vec::new(),
            tr_pow: Vec::new(),
            gram_inv: Vec::new(),
            primitive: OnceLock::new(),
        };
        field.reduction = field.build_reduction();
        field.tr_pow = field.build_traces();
        field.gram_inv = field.build_gram_inverse()?;
        debug_assert_eq!(order, field.order());
        Ok(field)
    }

    /// Parses the text form of a minimal polynomial, constant term first:
    /// `"2,4,1"` is z^2 + 4z + 2.
    pub fn parse(p: u64, text: &str) -> Result<ExtField> {
        let coeffs = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Domain(format!("bad polynomial coefficient {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        ExtField::new(p, coeffs)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    /// Number of elements p^m.
    pub fn order(&self) -> u64 {
        self.p.pow(self.m as u32)
    }

    pub fn min_poly(&self) -> &[u64] {
        &self.min_poly
    }

    /// Canonical text form of the minimal polynomial, constant term first.
    pub fn min_poly_string(&self) -> String {
        self.min_poly
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { coords: vec![0; self.m] }
    }

    pub fn one(&self) -> FieldElem {
        self.scalar(1)
    }

    /// The residue class of z, the designated generator.
    pub fn generator(&self) -> FieldElem {
        if self.m == 1 {
            // z is the root of the degree-1 polynomial: z = -c0.
            return self.scalar((self.p - self.min_poly[0]) % self.p);
        }
        let mut coords = vec![0; self.m];
        coords[1] = 1;
        FieldElem { coords }
    }

    /// z^e.
    pub fn gen_pow(&self, e: u64) -> FieldElem {
        self.pow(&self.generator(), e)
    }

    pub fn scalar(&self, c: u64) -> FieldElem {
        let mut coords = vec![0; self.m];
        coords[0] = c % self.p;
        FieldElem { coords }
    }

    pub fn from_coords(&self, coords: Vec<u64>) -> Result<FieldElem> {
        if coords.len() != self.m {
            return Err(Error::Domain(format!(
                "expected {} coordinates, got {}",
                self.m,
                coords.len()
            )));
        }
        if coords.iter().any(|&c| c >= self.p) {
            return Err(Error::Domain("coordinates must be reduced mod p".into()));
        }
        Ok(FieldElem { coords })
    }

    /// Element with index `Σ coords[u]·p^u`; inverse of [`Self::elem_index`].
    /// The p scalars of the prime subfield come first in this enumeration.
    pub fn elem_from_index(&self, mut idx: u64) -> FieldElem {
        debug_assert!(idx < self.order());
        let mut coords = vec![0; self.m];
        for c in coords.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        FieldElem { coords }
    }

    pub fn elem_index(&self, x: &FieldElem) -> u64 {
        debug_assert_eq!(x.coords.len(), self.m);
        let mut idx = 0;
        for &c in x.coords.iter().rev() {
            idx = idx * self.p + c;
        }
        idx
    }

    pub fn is_zero(&self, x: &FieldElem) -> bool {
        x.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        FieldElem { coords }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(&x, &y)| (x + self.p - y) % self.p)
            .collect();
        FieldElem { coords }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        let coords = a.coords.iter().map(|&x| (self.p - x) % self.p).collect();
        FieldElem { coords }
    }

    pub fn scalar_mul(&self, c: u64, a: &FieldElem) -> FieldElem {
        let c = c % self.p;
        let coords = a.coords.iter().map(|&x| (x * c) % self.p).collect();
        FieldElem { coords }
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let m = self.m;
        // Schoolbook product; coefficient sums stay far below u128.
        let mut prod = vec![0u128; 2 * m - 1];
        for (i, &x) in a.coords.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coords.iter().enumerate() {
                prod[i + j] += (x as u128) * (y as u128);
            }
        }
        let mut coords: Vec<u64> = prod[..m].iter().map(|&v| (v % self.p as u128) as u64).collect();
        for r in 0..m.saturating_sub(1) {
            let c = (prod[m + r] % self.p as u128) as u64;
            if c == 0 {
                continue;
            }
            for (u, &red) in self.reduction[r].iter().enumerate() {
                coords[u] = (coords[u] + c * red) % self.p;
            }
        }
        FieldElem { coords }
    }

    pub fn square(&self, a: &FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: &FieldElem, mut e: u64) -> FieldElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.square(&base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        if self.is_zero(a) {
            return Err(Error::Domain("inverse of zero".into()));
        }
        let inv = self.pow(a, self.order() - 2);
        debug_assert_eq!(self.mul(a, &inv), self.one());
        Ok(inv)
    }

    /// Absolute trace x + x^p + ... + x^{p^{m-1}}, reduced into F_p.
    pub fn trace(&self, x: &FieldElem) -> u64 {
        let mut acc = 0u64;
        for (u, &c) in x.coords.iter().enumerate() {
            acc = (acc + c * self.tr_pow[u]) % self.p;
        }
        acc
    }

    /// The quadratic character: +1 for nonzero squares, -1 for non-squares.
    /// Zero is outside the character's domain.
    pub fn quad_character(&self, x: &FieldElem) -> Result<i8> {
        if self.is_zero(x) {
            return Err(Error::Domain("quadratic character of zero is undefined".into()));
        }
        let r = self.pow(x, (self.order() - 1) / 2);
        if r == self.one() {
            Ok(1)
        } else {
            debug_assert_eq!(r, self.scalar(self.p - 1));
            Ok(-1)
        }
    }

    /// Whether z generates the full multiplicative group. Computed once and
    /// cached.
    pub fn generator_is_primitive(&self) -> bool {
        *self.primitive.get_or_init(|| {
            let q1 = self.order() - 1;
            let z = self.generator();
            if self.is_zero(&z) {
                return false;
            }
            factor(q1)
                .into_iter()
                .all(|r| self.pow(&z, q1 / r) != self.one())
        })
    }

    /// Trace-dual coordinates t with t[u] = Tr(a·z^u), so that
    /// Tr(a·x) = Σ t[u]·coords(x)[u] for every x.
    pub fn dual_coords(&self, a: &FieldElem) -> Vec<u64> {
        let mut t = vec![0u64; self.m];
        for (u, tu) in t.iter_mut().enumerate() {
            let mut acc = 0u64;
            for (v, &c) in a.coords.iter().enumerate() {
                acc = (acc + c * self.tr_pow[u + v]) % self.p;
            }
            *tu = acc;
        }
        t
    }

    /// Inverse of [`Self::dual_coords`].
    pub fn elem_from_dual_coords(&self, t: &[u64]) -> FieldElem {
        debug_assert_eq!(t.len(), self.m);
        let mut coords = vec![0u64; self.m];
        for (u, c) in coords.iter_mut().enumerate() {
            let mut acc = 0u64;
            for (v, &tv) in t.iter().enumerate() {
                acc = (acc + self.gram_inv[u][v] * (tv % self.p)) % self.p;
            }
            *c = acc;
        }
        FieldElem { coords }
    }

    /// The basis {d_v} dual to the power basis under the trace form:
    /// Tr(z^u · d_v) = 1 if u = v, else 0.
    pub fn dual_basis(&self) -> Vec<FieldElem> {
        (0..self.m)
            .map(|v| {
                let mut t = vec![0u64; self.m];
                t[v] = 1;
                self.elem_from_dual_coords(&t)
            })
            .collect()
    }

    fn build_reduction(&self) -> Vec<Vec<u64>> {
        let m = self.m;
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(m.saturating_sub(1));
        // z^m = -(c_0 + c_1 z + ... + c_{m-1} z^{m-1})
        let base: Vec<u64> = (0..m).map(|u| (self.p - self.min_poly[u]) % self.p).collect();
        let mut cur = base.clone();
        for _ in 0..m.saturating_sub(1) {
            rows.push(cur.clone());
            // multiply by z: shift, then fold the overflow through z^m.
            let carry = cur[m - 1];
            let mut next = vec![0u64; m];
            for u in (1..m).rev() {
                next[u] = cur[u - 1];
            }
            if carry != 0 {
                for u in 0..m {
                    next[u] = (next[u] + carry * base[u]) % self.p;
                }
            }
            cur = next;
        }
        rows
    }

    fn build_traces(&self) -> Vec<u64> {
        // Tr(z^u) via explicit Frobenius orbits; only needed up to z^{2m-2}.
        let mut tr = vec![0u64; 2 * self.m - 1];
        let frob: Vec<FieldElem> = {
            // z^{p^l} for l in 0..m
            let mut v = Vec::with_capacity(self.m);
            let mut cur = self.generator_raw();
            for _ in 0..self.m {
                v.push(cur.clone());
                cur = self.pow_raw(&cur, self.p);
            }
            v
        };
        for (u, t) in tr.iter_mut().enumerate() {
            let mut acc = self.zero_raw();
            for f in &frob {
                let fu = self.pow_raw(f, u as u64);
                acc = self.add_raw(&acc, &fu);
            }
            debug_assert!(acc.coords[1..].iter().all(|&c| c == 0), "trace must land in F_p");
            *t = acc.coords[0];
        }
        tr
    }

    fn build_gram_inverse(&self) -> Result<Vec<Vec<u64>>> {
        let m = self.m;
        let gram: Vec<Vec<u64>> =
            (0..m).map(|u| (0..m).map(|v| self.tr_pow[u + v]).collect()).collect();
        invert_matrix_mod_p(&gram, self.p).ok_or_else(|| {
            // The trace form of a field extension is nondegenerate; a singular
            // Gram matrix means the construction itself is broken.
            Error::Domain("internal: singular trace Gram matrix".into())
        })
    }

    // Raw helpers callable before the struct is fully initialized (they do
    // not touch tr_pow/gram_inv).
    fn zero_raw(&self) -> FieldElem {
        FieldElem { coords: vec![0; self.m] }
    }
    fn generator_raw(&self) -> FieldElem {
        if self.m == 1 {
            return FieldElem { coords: vec![(self.p - self.min_poly[0]) % self.p] };
        }
        let mut coords = vec![0; self.m];
        coords[1] = 1;
        FieldElem { coords }
    }
    fn add_raw(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.add(a, b)
    }
    fn pow_raw(&self, a: &FieldElem, e: u64) -> FieldElem {
        self.pow(a, e)
    }
}

fn checked_pow(p: u64, e: u32) -> Option<u64> {
    p.checked_pow(e)
}

fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factors of n, ascending, without multiplicity.
fn factor(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
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

/// Gauss-Jordan inverse over F_p; None when singular.
fn invert_matrix_mod_p(a: &[Vec<u64>], p: u64) -> Option<Vec<Vec<u64>>> {
    let n = a.len();
    let mut work: Vec<Vec<u64>> = a.to_vec();
    let mut inv: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| work[r][col] % p != 0)?;
        work.swap(col, pivot);
        inv.swap(col, pivot);
        let s = mod_inv(work[col][col], p)?;
        for j in 0..n {
            work[col][j] = work[col][j] * s % p;
            inv[col][j] = inv[col][j] * s % p;
        }
        for r in 0..n {
            if r == col || work[r][col] == 0 {
                continue;
            }
            let f = work[r][col];
            for j in 0..n {
                work[r][j] = (work[r][j] + (p - f) * work[col][j]) % p;
                inv[r][j] = (inv[r][j] + (p - f) * inv[col][j]) % p;
            }
        }
    }
    Some(inv)
}

fn mod_inv(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return None;
    }
    // Fermat; p is prime throughout this crate.
    Some(pow_mod(a, p - 2, p))
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
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

// ---------------------------------------------------------------------------
// Irreducibility over F_p (dense polynomials as coefficient vectors,
// constant term first).

fn poly_trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    if v.is_empty() {
        v.push(0);
    }
}

fn poly_rem(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let lead_inv = mod_inv(b[db], p).expect("divisor with zero leading coefficient");
    while a.len() > db && !(a.len() == 1 && a[0] == 0) {
        let da = a.len() - 1;
        let f = a[da] * lead_inv % p;
        if f != 0 {
            for j in 0..=db {
                let idx = da - db + j;
                a[idx] = (a[idx] + (p - f) * b[j]) % p;
            }
        }
        a.pop();
        poly_trim(&mut a);
        if a.len() <= db {
            break;
        }
    }
    poly_trim(&mut a);
    a
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] += (x as u128) * (y as u128);
        }
    }
    let mut prod: Vec<u64> = prod.into_iter().map(|v| (v % p as u128) as u64).collect();
    poly_trim(&mut prod);
    poly_rem(prod, f, p)
}

fn poly_powmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        let r = poly_rem(a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    poly_trim(&mut out);
    out
}

/// Rabin's test: f of degree m is irreducible over F_p iff x^{p^m} = x mod f
/// and gcd(x^{p^{m/r}} - x, f) = 1 for every prime r dividing m.
fn poly_is_irreducible(f: &[u64], p: u64) -> bool {
    let m = (f.len() - 1) as u64;
    let x = vec![0u64, 1];
    let pow_tower = |d: u64| -> Vec<u64> {
        // x^{p^d} mod f by d successive p-th powers
        let mut cur = x.clone();
        for _ in 0..d {
            cur = poly_powmod(&cur, p, f, p);
        }
        cur
    };
    let top = pow_tower(m);
    if poly_sub(&top, &x, p) != vec![0] {
        return false;
    }
    for r in factor(m) {
        let g = poly_sub(&pow_tower(m / r), &x, p);
        let gcd = poly_gcd(f.to_vec(), g, p);
        if gcd.len() > 1 {
            return false;
        }
    }
    true
}
