//! Exact arithmetic in cyclotomic fields.
//!
//! A [`CycNum`] is an element of some Q(zeta_N) stored on the power basis
//! `zeta_N^0, ..., zeta_N^(phi(N)-1)` reduced modulo the N-th cyclotomic
//! polynomial. Values are kept fully canonical: the conductor is always the
//! minimal one containing the element and is never congruent to 2 mod 4
//! (zeta_{2m} = -zeta_m^{(m+1)/2} for odd m rewrites those away). Equality,
//! hashing, and serialization therefore agree with mathematical equality.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Euler totient by trial-division factorization.
pub fn phi(n: u64) -> u64 {
    assert!(n >= 1, "phi(0) is undefined");
    let mut out = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out -= out / p;
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

/// Distinct prime divisors in increasing order.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// All divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

fn primitive_root_mod(p: u64) -> u64 {
    // p is an odd prime; brute-force the smallest generator of (Z/p)*.
    let qs = prime_divisors(p - 1);
    'next: for g in 2..p {
        for &q in &qs {
            if pow_mod(g, (p - 1) / q, p) == 1 {
                continue 'next;
            }
        }
        return g;
    }
    unreachable!("every odd prime has a primitive root");
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Reduction data for one conductor: rows[e] is the canonical coordinate
/// vector of zeta_N^e for 0 <= e < 2N (products never need more).
struct Table {
    n: u64,
    deg: usize,
    rows: Vec<Vec<BigInt>>,
}

static TABLES: Lazy<RwLock<HashMap<u64, Arc<Table>>>> = Lazy::new(|| RwLock::new(HashMap::new()));

fn cyclotomic_poly(n: u64, cache: &mut HashMap<u64, Vec<BigInt>>) -> Vec<BigInt> {
    if let Some(p) = cache.get(&n) {
        return p.clone();
    }
    // x^n - 1 divided exactly by the product of all proper-divisor cyclotomics.
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let q = cyclotomic_poly(d, cache);
        num = poly_div_exact(&num, &q);
    }
    cache.insert(n, num.clone());
    num
}

/// Exact division of integer polynomials; panics on nonzero remainder,
/// which cannot happen for cyclotomic factors.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "cyclotomic polynomials are monic");
    let mut rem = num.to_vec();
    let mut quo = vec![BigInt::zero(); dn - dd + 1];
    for i in (0..=dn - dd).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        quo[i] = c.clone();
        for j in 0..=dd {
            let t = &den[j] * &c;
            rem[i + j] -= t;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "nonexact polynomial division");
    quo
}

fn table(n: u64) -> Arc<Table> {
    if let Some(t) = TABLES.read().expect("table lock").get(&n) {
        return t.clone();
    }
    let deg = phi(n) as usize;
    let mut cache = HashMap::new();
    let cp = cyclotomic_poly(n, &mut cache);
    debug_assert_eq!(cp.len(), deg + 1);
    // Iterate x^e mod Phi_n starting from 1.
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(2 * n as usize);
    let mut cur = vec![BigInt::zero(); deg];
    if deg > 0 {
        cur[0] = BigInt::one();
    }
    for _ in 0..2 * n {
        rows.push(cur.clone());
        // Multiply by x: shift up, then reduce the overflow coefficient.
        let top = cur[deg - 1].clone();
        for i in (1..deg).rev() {
            cur[i] = cur[i - 1].clone();
        }
        cur[0] = BigInt::zero();
        if !top.is_zero() {
            for i in 0..deg {
                let t = &cp[i] * &top;
                cur[i] -= t;
            }
        }
    }
    let t = Arc::new(Table { n, deg, rows });
    TABLES
        .write()
        .expect("table lock")
        .entry(n)
        .or_insert_with(|| t.clone())
        .clone()
}

/// An exact cyclotomic number in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    conductor: u64,
    coeffs: Vec<BigRational>,
}

impl CycNum {
    pub fn zero() -> Self {
        CycNum { conductor: 1, coeffs: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        CycNum { conductor: 1, coeffs: vec![BigRational::one()] }
    }

    pub fn from_integer(v: i64) -> Self {
        CycNum { conductor: 1, coeffs: vec![BigRational::from_integer(v.into())] }
    }

    /// # Panics
    /// Panics if `q == 0`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        CycNum { conductor: 1, coeffs: vec![BigRational::new(p.into(), q.into())] }
    }

    pub fn from_rational(r: BigRational) -> Self {
        CycNum { conductor: 1, coeffs: vec![r] }
    }

    /// The primitive root `zeta_n^k`, canonicalized.
    ///
    /// # Panics
    /// Panics if `n == 0`.
    pub fn root_of_unity(n: u64, k: i64) -> Self {
        assert!(n >= 1, "root_of_unity needs a positive order");
        let k = k.rem_euclid(n as i64) as u64;
        if k == 0 {
            return CycNum::one();
        }
        let g = k.gcd(&n);
        let (n, k) = (n / g, k / g);
        if n == 1 {
            return CycNum::one();
        }
        if n % 4 == 2 {
            // zeta_{2m} = -zeta_m^{(m+1)/2} for odd m; k is odd here.
            let m = n / 2;
            if m == 1 {
                return CycNum::from_integer(-1);
            }
            let e = ((m + 1) / 2).wrapping_mul(k) % m;
            let mut v = monomial(m, e);
            for c in &mut v {
                *c = -std::mem::take(c);
            }
            return canonicalize(m, v);
        }
        canonicalize(n, monomial(n, k))
    }

    /// Assemble a value from raw terms `(exponent, coefficient)` over a stated
    /// conductor; exponents are taken mod `n` and the result is canonicalized.
    pub fn from_terms<I>(n: u64, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        if n == 0 {
            return Err(Error::InvalidInput("conductor must be positive".into()));
        }
        let mut acc = CycNum::zero();
        // Group terms by going through root_of_unity so that conductors
        // congruent to 2 mod 4 are rewritten before reduction.
        let mut by_exp: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (e, c) in terms {
            *by_exp.entry(e.rem_euclid(n as i64) as u64).or_insert_with(BigRational::zero) += c;
        }
        for (e, c) in by_exp {
            if c.is_zero() {
                continue;
            }
            acc += CycNum::root_of_unity(n, e as i64).scale(&c);
        }
        Ok(acc)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Canonical-basis coefficient of `zeta_N^j` (zero for `j >= phi(N)`).
    pub fn coeff(&self, j: u64) -> BigRational {
        self.coeffs.get(j as usize).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Nonzero canonical terms in ascending exponent order.
    pub fn support(&self) -> Vec<(u64, BigRational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j as u64, c.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.conductor == 1 && self.coeffs[0].is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.conductor == 1 && self.coeffs[0].is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.conductor == 1 {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn scale(&self, r: &BigRational) -> CycNum {
        if r.is_zero() || self.is_zero() {
            return CycNum::zero();
        }
        // Scaling by a nonzero rational preserves the minimal conductor.
        CycNum {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Image under the Galois map `zeta_N -> zeta_N^k`; requires gcd(k, N) = 1.
    pub fn galois(&self, k: u64) -> Result<CycNum> {
        let n = self.conductor;
        let k = k % n.max(1);
        if n == 1 {
            return Ok(self.clone());
        }
        if k.gcd(&n) != 1 {
            return Err(Error::Arithmetic(format!(
                "galois exponent {k} is not coprime to the conductor {n}"
            )));
        }
        let t = table(n);
        let mut out = vec![BigRational::zero(); t.deg];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = ((j as u64) * k % n) as usize;
            add_scaled_row(&mut out, &t.rows[e], c);
        }
        Ok(canonicalize(n, out))
    }

    /// Complex conjugation, i.e. the Galois map `zeta -> zeta^(-1)`.
    pub fn conjugate(&self) -> CycNum {
        if self.conductor == 1 {
            return self.clone();
        }
        self.galois(self.conductor - 1)
            .expect("N-1 is always coprime to N")
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<CycNum> {
        if self.is_zero() {
            return Err(Error::Arithmetic("division by zero".into()));
        }
        if let Some(r) = self.as_rational() {
            return Ok(CycNum::from_rational(r.recip()));
        }
        let n = self.conductor;
        let t = table(n);
        let d = t.deg;
        // Columns of the multiplication-by-self matrix in the power basis.
        let mut mat = vec![vec![BigRational::zero(); d]; d];
        for j in 0..d {
            let mut col = vec![BigRational::zero(); d];
            for (i, c) in self.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                add_scaled_row(&mut col, &t.rows[i + j], c);
            }
            for i in 0..d {
                mat[i][j] = std::mem::take(&mut col[i]);
            }
        }
        let mut rhs = vec![BigRational::zero(); d];
        rhs[0] = BigRational::one();
        let sol = gaussian_solve(mat, rhs)
            .expect("multiplication by a nonzero field element is invertible");
        Ok(canonicalize(n, sol))
    }

    /// Integer power; negative exponents invert first.
    ///
    /// # Panics
    /// Panics when raising zero to a negative power.
    pub fn pow(&self, e: i64) -> CycNum {
        if e == 0 {
            return CycNum::one();
        }
        let base = if e < 0 {
            self.inv().expect("cannot raise zero to a negative power")
        } else {
            self.clone()
        };
        let mut acc = CycNum::one();
        let mut b = base;
        let mut m = e.unsigned_abs();
        while m > 0 {
            if m & 1 == 1 {
                acc = &acc * &b;
            }
            m >>= 1;
            if m > 0 {
                b = &b * &b;
            }
        }
        acc
    }

    /// Writes `self` as `(order, exponent)` with `self = zeta_order^exponent`
    /// in lowest terms, if it is a root of unity.
    pub fn as_root_of_unity(&self) -> Option<(u64, u64)> {
        if let Some(r) = self.as_rational() {
            if r.is_one() {
                return Some((1, 0));
            }
            if (-r).is_one() {
                return Some((2, 1));
            }
            return None;
        }
        // Necessary: unit modulus.
        if !(&self.conjugate() * self).is_one() {
            return None;
        }
        // Roots of unity in Q(zeta_n) have order dividing 2n.
        let bound = 2 * self.conductor;
        let mut acc = self.clone();
        for k in 1..=bound {
            if acc.is_one() {
                for u in 0..k {
                    if u.gcd(&k) == 1 && CycNum::root_of_unity(k, u as i64) == *self {
                        return Some((k, u));
                    }
                }
                return None;
            }
            acc = &acc * self;
            let _ = k;
        }
        None
    }

    fn lift_to(&self, n: u64, t: &Table) -> Vec<BigRational> {
        debug_assert_eq!(n % self.conductor, 0);
        let step = n / self.conductor;
        let mut out = vec![BigRational::zero(); t.deg];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            add_scaled_row(&mut out, &t.rows[(j as u64 * step) as usize], c);
        }
        out
    }
}

fn monomial(n: u64, e: u64) -> Vec<BigRational> {
    let t = table(n);
    t.rows[e as usize]
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect()
}

fn add_scaled_row(acc: &mut [BigRational], row: &[BigInt], c: &BigRational) {
    for (a, r) in acc.iter_mut().zip(row) {
        if !r.is_zero() {
            *a += c * BigRational::from_integer(r.clone());
        }
    }
}

/// Reduce a valid coordinate vector over conductor `n` to fully canonical
/// form: strip to the minimal conductor, never 2 mod 4.
fn canonicalize(n: u64, coeffs: Vec<BigRational>) -> CycNum {
    debug_assert!(n == 1 || n % 4 != 2);
    let mut n = n;
    let mut v = coeffs;
    'outer: loop {
        if n == 1 {
            return CycNum { conductor: 1, coeffs: v };
        }
        if v.iter().skip(1).all(|c| c.is_zero()) {
            v.truncate(1);
            return CycNum { conductor: 1, coeffs: v };
        }
        for p in prime_divisors(n) {
            let m = n / p;
            if m % p == 0 {
                // p^2 | n: Phi_n(x) = Phi_m(x^p), so the element lies in
                // Q(zeta_m) exactly when its support sits in p*Z.
                if v.iter().enumerate().all(|(j, c)| c.is_zero() || j % p as usize == 0) {
                    let w: Vec<BigRational> =
                        v.iter().step_by(p as usize).cloned().collect();
                    debug_assert_eq!(w.len() as u64, phi(m));
                    if m % 4 == 2 {
                        // Only reachable for p = 2 with v2(n) = 2; rewrite
                        // conductor 2m' down to the odd part m'.
                        let half = m / 2;
                        let t = table(half);
                        let mut u = vec![BigRational::zero(); t.deg];
                        for (j, c) in w.iter().enumerate() {
                            if c.is_zero() {
                                continue;
                            }
                            // zeta_m^j = (-1)^j zeta_half^(((half+1)/2)*j mod half)
                            let e = (((half + 1) / 2) * j as u64) % half;
                            let signed = if j % 2 == 1 { -c.clone() } else { c.clone() };
                            add_scaled_row(&mut u, &t.rows[e as usize], &signed);
                        }
                        n = half;
                        v = u;
                    } else {
                        n = m;
                        v = w;
                    }
                    continue 'outer;
                }
            } else if p % 2 == 1 {
                // p || n, p odd: drop to conductor m iff Galois-fixed under a
                // generator of Gal(Q(zeta_n)/Q(zeta_m)).
                let g = primitive_root_mod(p);
                // CRT: k = 1 mod m, k = g mod p.
                let k = (0..p)
                    .map(|t| 1 + t * m)
                    .find(|&k| k % p == g)
                    .expect("CRT solution exists");
                let t = table(n);
                let mut img = vec![BigRational::zero(); t.deg];
                for (j, c) in v.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let e = ((j as u64) * k % n) as usize;
                    add_scaled_row(&mut img, &t.rows[e], c);
                }
                if img == v {
                    v = express_in_subfield(&t, &v, m);
                    n = m;
                    continue 'outer;
                }
            }
        }
        return CycNum { conductor: n, coeffs: v };
    }
}

/// Rewrite a Galois-fixed vector over conductor `t.n` in the power basis of
/// the subfield Q(zeta_m), m | t.n.
fn express_in_subfield(t: &Table, v: &[BigRational], m: u64) -> Vec<BigRational> {
    let step = t.n / m;
    let dm = phi(m) as usize;
    // Augmented system: columns are the images of zeta_m^t, t < phi(m).
    let mut mat = vec![vec![BigRational::zero(); dm]; t.deg];
    for col in 0..dm {
        let row = &t.rows[(col as u64 * step) as usize];
        for i in 0..t.deg {
            if !row[i].is_zero() {
                mat[i][col] = BigRational::from_integer(row[i].clone());
            }
        }
    }
    gaussian_solve_rect(mat, v.to_vec())
        .expect("Galois-fixed element must lie in the subfield")
}

/// Solves a square exact linear system; `None` when singular.
fn gaussian_solve(mat: Vec<Vec<BigRational>>, rhs: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = rhs.len();
    gaussian_solve_inner(mat, rhs, n)
}

/// Solves a possibly overdetermined consistent system with `cols` unknowns.
fn gaussian_solve_rect(
    mat: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
) -> Option<Vec<BigRational>> {
    let cols = mat.first().map(|r| r.len()).unwrap_or(0);
    gaussian_solve_inner(mat, rhs, cols)
}

fn gaussian_solve_inner(
    mut mat: Vec<Vec<BigRational>>,
    mut rhs: Vec<BigRational>,
    cols: usize,
) -> Option<Vec<BigRational>> {
    let rows = rhs.len();
    let mut pivot_row_of_col = vec![usize::MAX; cols];
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, p);
        rhs.swap(r, p);
        let inv = mat[r][c].recip();
        for x in mat[r].iter_mut() {
            *x *= &inv;
        }
        rhs[r] *= &inv;
        for i in 0..rows {
            if i != r && !mat[i][c].is_zero() {
                let f = mat[i][c].clone();
                for j in 0..cols {
                    let t = &mat[r][j] * &f;
                    mat[i][j] -= t;
                }
                let t = &rhs[r] * &f;
                rhs[i] -= t;
            }
        }
        pivot_row_of_col[c] = r;
        r += 1;
        if r == rows {
            break;
        }
    }
    // Remaining rows must be consistent.
    for i in r..rows {
        if !rhs[i].is_zero() {
            return None;
        }
    }
    let mut out = vec![BigRational::zero(); cols];
    for c in 0..cols {
        let pr = pivot_row_of_col[c];
        if pr == usize::MAX {
            // Free column: underdetermined; our callers never hit this with
            // a nonzero solution requirement, pick zero.
            continue;
        }
        out[c] = rhs[pr].clone();
    }
    Some(out)
}

fn binary_op(a: &CycNum, b: &CycNum, mul: bool) -> CycNum {
    // Fast path: plain rational arithmetic.
    if a.conductor == 1 && b.conductor == 1 {
        let v = if mul {
            &a.coeffs[0] * &b.coeffs[0]
        } else {
            &a.coeffs[0] + &b.coeffs[0]
        };
        return CycNum { conductor: 1, coeffs: vec![v] };
    }
    let n = a.conductor.lcm(&b.conductor);
    let t = table(n);
    if !mul {
        let mut va = a.lift_to(n, &t);
        let vb = b.lift_to(n, &t);
        for (x, y) in va.iter_mut().zip(vb) {
            *x += y;
        }
        return canonicalize(n, va);
    }
    let va = a.lift_to(n, &t);
    let vb = b.lift_to(n, &t);
    let mut out = vec![BigRational::zero(); t.deg];
    for (i, ca) in va.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in vb.iter().enumerate() {
            if cb.is_zero() {
                continue;
            }
            let c = ca * cb;
            add_scaled_row(&mut out, &t.rows[i + j], &c);
        }
    }
    canonicalize(n, out)
}

impl std::ops::Add for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        binary_op(self, rhs, false)
    }
}

impl std::ops::Sub for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        binary_op(self, &-rhs, false)
    }
}

impl std::ops::Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        binary_op(self, rhs, true)
    }
}

impl std::ops::Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl std::ops::Add for CycNum {
    type Output = CycNum;
    fn add(self, rhs: CycNum) -> CycNum {
        &self + &rhs
    }
}

impl std::ops::Sub for CycNum {
    type Output = CycNum;
    fn sub(self, rhs: CycNum) -> CycNum {
        &self - &rhs
    }
}

impl std::ops::Mul for CycNum {
    type Output = CycNum;
    fn mul(self, rhs: CycNum) -> CycNum {
        &self * &rhs
    }
}

impl std::ops::Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

impl std::ops::AddAssign for CycNum {
    fn add_assign(&mut self, rhs: CycNum) {
        *self = &*self + &rhs;
    }
}

impl std::ops::AddAssign<&CycNum> for CycNum {
    fn add_assign(&mut self, rhs: &CycNum) {
        *self = &*self + rhs;
    }
}

impl std::ops::SubAssign for CycNum {
    fn sub_assign(&mut self, rhs: CycNum) {
        *self = &*self - &rhs;
    }
}

impl std::ops::MulAssign for CycNum {
    fn mul_assign(&mut self, rhs: CycNum) {
        *self = &*self * &rhs;
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let support = self.support();
        if support.is_empty() {
            return write!(f, "0");
        }
        for (idx, (j, c)) in support.iter().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if *j == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "z{}^{}", self.conductor, j)?;
            } else {
                write!(f, "{mag}*z{}^{}", self.conductor, j)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum({self})")
    }
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            conductor: u64,
            coeffs: BTreeMap<String, String>,
        }
        let coeffs = self
            .support()
            .into_iter()
            .map(|(j, c)| (j.to_string(), c.to_string()))
            .collect();
        Repr { conductor: self.conductor, coeffs }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            conductor: u64,
            #[serde(default)]
            coeffs: BTreeMap<String, String>,
        }
        let repr = Repr::deserialize(deserializer)?;
        if repr.conductor == 0 {
            return Err(D::Error::custom("conductor must be positive"));
        }
        let mut terms = Vec::new();
        for (k, v) in repr.coeffs {
            let e: u64 = k
                .parse()
                .map_err(|_| D::Error::custom(format!("bad exponent key {k:?}")))?;
            if e >= repr.conductor {
                return Err(D::Error::custom(format!(
                    "exponent {e} out of range for conductor {}",
                    repr.conductor
                )));
            }
            let c: BigRational = v
                .parse()
                .map_err(|_| D::Error::custom(format!("bad rational coefficient {v:?}")))?;
            terms.push((e as i64, c));
        }
        CycNum::from_terms(repr.conductor, terms).map_err(D::Error::custom)
    }
}

/// Finds `k` with `lhs = zeta_d^k * rhs` entrywise, if one exists.
pub fn solve_root_of_unity_scalar(lhs: &[CycNum], rhs: &[CycNum], d: u64) -> Option<u64> {
    if lhs.len() != rhs.len() {
        return None;
    }
    'next: for k in 0..d.max(1) {
        let z = CycNum::root_of_unity(d.max(1), k as i64);
        for (a, b) in lhs.iter().zip(rhs) {
            if *a != &z * b {
                continue 'next;
            }
        }
        return Some(k);
    }
    None
}
