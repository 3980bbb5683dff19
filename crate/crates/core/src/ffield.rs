//! Explicit finite fields `F_{p^k}` with a dense discrete-log table.
//!
//! An element is a `u32` index `c_0 + c_1 p + ... + c_{k-1} p^{k-1}` whose
//! base-`p` digits are the coefficients of its residue modulo the defining
//! polynomial. Zero is index 0 and one is index 1, so the prime field
//! embeds as the indices `0..p`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use crate::numth;
use crate::{Error, Result};

pub type Elem = u32;

/// Default upper bound on the number of field elements.
pub const DEFAULT_CAP: u64 = 1 << 22;
/// Bumped whenever the table layout or construction rule changes.
pub const CAP_VERSION: u32 = 1;

const NO_LOG: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct FieldTable {
    p: u32,
    k: u32,
    size: u32,
    modulus: Vec<u32>,
    gen: Elem,
    exp: Vec<Elem>,
    log: Vec<u32>,
}

/// Builds `F_{p^k}` under the default size cap.
pub fn build_field(p: u32, k: u32) -> Result<FieldTable> {
    FieldTable::build(p, k, DEFAULT_CAP)
}

impl FieldTable {
    pub fn build(p: u32, k: u32, cap: u64) -> Result<Self> {
        if !numth::is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if k == 0 {
            return Err(Error::Invalid("extension degree must be at least 1".into()));
        }
        let size = (p as u64)
            .checked_pow(k)
            .filter(|&s| s <= cap && s < u32::MAX as u64)
            .ok_or(Error::FieldCap { p, k, cap })?;
        let modulus = smallest_irreducible(p, k);
        let gen = smallest_generator(p, &modulus, size);
        let (exp, log) = sweep(p, &modulus, gen, size as u32);
        Ok(FieldTable { p, k, size: size as u32, modulus, gen, exp, log })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of elements `p^k`.
    pub fn size(&self) -> u32 {
        self.size
    }

    /// Order of the multiplicative group.
    pub fn unit_order(&self) -> u32 {
        self.size - 1
    }

    /// Ascending coefficients of the monic defining polynomial.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn gen(&self) -> Elem {
        self.gen
    }

    pub fn zero(&self) -> Elem {
        0
    }

    pub fn one(&self) -> Elem {
        1
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.size
    }

    /// Image of the integer `c` under `Z → F_p ⊂ F`.
    pub fn from_int(&self, c: i64) -> Elem {
        c.rem_euclid(self.p as i64) as Elem
    }

    pub fn digits(&self, x: Elem) -> Vec<u32> {
        let mut x = x;
        (0..self.k)
            .map(|_| {
                let d = x % self.p;
                x /= self.p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> Elem {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d % self.p)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 {
            return a;
        }
        let (mut a, mut out, mut place) = (a, 0, 1);
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.unit_order() as u64;
        let e = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % n;
        self.exp[e as usize]
    }

    /// `a^e` with the convention `0^0 = 1`.
    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = self.unit_order() as u64;
        let l = numth::mul_mod(self.log[a as usize] as u64, e % n, n);
        self.exp[l as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        let l = self.dlog(a)? as u64;
        let n = self.unit_order() as u64;
        Ok(self.exp[((n - l) % n) as usize])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Discrete logarithm to the base `gen`, in `0..q-1`.
    pub fn dlog(&self, a: Elem) -> Result<u32> {
        match self.log[a as usize] {
            NO_LOG => Err(Error::Zero),
            l => Ok(l),
        }
    }

    /// `gen^e`.
    pub fn exp(&self, e: u64) -> Elem {
        self.exp[(e % self.unit_order() as u64) as usize]
    }

    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.p as u64)
    }

    /// Same field with generator `gen^a`, which must be a generator.
    pub fn with_generator_power(&self, a: u64) -> Result<Self> {
        let n = self.unit_order() as u64;
        if numth::gcd(a % n, n) != 1 && n > 1 {
            return Err(Error::Invalid(format!("gen^{a} is not a generator")));
        }
        let exp: Vec<Elem> = (0..n)
            .map(|e| self.exp[numth::mul_mod(e, a, n.max(1)) as usize])
            .collect();
        let mut log = vec![NO_LOG; self.size as usize];
        for (e, &x) in exp.iter().enumerate() {
            log[x as usize] = e as u32;
        }
        Ok(FieldTable { gen: exp[1 % exp.len()], exp, log, ..self.clone() })
    }

    fn cache_file(dir: &Path, p: u32, k: u32) -> PathBuf {
        dir.join(format!("gf-{p}-{k}-v{CAP_VERSION}.bin"))
    }

    /// Loads the table from `dir` when present and consistent, otherwise
    /// builds it and writes it there.
    pub fn load_or_build(p: u32, k: u32, cap: u64, dir: Option<&Path>) -> Result<Self> {
        let Some(dir) = dir else {
            return Self::build(p, k, cap);
        };
        let path = Self::cache_file(dir, p, k);
        if let Ok(bytes) = fs::read(&path) {
            if let Some(t) = Self::decode(&bytes, p, k, cap) {
                return Ok(t);
            }
        }
        let t = Self::build(p, k, cap)?;
        fs::create_dir_all(dir).map_err(|e| Error::Io(e.to_string()))?;
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, t.encode()).map_err(|e| Error::Io(e.to_string()))?;
        fs::rename(&tmp, &path).map_err(|e| Error::Io(e.to_string()))?;
        Ok(t)
    }

    fn encode(&self) -> Vec<u8> {
        let mut words = vec![CAP_VERSION, self.p, self.k, self.gen];
        words.extend(&self.modulus);
        words.extend(&self.log);
        let mut out = b"JAFT".to_vec();
        for w in words {
            out.extend(w.to_le_bytes());
        }
        out
    }

    fn decode(bytes: &[u8], p: u32, k: u32, cap: u64) -> Option<Self> {
        let body = bytes.strip_prefix(b"JAFT")?;
        if body.len() % 4 != 0 {
            return None;
        }
        let words: Vec<u32> = body
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        let size = (p as u64).checked_pow(k).filter(|&s| s <= cap)? as usize;
        let head = 4 + k as usize + 1;
        if words.len() != head + size || words[..3] != [CAP_VERSION, p, k] {
            return None;
        }
        let gen = words[3];
        let modulus = words[4..head].to_vec();
        let log = words[head..].to_vec();
        let mut exp = vec![NO_LOG; size - 1];
        for (x, &l) in log.iter().enumerate() {
            match l {
                NO_LOG if x == 0 => {}
                l if (l as usize) < size - 1 && exp[l as usize] == NO_LOG => exp[l as usize] = x as u32,
                _ => return None,
            }
        }
        if size > 2 && log.get(gen as usize) != Some(&1) {
            return None;
        }
        Some(FieldTable { p, k, size: size as u32, modulus, gen, exp, log })
    }
}

/// Memoizes field tables by `(p, k)`, optionally backed by a cache directory.
#[derive(Debug)]
pub struct FieldCache {
    cap: u64,
    dir: Option<PathBuf>,
    tables: Mutex<HashMap<(u32, u32), Arc<FieldTable>>>,
}

impl Default for FieldCache {
    fn default() -> Self {
        FieldCache::new(DEFAULT_CAP, None)
    }
}

impl FieldCache {
    pub fn new(cap: u64, dir: Option<PathBuf>) -> Self {
        FieldCache { cap, dir, tables: Mutex::new(HashMap::new()) }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn get(&self, p: u32, k: u32) -> Result<Arc<FieldTable>> {
        if let Some(t) = self.tables.lock().unwrap().get(&(p, k)) {
            return Ok(t.clone());
        }
        let t = Arc::new(FieldTable::load_or_build(p, k, self.cap, self.dir.as_deref())?);
        self.tables.lock().unwrap().insert((p, k), t.clone());
        Ok(t)
    }

    /// The field with `q^n` elements, where `q` is a power of `p`.
    pub fn extension(&self, q: u64, n: u32) -> Result<Arc<FieldTable>> {
        let (p, k) = numth::prime_power(q).ok_or_else(|| Error::Invalid(format!("{q} is not a prime power")))?;
        let deg = k.checked_mul(n).ok_or(Error::FieldCap { p: p as u32, k: u32::MAX, cap: self.cap })?;
        self.get(p as u32, deg)
    }
}

// Dense polynomials over F_p, ascending coefficients, no trailing zeros.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    numth::pow_mod(a as u64, p as u64 - 2, p as u64) as u32
}

fn poly_rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    let mut a = trim(a.to_vec());
    let f = trim(f.to_vec());
    let df = f.len() - 1;
    let lead_inv = inv_mod_p(f[df], p) as u64;
    while a.len() > df {
        let shift = a.len() - 1 - df;
        let c = (*a.last().unwrap() as u64 * lead_inv % p as u64) as u32;
        for (i, &fi) in f.iter().enumerate() {
            let t = (c as u64 * fi as u64 % p as u64) as u32;
            a[shift + i] = (a[shift + i] + p - t) % p;
        }
        a = trim(a);
    }
    a
}

fn poly_mulmod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            c[i + j] = (c[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let c: Vec<u32> = c.into_iter().map(|x| x as u32).collect();
    poly_rem(&c, f, p)
}

fn poly_powmod(a: &[u32], mut e: u64, f: &[u32], p: u32) -> Vec<u32> {
    let mut acc = poly_rem(&[1], f, p);
    let mut b = poly_rem(a, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let k = f.len() - 1;
    let mut h = vec![0, 1];
    for _ in 1..=k / 2 {
        h = poly_powmod(&h, p as u64, f, p);
        let mut hx = h.clone();
        hx.resize(hx.len().max(2), 0);
        hx[1] = (hx[1] + p - 1) % p;
        if poly_gcd(f, &hx, p).len() > 1 {
            return false;
        }
    }
    true
}

fn index_digits(mut idx: u64, p: u32, k: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = (idx % p as u64) as u32;
            idx /= p as u64;
            d
        })
        .collect()
}

fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = (p as u64).pow(k);
    for idx in 0..count {
        let mut f = index_digits(idx, p, k);
        f.push(1);
        if k > 1 && f[0] == 0 {
            continue;
        }
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials of every degree exist")
}

fn smallest_generator(p: u32, f: &[u32], size: u64) -> Elem {
    let k = f.len() as u32 - 1;
    let n = size - 1;
    let primes: Vec<u64> = numth::factor(n).into_iter().map(|(l, _)| l).collect();
    (1..size)
        .find(|&g| {
            let gp = trim(index_digits(g, p, k));
            primes.iter().all(|&l| poly_powmod(&gp, n / l, f, p) != [1])
        })
        .expect("the multiplicative group is cyclic") as Elem
}

fn sweep(p: u32, f: &[u32], gen: Elem, size: u32) -> (Vec<Elem>, Vec<u32>) {
    let k = f.len() - 1;
    let g = trim(index_digits(gen as u64, p, k as u32));
    let mut exp = Vec::with_capacity(size as usize - 1);
    let mut log = vec![NO_LOG; size as usize];
    let mut cur = vec![0u32; k];
    cur[0] = 1;
    let mut scratch = vec![0u64; k + g.len()];
    for e in 0..size - 1 {
        let idx = cur.iter().rev().fold(0u32, |acc, &d| acc * p + d);
        assert_eq!(log[idx as usize], NO_LOG, "generator order too small");
        log[idx as usize] = e;
        exp.push(idx);
        scratch.iter_mut().for_each(|s| *s = 0);
        for (i, &c) in cur.iter().enumerate() {
            if c != 0 {
                for (j, &gj) in g.iter().enumerate() {
                    scratch[i + j] += c as u64 * gj as u64;
                }
            }
        }
        for t in (k..scratch.len()).rev() {
            let c = scratch[t] % p as u64;
            if c != 0 {
                for i in 0..k {
                    scratch[t - k + i] += c * (p - f[i]) as u64;
                }
            }
            scratch[t] = 0;
        }
        for i in 0..k {
            cur[i] = (scratch[i] % p as u64) as u32;
        }
    }
    assert!(cur[0] == 1 && cur[1..].iter().all(|&c| c == 0), "sweep did not close");
    (exp, log)
}
