//! Exact arithmetic in `Z[ζ_m]`.
//!
//! Values are kept in the length-`m` power basis (the working form) and only
//! reduced modulo `Φ_m` when compared or inspected.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Ascending integer coefficients of the `m`-th cyclotomic polynomial.
pub fn cyclotomic_poly(m: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(f) = cache.lock().unwrap().get(&m) {
        return f.clone();
    }
    assert!(m >= 1, "cyclotomic order must be positive");
    // x^m - 1 divided by every Φ_e with e | m, e < m
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for e in (1..m).filter(|e| m % e == 0) {
        num = exact_div(&num, &cyclotomic_poly(e));
    }
    let f = Arc::new(num);
    cache.lock().unwrap().insert(m, f.clone());
    f
}

fn exact_div(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let mut quo = vec![0i64; a.len() - db];
    for t in (0..quo.len()).rev() {
        let c = rem[t + db] / b[db];
        quo[t] = c;
        for (i, &bi) in b.iter().enumerate() {
            rem[t + i] -= c * bi;
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    quo
}

#[derive(Clone, Debug)]
pub struct CycInt {
    m: u32,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(m: u32) -> Self {
        assert!(m >= 1);
        CycInt { m, coeffs: vec![BigInt::zero(); m as usize] }
    }

    pub fn from_int(m: u32, n: impl Into<BigInt>) -> Self {
        let mut c = Self::zero(m);
        c.coeffs[0] = n.into();
        c
    }

    /// `ζ_m^k`.
    pub fn zeta_pow(m: u32, k: i64) -> Self {
        let mut c = Self::zero(m);
        c.coeffs[k.rem_euclid(m as i64) as usize] = BigInt::one();
        c
    }

    /// Builds `Σ c_k ζ^k`, folding exponents modulo `m`.
    pub fn from_coeffs<T: Into<BigInt>>(m: u32, coeffs: impl IntoIterator<Item = T>) -> Self {
        let mut c = Self::zero(m);
        for (k, x) in coeffs.into_iter().enumerate() {
            c.coeffs[k % m as usize] += x.into();
        }
        c
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Working-form coefficients (length `m`).
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.m == other.m {
            Ok(())
        } else {
            Err(Error::MismatchedOrder(self.m, other.m))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(CycInt { m: self.m, coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(CycInt { m: self.m, coeffs })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let m = self.m as usize;
        let mut out = vec![BigInt::zero(); m];
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in other.coeffs.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                out[(i + j) % m] += a * b;
            }
        }
        Ok(CycInt { m: self.m, coeffs: out })
    }

    pub fn scale(&self, n: &BigInt) -> Self {
        CycInt { m: self.m, coeffs: self.coeffs.iter().map(|a| a * n).collect() }
    }

    /// Complex conjugation `ζ → ζ^{-1}`.
    pub fn conjugate(&self) -> Self {
        let m = self.m as usize;
        let mut out = vec![BigInt::zero(); m];
        for (k, a) in self.coeffs.iter().enumerate() {
            out[(m - k) % m] = a.clone();
        }
        CycInt { m: self.m, coeffs: out }
    }

    /// Remainder modulo `Φ_m`, of length `φ(m)`.
    pub fn canonical(&self) -> Vec<BigInt> {
        let phi = cyclotomic_poly(self.m);
        let deg = phi.len() - 1;
        let mut c = self.coeffs.clone();
        for t in (deg..c.len()).rev() {
            if c[t].is_zero() {
                continue;
            }
            let lead = std::mem::take(&mut c[t]);
            for (i, &f) in phi[..deg].iter().enumerate() {
                if f != 0 {
                    c[t - deg + i] -= &lead * f;
                }
            }
        }
        c.truncate(deg);
        c
    }

    /// The same value with working form equal to its canonical form.
    pub fn reduce(&self) -> Self {
        Self::from_coeffs(self.m, self.canonical())
    }

    pub fn as_rational_integer(&self) -> Option<BigInt> {
        let c = self.canonical();
        if c[1..].iter().all(Zero::is_zero) {
            Some(c[0].clone())
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().iter().all(Zero::is_zero)
    }

    /// Reinterprets the value inside `Z[ζ_{m·k}]` via `ζ_m = ζ_{mk}^k`.
    pub fn lift(&self, k: u32) -> Self {
        let mut out = Self::zero(self.m * k);
        for (i, a) in self.coeffs.iter().enumerate() {
            out.coeffs[i * k as usize] = a.clone();
        }
        out
    }
}

impl PartialEq for CycInt {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.canonical() == other.canonical()
    }
}

impl Eq for CycInt {}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.canonical();
        let terms: Vec<String> = c
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(k, a)| match k {
                0 => a.to_string(),
                1 => format!("{a}ζ"),
                _ => format!("{a}ζ^{k}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// `Some(n)` when a big integer fits an `i64`.
pub fn small(n: &BigInt) -> Option<i64> {
    if n.abs() < BigInt::from(i64::MAX) {
        n.to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        let p105 = cyclotomic_poly(105);
        assert_eq!(p105.len() - 1, 48);
        assert_eq!(p105[7], -2);
    }

    #[test]
    fn cyclotomic_polynomials_divide_xm_minus_1() {
        for m in 1..=60u32 {
            let f = cyclotomic_poly(m);
            assert_eq!(f.len() as u64 - 1, crate::numth::euler_phi(m as u64));
            assert_eq!(*f.last().unwrap(), 1);
            let mut xm = vec![0i64; m as usize + 1];
            xm[0] = -1;
            xm[m as usize] = 1;
            let q = exact_div(&xm, &f);
            // multiply back
            let mut back = vec![0i64; m as usize + 1];
            for (i, a) in q.iter().enumerate() {
                for (j, b) in f.iter().enumerate() {
                    back[i + j] += a * b;
                }
            }
            assert_eq!(back, xm);
            // Φ_m(ζ) = 0
            assert!(CycInt::from_coeffs(m, f.iter().copied()).is_zero());
        }
    }

    #[test]
    fn small_identities() {
        let one_z_z2 = CycInt::from_coeffs(3, [1, 1, 1]);
        assert_eq!(one_z_z2.as_rational_integer(), Some(BigInt::zero()));
        let z4 = CycInt::zeta_pow(4, 1);
        assert_eq!(z4.try_mul(&z4).unwrap(), CycInt::from_int(4, -1));
        let z12 = CycInt::zeta_pow(12, 4);
        let cube = z12.try_mul(&z12).unwrap().try_mul(&z12).unwrap();
        assert_eq!(cube.as_rational_integer(), Some(BigInt::one()));
        assert_eq!(CycInt::zeta_pow(4, 2).as_rational_integer(), Some(BigInt::from(-1)));
        assert_eq!(CycInt::zeta_pow(5, 1).as_rational_integer(), None);
        assert_eq!(CycInt::from_int(7, 5).conjugate(), CycInt::from_int(7, 5));
        assert_eq!(CycInt::zeta_pow(3, 1).conjugate(), CycInt::zeta_pow(3, 2));
        assert_eq!(
            CycInt::zero(3).try_add(&CycInt::zero(4)),
            Err(Error::MismatchedOrder(3, 4))
        );
        assert_eq!(CycInt::from_int(1, 9).as_rational_integer(), Some(BigInt::from(9)));
    }

    #[test]
    fn lift_preserves_values() {
        let a = CycInt::from_coeffs(3, [2, -1, 5]);
        let b = CycInt::from_coeffs(3, [0, 4, 1]);
        let ab = a.try_mul(&b).unwrap().lift(4);
        assert_eq!(a.lift(4).try_mul(&b.lift(4)).unwrap(), ab);
    }

    fn pair() -> impl Strategy<Value = (CycInt, CycInt)> {
        (1u32..40).prop_flat_map(|m| {
            let v = proptest::collection::vec(-50i64..50, m as usize);
            (v.clone(), v).prop_map(move |(a, b)| (CycInt::from_coeffs(m, a), CycInt::from_coeffs(m, b)))
        })
    }

    proptest! {
        #[test]
        fn reduction_is_a_ring_homomorphism((a, b) in pair()) {
            let ab = a.try_mul(&b).unwrap();
            prop_assert_eq!(ab.canonical(), a.reduce().try_mul(&b.reduce()).unwrap().canonical());
            let s = a.try_add(&b).unwrap();
            prop_assert_eq!(s.canonical(), a.reduce().try_add(&b.reduce()).unwrap().canonical());
            let once = a.reduce();
            let twice = once.reduce();
            prop_assert_eq!(twice.coeffs(), once.coeffs());
            prop_assert_eq!(a.conjugate().conjugate(), a.clone());
            prop_assert_eq!(ab.conjugate(), a.conjugate().try_mul(&b.conjugate()).unwrap());
        }
    }
}
