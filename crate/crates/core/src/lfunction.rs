//! Orbits of character exponents, the L-function by two independent routes,
//! and ranks.
//!
//! `L(T)` is a polynomial in `T = q^{-s}`. The closed form multiplies
//! `1 - J_o^2 T^{|o|}` over Frobenius orbits `o`; the brute-force route
//! exponentiates the generating series of summed local traces.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::charsums::{jacobi_sum, trace_sweep, trace_total, weil_norm, CharPair};
use crate::cyclotomic::CycInt;
use crate::ffield::{FieldCache, FieldTable};
use crate::numth;
use crate::{Error, Result};

pub type Pair = (u32, u32);

/// `(d-1)(r-1) - (gcd(d,r) - 1)`, the size of `S` and the degree of `L`.
pub fn degree_bound(d: u32, r: u32) -> u64 {
    (d as u64 - 1) * (r as u64 - 1) - (numth::gcd(d as u64, r as u64) - 1)
}

/// `i ≠ 0`, `j ≠ 0` and `<i/d> + <j/r> ∉ Z`.
pub fn in_s(d: u32, r: u32, (i, j): Pair) -> bool {
    i % d != 0 && j % r != 0 && ((i % d) * r + (j % r) * d) % (d * r) != 0
}

/// `<i/d> + <j/r> > 1`.
fn in_a(d: u32, r: u32, (i, j): Pair) -> bool {
    (i % d) * r + (j % r) * d > d * r
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitSet {
    pub q: u64,
    pub d: u32,
    pub r: u32,
    pub s: Vec<Pair>,
    /// Each orbit starts at its smallest element and follows `x ↦ qx`;
    /// orbits are ordered by that element.
    pub orbits: Vec<Vec<Pair>>,
}

fn characteristic(q: u64) -> Result<u64> {
    numth::prime_power(q)
        .map(|(p, _)| p)
        .ok_or_else(|| Error::Invalid(format!("q = {q} is not a prime power")))
}

fn closure(d: u32, r: u32, start: Pair, mult: u64) -> Vec<Pair> {
    let mut out = vec![start];
    loop {
        let (i, j) = *out.last().unwrap();
        let next = ((i as u64 * mult % d as u64) as u32, (j as u64 * mult % r as u64) as u32);
        if next == start {
            return out;
        }
        out.push(next);
    }
}

pub fn orbit_decomposition(q: u64, d: u32, r: u32) -> Result<OrbitSet> {
    let p = characteristic(q)?;
    if (d as u64 * r as u64) % p == 0 {
        return Err(Error::Characteristic { p: p as u32, what: format!("rd = {}", d * r) });
    }
    let s: Vec<Pair> = (0..d)
        .flat_map(|i| (0..r).map(move |j| (i, j)))
        .filter(|&x| in_s(d, r, x))
        .collect();
    let mut seen = vec![false; (d * r) as usize];
    let mut orbits = Vec::new();
    for &x in &s {
        if seen[(x.0 * r + x.1) as usize] {
            continue;
        }
        let o = closure(d, r, x, q);
        for y in &o {
            seen[(y.0 * r + y.1) as usize] = true;
        }
        orbits.push(o);
    }
    Ok(OrbitSet { q, d, r, s, orbits })
}

/// Whether the `<p>`-saturation of `orbit` meets `A` and `B` equally after
/// every unit translation modulo `lcm(d, r)`.
pub fn is_balanced(orbit: &[Pair], set: &OrbitSet, p: u64) -> bool {
    let (d, r) = (set.d, set.r);
    let mut sat: Vec<Pair> = Vec::new();
    for &x in orbit {
        for y in closure(d, r, x, p) {
            if !sat.contains(&y) {
                sat.push(y);
            }
        }
    }
    let m = numth::lcm(d as u64, r as u64);
    (1..=m).filter(|&t| numth::gcd(t, m) == 1).all(|t| {
        let in_a_count = sat
            .iter()
            .filter(|&&(i, j)| in_a(d, r, ((t * i as u64 % d as u64) as u32, (t * j as u64 % r as u64) as u32)))
            .count();
        2 * in_a_count == sat.len()
    })
}

pub fn balanced_count(set: &OrbitSet) -> Result<usize> {
    let p = characteristic(set.q)?;
    Ok(set.orbits.iter().filter(|o| is_balanced(o, set, p)).count())
}

/// Integer polynomial in `T = q^{-s}`, ascending coefficients, no trailing
/// zeros (the zero polynomial is empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPoly {
    pub q: u64,
    pub coeffs: Vec<BigInt>,
}

impl LPoly {
    pub fn new(q: u64, mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        LPoly { q, coeffs }
    }

    pub fn from_ints(q: u64, coeffs: &[i64]) -> Self {
        Self::new(q, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * t + BigRational::from_integer(c.clone()))
    }
}

impl std::fmt::Display for LPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            let body = match (k, mag.is_one()) {
                (0, _) => mag.to_string(),
                (1, true) => "T".into(),
                (1, false) => format!("{mag}T"),
                (_, true) => format!("T^{k}"),
                _ => format!("{mag}T^{k}"),
            };
            if first {
                write!(f, "{sign}{body}")?;
            } else {
                write!(f, " {sign} {body}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// Product of `1 - J_o^2 T^{|o|}`; `field_for` supplies `F_{q^f}` for an
/// orbit of size `f`.
fn orbit_product(set: &OrbitSet, mut field_for: impl FnMut(u32) -> Result<Arc<FieldTable>>) -> Result<LPoly> {
    let (d, r, q) = (set.d, set.r, set.q);
    let m = numth::lcm(d as u64, r as u64) as u32;
    let deg = set.s.len();
    let mut poly = vec![CycInt::zero(m); deg + 1];
    poly[0] = CycInt::from_int(m, 1);
    let mut top = 0;
    for o in &set.orbits {
        let f = o.len();
        let field = field_for(f as u32)?;
        let (i, j) = o[0];
        let js = jacobi_sum(&CharPair { field: &field, d, r, i, j })?;
        let size = BigInt::from(q).pow(f as u32);
        if weil_norm(&js) != Some(size.clone()) {
            return Err(Error::WeilSize(format!("J for {:?} over F_{size} is {js}", o[0])));
        }
        let sq = js.try_mul(&js)?;
        for k in (f..=top + f).rev() {
            let term = sq.try_mul(&poly[k - f])?;
            poly[k] = poly[k].try_sub(&term)?;
        }
        top += f;
    }
    let coeffs = poly
        .iter()
        .map(|c| {
            c.as_rational_integer()
                .ok_or_else(|| Error::NonIntegral(format!("L-function coefficient {c}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LPoly::new(q, coeffs))
}

#[allow(non_snake_case)]
pub fn closed_form_L(q: u64, d: u32, r: u32, fields: &FieldCache) -> Result<LPoly> {
    let set = orbit_decomposition(q, d, r)?;
    orbit_product(&set, |f| fields.extension(q, f))
}

/// The closed form with every field's generator replaced by `g^{a}`, where
/// `a = choose(field)` must be prime to `|F^×|`. `choose` is called once per
/// field, so orbits of equal size share one character.
#[allow(non_snake_case)]
pub fn closed_form_L_with_generators(
    q: u64,
    d: u32,
    r: u32,
    fields: &FieldCache,
    mut choose: impl FnMut(&FieldTable) -> u64,
) -> Result<LPoly> {
    let set = orbit_decomposition(q, d, r)?;
    let mut chosen: HashMap<u32, Arc<FieldTable>> = HashMap::new();
    orbit_product(&set, |f| {
        if let Some(t) = chosen.get(&f) {
            return Ok(t.clone());
        }
        let base = fields.extension(q, f)?;
        let t = Arc::new(base.with_generator_power(choose(&base))?);
        chosen.insert(f, t.clone());
        Ok(t)
    })
}

/// Summed local traces `A_n` for `n = 1..=n_max`.
pub fn trace_totals(q: u64, d: u32, r: u32, n_max: u32, fields: &FieldCache) -> Result<Vec<i64>> {
    (1..=n_max)
        .map(|n| {
            let field = fields.extension(q, n)?;
            let finite = trace_sweep(&field, r)?;
            trace_total(&field, r, d, &finite)
        })
        .collect()
}

/// `exp(Σ_{n ≤ N} A_n T^n / n)` truncated at degree `N`, certified integral.
pub fn series_exp(q: u64, a: &[i64]) -> Result<LPoly> {
    // n L_n = Σ_{k=1}^{n} A_k L_{n-k}
    let mut l: Vec<BigRational> = vec![BigRational::one()];
    for n in 1..=a.len() {
        let mut acc = BigRational::zero();
        for k in 1..=n {
            acc += BigRational::from_integer(BigInt::from(a[k - 1])) * &l[n - k];
        }
        l.push(acc / BigRational::from_integer(BigInt::from(n)));
    }
    let coeffs = l
        .into_iter()
        .enumerate()
        .map(|(n, c)| {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(Error::NonIntegral(format!("series coefficient {n} is {c}")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LPoly::new(q, coeffs))
}

#[allow(non_snake_case)]
pub fn brute_force_L(q: u64, d: u32, r: u32, n: u32, fields: &FieldCache) -> Result<LPoly> {
    let p = characteristic(q)?;
    if (d as u64 * r as u64) % p == 0 {
        return Err(Error::Characteristic { p: p as u32, what: format!("rd = {}", d * r) });
    }
    let bound = degree_bound(d, r);
    if (n as u64) < bound {
        return Err(Error::Invalid(format!("truncation {n} is below the degree bound {bound}")));
    }
    let a = trace_totals(q, d, r, n, fields)?;
    series_exp(q, &a)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalyticRank {
    pub rho: u32,
    pub quotient: LPoly,
    /// `M(1/q)` where `L = (1 - qT)^ρ M`.
    pub leading: BigRational,
}

pub fn analytic_rank(l: &LPoly) -> AnalyticRank {
    let q = BigInt::from(l.q);
    let at = BigRational::new(BigInt::one(), q.clone());
    let mut m = l.clone();
    let mut rho = 0;
    loop {
        let v = m.eval(&at);
        if !v.is_zero() || m.coeffs.is_empty() {
            return AnalyticRank { rho, quotient: m, leading: v };
        }
        // M = (1 - qT) M', so M'_k = M_k + q M'_{k-1}
        let mut next = Vec::with_capacity(m.coeffs.len() - 1);
        let mut prev = BigInt::zero();
        for c in &m.coeffs[..m.coeffs.len() - 1] {
            prev = c + &q * &prev;
            next.push(prev.clone());
        }
        m = LPoly::new(l.q, next);
        rho += 1;
    }
}

/// The rank formula valid when `r` and `d` divide `p^ν + 1` for some
/// `ν ≤ nu_bound`.
pub fn rank_formula(q: u64, d: u32, r: u32, nu_bound: u32) -> Result<u64> {
    let p = characteristic(q)?;
    (1..=nu_bound)
        .find(|&nu| {
            let pn = p.checked_pow(nu).map(|x| x + 1);
            pn.is_some_and(|x| x % r as u64 == 0 && x % d as u64 == 0)
        })
        .ok_or_else(|| {
            Error::Regime(format!("r = {r} and d = {d} do not both divide p^ν + 1 for ν ≤ {nu_bound}"))
        })?;
    let order = |n: u64| numth::mult_order(q % n, n).expect("q is prime to rd");
    let mut total: i64 = 0;
    for s in numth::divisors(r as u64).into_iter().filter(|&s| s > 1) {
        for e in numth::divisors(d as u64) {
            let num = numth::euler_phi(e) * numth::euler_phi(s);
            let o = order(numth::lcm(e, s));
            debug_assert_eq!(num % o, 0);
            total += (num / o) as i64;
        }
        total -= 2 * (numth::euler_phi(s) / order(s)) as i64;
    }
    u64::try_from(total).map_err(|_| Error::Identity(format!("negative rank {total}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(q: u64, c: &[i64]) -> LPoly {
        LPoly::from_ints(q, c)
    }

    #[test]
    fn orbit_examples() {
        let s = orbit_decomposition(4, 3, 3).unwrap();
        assert_eq!(s.s, vec![(1, 1), (2, 2)]);
        assert_eq!(s.orbits, vec![vec![(1, 1)], vec![(2, 2)]]);
        let s = orbit_decomposition(2, 3, 3).unwrap();
        assert_eq!(s.orbits, vec![vec![(1, 1), (2, 2)]]);
        let s = orbit_decomposition(5, 4, 2).unwrap();
        assert_eq!(s.s, vec![(1, 1), (3, 1)]);
        assert_eq!(s.orbits.len(), 2);
        assert!(orbit_decomposition(4, 3, 2).is_err());
    }

    #[test]
    fn s_has_the_predicted_size() {
        for d in 1..=12 {
            for r in 1..=12 {
                let count = (0..d).flat_map(|i| (0..r).map(move |j| (i, j))).filter(|&x| in_s(d, r, x)).count();
                assert_eq!(count as u64, degree_bound(d, r));
            }
        }
    }

    #[test]
    fn balanced_examples() {
        let s = orbit_decomposition(4, 3, 3).unwrap();
        assert!(s.orbits.iter().all(|o| is_balanced(o, &s, 2)));
        assert_eq!(balanced_count(&s).unwrap(), 2);
        // q ≡ 1 mod 7 with p = 29 ≡ 1: singleton saturations are never balanced
        let s = orbit_decomposition(29, 7, 7).unwrap();
        assert_eq!(balanced_count(&s).unwrap(), 0);
        for (p, nu, r) in [(2u64, 1u32, 3u32), (3, 1, 4), (3, 1, 2), (2, 2, 5), (5, 1, 3), (2, 3, 9), (2, 3, 3)] {
            let d = p.pow(nu) as u32 + 1;
            let q = p.pow(2 * nu);
            let s = orbit_decomposition(q, d, r).unwrap();
            assert_eq!(balanced_count(&s).unwrap(), s.orbits.len(), "{p} {nu} {r}");
        }
    }

    #[test]
    fn closed_form_examples() {
        let fc = FieldCache::default();
        assert_eq!(closed_form_L(4, 3, 3, &fc).unwrap(), l(4, &[1, -8, 16]));
        assert_eq!(closed_form_L(7, 1, 5, &fc).unwrap(), l(7, &[1]));
        let l54 = closed_form_L(5, 4, 2, &fc).unwrap();
        assert_eq!(l54.degree(), Some(2));
        assert_eq!(l54, brute_force_L(5, 4, 2, 2, &fc).unwrap());
    }

    #[test]
    fn brute_force_examples() {
        let fc = FieldCache::default();
        assert_eq!(trace_totals(4, 3, 3, 1, &fc).unwrap(), vec![-8]);
        assert_eq!(brute_force_L(4, 3, 3, 2, &fc).unwrap(), l(4, &[1, -8, 16]));
        assert_eq!(brute_force_L(3, 1, 2, 0, &fc).unwrap(), l(3, &[1]));
        assert!(brute_force_L(4, 3, 3, 1, &fc).is_err());
    }

    #[test]
    fn series_exp_rejects_non_integral_input() {
        assert!(series_exp(2, &[1, 0]).is_err());
        assert_eq!(series_exp(4, &[-8, -32]).unwrap(), l(4, &[1, -8, 16]));
    }

    #[test]
    fn analytic_rank_examples() {
        let a = analytic_rank(&l(4, &[1, -8, 16]));
        assert_eq!((a.rho, a.quotient.clone(), a.leading.clone()), (2, l(4, &[1]), BigRational::one()));
        let a = analytic_rank(&l(5, &[1]));
        assert_eq!((a.rho, a.leading.clone()), (0, BigRational::one()));
        // (1 - 3T)(1 - 2T) with q = 3
        let a = analytic_rank(&l(3, &[1, -5, 6]));
        assert_eq!(a.rho, 1);
        assert_eq!(a.leading, BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn rank_formula_examples() {
        assert_eq!(rank_formula(2, 3, 3, 8).unwrap(), 1);
        assert_eq!(rank_formula(4, 3, 3, 8).unwrap(), 2);
        assert_eq!(rank_formula(9, 4, 4, 8).unwrap(), 6);
        assert_eq!(rank_formula(16, 5, 5, 8).unwrap(), 12);
        assert!(matches!(rank_formula(7, 3, 2, 8), Err(Error::Regime(_))));
    }

    #[test]
    fn display() {
        assert_eq!(l(4, &[1, -8, 16]).to_string(), "1 - 8T + 16T^2");
    }
}
