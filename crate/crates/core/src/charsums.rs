//! Multiplicative characters, Jacobi sums and the local traces `a_β`.
//!
//! Characters are normalized by the field generator `g`: `χ_i(g^k) = ζ_d^{ik}`.
//! A nontrivial character vanishes at 0 and the trivial one takes the value 1
//! there.

mod additive;

use num_bigint::BigInt;

use crate::cyclotomic::{small, CycInt};
use crate::ffield::{Elem, FieldTable};
use crate::numth;
use crate::{Error, Result};

use additive::AdditiveTransform;

/// Point of `P^1` over a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum P1 {
    Finite(Elem),
    Infinity,
}

/// The pair of characters `χ_i` of order dividing `d` and `ρ_j` of order
/// dividing `r` on the multiplicative group of `field`.
#[derive(Clone, Copy, Debug)]
pub struct CharPair<'a> {
    pub field: &'a FieldTable,
    pub d: u32,
    pub r: u32,
    pub i: u32,
    pub j: u32,
}

impl CharPair<'_> {
    pub fn m(&self) -> u32 {
        numth::lcm(self.d as u64, self.r as u64) as u32
    }
}

fn check_order(order: u32, exponent: u32, unit_order: u32) -> Result<()> {
    if (exponent as u64 * unit_order as u64) % order as u64 == 0 {
        Ok(())
    } else {
        Err(Error::CharacterOrder { order, exponent })
    }
}

/// `J(χ_i, ρ_j) = Σ_{u+v+1=0} χ_i(u) ρ_j(v)` in `Z[ζ_m]`, `m = lcm(d, r)`.
///
/// Only the character itself has to be defined on the field, so `d` need
/// only divide `i·(q-1)`.
pub fn jacobi_sum(pair: &CharPair) -> Result<CycInt> {
    let f = pair.field;
    let (i, j) = (pair.i % pair.d, pair.j % pair.r);
    check_order(pair.d, i, f.unit_order())?;
    check_order(pair.r, j, f.unit_order())?;
    let m = pair.m() as u64;
    let (cu, cv) = (m / pair.d as u64 * i as u64 % m, m / pair.r as u64 * j as u64 % m);
    let minus_one = f.neg(f.one());
    let mut hist = vec![0i64; m as usize];
    for u in f.elements() {
        let v = f.add(minus_one, f.neg(u));
        let eu = match u {
            0 if i != 0 => continue,
            0 => 0,
            _ => cu * f.dlog(u)? as u64 % m,
        };
        let ev = match v {
            0 if j != 0 => continue,
            0 => 0,
            _ => cv * f.dlog(v)? as u64 % m,
        };
        hist[((eu + ev) % m) as usize] += 1;
    }
    Ok(CycInt::from_coeffs(m as u32, hist))
}

/// `gcd(r, q^n - 1)`, the order of the character `φ` in the local trace.
pub fn trace_order(field: &FieldTable, r: u32) -> u32 {
    numth::gcd(r as u64, field.unit_order() as u64) as u32
}

/// Converts class counts `N_k = #{γ : φ(c(γ)) = ζ_s^k}` into the integer
/// `-Σ_k N_k Σ_{j=1}^{s-1} ζ_s^{jk}`, certified in `Z[ζ_s]`.
fn trace_from_classes(s: u32, counts: &[i64]) -> Result<i64> {
    let mut coeffs = vec![0i64; s as usize];
    for (k, &n) in counts.iter().enumerate() {
        if n != 0 {
            for j in 1..s as usize {
                coeffs[j * k % s as usize] += n;
            }
        }
    }
    let value = CycInt::from_coeffs(s, coeffs);
    let n = value
        .as_rational_integer()
        .ok_or_else(|| Error::NonIntegral(format!("local character sum {value}")))?;
    small(&-n).ok_or_else(|| Error::NonIntegral("trace overflow".into()))
}

/// The local trace at a finite fiber, for `α = β^d`, by direct summation
/// over `γ`.
pub fn finite_trace(field: &FieldTable, r: u32, alpha: Elem) -> Result<i64> {
    let s = trace_order(field, r);
    let n = field.unit_order() as u64;
    let mut counts = vec![0i64; s as usize];
    for g in field.elements() {
        let c = field.mul(
            field.pow(g, r as u64 - 1),
            field.mul(field.add(g, 1), field.add(g, alpha)),
        );
        if c != 0 {
            counts[(field.dlog(c)? as u64 % n % s as u64) as usize] += 1;
        }
    }
    trace_from_classes(s, &counts)
}

/// `a_{β,q^n}` for the fiber at `β`.
pub fn local_trace(field: &FieldTable, r: u32, d: u32, beta: P1) -> Result<i64> {
    if r as u64 % field.p() as u64 == 0 {
        return Err(Error::Characteristic { p: field.p(), what: format!("r = {r}") });
    }
    match beta {
        P1::Infinity => {
            let s = trace_order(field, r);
            Ok(numth::gcd(d as u64, s as u64) as i64 - 1)
        }
        P1::Finite(b) => finite_trace(field, r, field.pow(b, d as u64)),
    }
}

/// `1 + Σ_x #{y : y^r = x^{r-1}(x+1)(x+α)}` by enumeration.
pub fn naive_point_count(field: &FieldTable, r: u32, alpha: Elem) -> u64 {
    let mut roots = vec![0u64; field.size() as usize];
    for y in field.elements() {
        roots[field.pow(y, r as u64) as usize] += 1;
    }
    1 + field
        .elements()
        .map(|x| {
            let c = field.mul(
                field.pow(x, r as u64 - 1),
                field.mul(field.add(x, 1), field.add(x, alpha)),
            );
            roots[c as usize]
        })
        .sum::<u64>()
}

/// The finite local traces for every `α` in the field at once.
///
/// With `cl(x) = log x mod s` and `a(γ) = (r-1)cl(γ) + cl(γ+1)`, the class
/// counts `N_k(α) = #{γ : a(γ) + cl(γ+α) ≡ k}` are additive correlations of
/// indicator functions, evaluated through the transform over `(Z/p)^k`.
pub fn trace_sweep(field: &FieldTable, r: u32) -> Result<Vec<i64>> {
    let q = field.size() as usize;
    let s = trace_order(field, r) as usize;
    if s == 1 {
        return Ok(vec![0; q]);
    }
    const NONE: u32 = u32::MAX;
    let cl: Vec<u32> = field
        .elements()
        .map(|x| match field.dlog(x) {
            Ok(l) => l % s as u32,
            Err(_) => NONE,
        })
        .collect();
    let a: Vec<u32> = field
        .elements()
        .map(|g| {
            let (c0, c1) = (cl[g as usize], cl[field.add(g, 1) as usize]);
            if c0 == NONE || c1 == NONE {
                NONE
            } else {
                (((r - 1) as u64 * c0 as u64 + c1 as u64) % s as u64) as u32
            }
        })
        .collect();
    let ft = AdditiveTransform::new(field.p(), field.k());
    let modulus = ft.modulus();
    let indicator = |table: &[u32], class: usize| -> Vec<u64> {
        table.iter().map(|&c| (c as usize == class) as u64).collect()
    };
    let neg: Vec<u32> = field.elements().map(|x| field.neg(x)).collect();
    let f_hat: Vec<Vec<u64>> = (0..s)
        .map(|u| {
            let mut v = indicator(&a, u);
            ft.forward(&mut v);
            neg.iter().map(|&x| v[x as usize]).collect()
        })
        .collect();
    let g_hat: Vec<Vec<u64>> = (0..s)
        .map(|v| {
            let mut w = indicator(&cl, v);
            ft.forward(&mut w);
            w
        })
        .collect();
    let mut counts = vec![vec![0i64; s]; q];
    for k in 0..s {
        let mut h = vec![0u64; q];
        for u in 0..s {
            let (fu, gv) = (&f_hat[u], &g_hat[(k + s - u) % s]);
            for (x, slot) in h.iter_mut().enumerate() {
                *slot = (*slot + fu[x] * gv[x] % modulus) % modulus;
            }
        }
        ft.inverse(&mut h);
        for (alpha, &n) in h.iter().enumerate() {
            counts[alpha][k] = n as i64;
        }
    }
    counts.iter().map(|c| trace_from_classes(s as u32, c)).collect()
}

/// `A_n = Σ_{β ∈ P^1(F)} a_β` where `finite[α]` is the trace at `β^d = α`.
pub fn trace_total(field: &FieldTable, r: u32, d: u32, finite: &[i64]) -> Result<i64> {
    let mut total = local_trace(field, r, d, P1::Infinity)?;
    for b in field.elements() {
        total += finite[field.pow(b, d as u64) as usize];
    }
    Ok(total)
}

/// `J · conj(J)` as an integer, when it is one.
pub fn weil_norm(j: &CycInt) -> Option<BigInt> {
    j.try_mul(&j.conjugate()).ok()?.as_rational_integer()
}
