//! Explicit points `P_ij` on `y^r = x^{r-1}(x+1)(x+t)` over `F_q(u)`,
//! `t = u^d`, and the `(x - T)` descent map.

use std::sync::Arc;

use crate::ffield::{Elem, FieldCache, FieldTable};
use crate::groupring;
use crate::numth;
use crate::{Error, Result};

/// Dense polynomial in `u` over `F_q`, ascending, no trailing zeros.
pub type Poly = Vec<Elem>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn padd(f: &FieldTable, a: &[Elem], b: &[Elem]) -> Poly {
    let n = a.len().max(b.len());
    trim((0..n).map(|k| f.add(*a.get(k).unwrap_or(&0), *b.get(k).unwrap_or(&0))).collect())
}

fn psub(f: &FieldTable, a: &[Elem], b: &[Elem]) -> Poly {
    let nb: Poly = b.iter().map(|&x| f.neg(x)).collect();
    padd(f, a, &nb)
}

fn pmul(f: &FieldTable, a: &[Elem], b: &[Elem]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

fn ppow(f: &FieldTable, a: &[Elem], mut e: u64) -> Poly {
    let mut base = a.to_vec();
    let mut acc = vec![f.one()];
    while e > 0 {
        if e & 1 == 1 {
            acc = pmul(f, &acc, &base);
        }
        base = pmul(f, &base, &base);
        e >>= 1;
    }
    acc
}

fn pscale(f: &FieldTable, a: &[Elem], c: Elem) -> Poly {
    trim(a.iter().map(|&x| f.mul(x, c)).collect())
}

fn peval(f: &FieldTable, a: &[Elem], x: Elem) -> Elem {
    a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

/// Multiplicity of the root `a` in the nonzero polynomial `p`.
fn root_multiplicity(f: &FieldTable, p: &[Elem], a: Elem) -> u64 {
    let mut p = p.to_vec();
    let mut m = 0;
    while !p.is_empty() && peval(f, &p, a) == 0 {
        // synthetic division by (u - a)
        let mut q = vec![0; p.len() - 1];
        let mut carry = 0;
        for k in (1..p.len()).rev() {
            carry = f.add(p[k], f.mul(carry, a));
            q[k - 1] = carry;
        }
        p = q;
        m += 1;
    }
    m
}

/// `c · u^k`.
fn monomial(c: Elem, k: usize) -> Poly {
    let mut v = vec![0; k + 1];
    v[k] = c;
    trim(v)
}

#[derive(Clone, Debug)]
pub struct DescentInstance {
    pub p: u32,
    pub nu: u32,
    pub d: u32,
    pub r: u32,
    pub q: u64,
    pub field: Arc<FieldTable>,
    pub zeta_d: Elem,
    pub zeta_r: Elem,
}

impl DescentInstance {
    pub fn new(p: u32, nu: u32, r: u32, q: u64, fields: &FieldCache) -> Result<Self> {
        let (pq, k) = numth::prime_power(q).ok_or_else(|| Error::Invalid(format!("q = {q} is not a prime power")))?;
        if pq != p as u64 {
            return Err(Error::Invalid(format!("q = {q} is not a power of p = {p}")));
        }
        let d = (p as u64)
            .checked_pow(nu)
            .and_then(|x| u32::try_from(x + 1).ok())
            .ok_or_else(|| Error::Invalid(format!("p^ν + 1 too large (p = {p}, ν = {nu})")))?;
        if nu == 0 || r < 2 || d % r != 0 {
            return Err(Error::Regime(format!("need ν ≥ 1 and r | d = p^ν + 1 (r = {r}, d = {d})")));
        }
        if (q - 1) % d as u64 != 0 {
            return Err(Error::Regime(format!("need d | q - 1 (d = {d}, q = {q})")));
        }
        let field = fields.get(p, k)?;
        let zeta_d = field.exp((q - 1) / d as u64);
        let zeta_r = field.pow(zeta_d, (d / r) as u64);
        let inst = DescentInstance { p, nu, d, r, q, field, zeta_d, zeta_r };
        debug_assert_eq!(inst.element_order(zeta_d), d as u64);
        Ok(inst)
    }

    fn element_order(&self, a: Elem) -> u64 {
        let f = &self.field;
        (1..=f.unit_order() as u64).find(|&e| f.pow(a, e) == f.one()).unwrap_or(0)
    }

    fn zd(&self, i: i64) -> Elem {
        self.field.pow(self.zeta_d, numth::rem(i, self.d as u64))
    }

    fn zr(&self, j: i64) -> Elem {
        self.field.pow(self.zeta_r, numth::rem(j, self.r as u64))
    }

    /// `t = u^d`.
    fn t(&self) -> Poly {
        monomial(self.field.one(), self.d as usize)
    }

    fn one(&self) -> Poly {
        vec![self.field.one()]
    }

    /// The linear places `u = -ζ_d^{-k}`, `k = 0..d`.
    pub fn linear_places(&self) -> Vec<Elem> {
        (0..self.d as i64).map(|k| self.field.neg(self.zd(-k))).collect()
    }
}

/// `(x(u), y(u))` for `P_ij`, after checking `y^r = x^{r-1}(x+1)(x+u^d)`.
pub fn explicit_point(inst: &DescentInstance, i: i64, j: i64) -> Result<(Poly, Poly)> {
    let f = &inst.field;
    let x = monomial(inst.zd(i), 1);
    let x1 = padd(f, &x, &inst.one());
    let y = pscale(f, &pmul(f, &x, &ppow(f, &x1, (inst.d / inst.r) as u64)), inst.zr(j));
    let lhs = ppow(f, &y, inst.r as u64);
    let rhs = pmul(
        f,
        &pmul(f, &ppow(f, &x, inst.r as u64 - 1), &x1),
        &padd(f, &x, &inst.t()),
    );
    if lhs != rhs {
        return Err(Error::Identity(format!("P_{{{i},{j}}} is not on the curve over F_{}", inst.q)));
    }
    Ok((x, y))
}

/// A ratio of polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFn {
    pub num: Poly,
    pub den: Poly,
}

impl RatFn {
    fn poly(p: Poly) -> Self {
        RatFn { num: p, den: Vec::new() }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.den.is_empty() {
            self.den = vec![1];
        }
        self
    }

    fn mul(&self, o: &Self, f: &FieldTable) -> Self {
        RatFn { num: pmul(f, &self.num, &o.num), den: pmul(f, &self.den, &o.den) }
    }

    fn div(&self, o: &Self, f: &FieldTable) -> Self {
        RatFn { num: pmul(f, &self.num, &o.den), den: pmul(f, &self.den, &o.num) }
    }

    fn pow(&self, e: u64, f: &FieldTable) -> Self {
        RatFn { num: ppow(f, &self.num, e), den: ppow(f, &self.den, e) }
    }

    /// Valuation at `u = a`.
    pub fn valuation(&self, f: &FieldTable, a: Elem) -> i64 {
        root_multiplicity(f, &self.num, a) as i64 - root_multiplicity(f, &self.den, a) as i64
    }
}

/// A class in `∏_{Q ∈ {Q_0, Q_1, Q_t}} K^×/K^{×r}`, by representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KdClassTriple {
    pub v0: RatFn,
    pub v1: RatFn,
    pub vt: RatFn,
}

impl KdClassTriple {
    fn unit(inst: &DescentInstance) -> Self {
        let one = RatFn::poly(inst.one());
        KdClassTriple { v0: one.clone(), v1: one.clone(), vt: one }
    }

    fn mul(&self, o: &Self, f: &FieldTable) -> Self {
        KdClassTriple { v0: self.v0.mul(&o.v0, f), v1: self.v1.mul(&o.v1, f), vt: self.vt.mul(&o.vt, f) }
    }

    fn pow(&self, e: u64, f: &FieldTable) -> Self {
        KdClassTriple { v0: self.v0.pow(e, f), v1: self.v1.pow(e, f), vt: self.vt.pow(e, f) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DescentArg {
    Point(i64, i64),
    Q1,
    Q2,
    /// A divisor linearly equivalent to `Q_∞` supported away from `Δ`.
    DInfinity,
}

/// The points of `Q_2 = Σ_j Σ_{k ≤ r-1-j} Σ_{i ≡ k (r)} P_ij`, with multiplicity.
pub fn q2_support(d: u32, r: u32) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for j in 0..r as i64 {
        for k in 0..r as i64 - j {
            out.extend((0..d as i64).filter(|i| i % r as i64 == k).map(|i| (i, j)));
        }
    }
    out
}

pub fn xt_image(inst: &DescentInstance, arg: DescentArg) -> Result<KdClassTriple> {
    let f = &*inst.field;
    Ok(match arg {
        DescentArg::Point(i, j) => {
            let (x, _) = explicit_point(inst, i, j)?;
            KdClassTriple {
                v0: RatFn::poly(x.clone()),
                v1: RatFn::poly(padd(f, &x, &inst.one())),
                vt: RatFn::poly(padd(f, &x, &inst.t())),
            }
        }
        DescentArg::Q1 => {
            let one_minus_t = psub(f, &inst.one(), &inst.t());
            KdClassTriple {
                v0: RatFn::poly(vec![f.neg(f.one())]),
                v1: RatFn { num: inst.one(), den: one_minus_t },
                vt: RatFn::poly(psub(f, &inst.t(), &inst.one())),
            }
        }
        DescentArg::Q2 => {
            let mut acc = KdClassTriple::unit(inst);
            let mut mult = vec![0u64; inst.d as usize];
            for (i, j) in q2_support(inst.d, inst.r) {
                explicit_point(inst, i, j)?;
                mult[i as usize] += 1;
            }
            for (i, &m) in mult.iter().enumerate() {
                let img = xt_image(inst, DescentArg::Point(i as i64, 0))?;
                acc = acc.mul(&img.pow(m, f), f);
            }
            acc
        }
        DescentArg::DInfinity => KdClassTriple::unit(inst),
    })
}

/// `k`-th entry: valuation of `v_1` at `u = -ζ_d^{-k}`, mod `r`.
pub fn pr_projection(inst: &DescentInstance, triple: &KdClassTriple) -> Vec<u32> {
    inst.linear_places()
        .into_iter()
        .map(|a| numth::rem(triple.v1.valuation(&inst.field, a), inst.r as u64) as u32)
        .collect()
}

/// Valuations of `v_1 v_t / v_0` at the linear places and at `u = 0`, mod `r`.
pub fn norm_relation_holds(inst: &DescentInstance, triple: &KdClassTriple) -> bool {
    let f = &*inst.field;
    let w = triple.v1.mul(&triple.vt, f).div(&triple.v0, f);
    let mut places = inst.linear_places();
    places.push(0);
    places.iter().all(|&a| w.valuation(f, a) % inst.r as i64 == 0)
}

/// Rank over `F_ℓ` of a matrix with entries in `[0, ℓ)`.
pub fn rank_mod(rows: &[Vec<u32>], ell: u32) -> usize {
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect();
    let l = ell as u64;
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&i| a[i][c] % l != 0) else { continue };
        a.swap(piv, rank);
        let inv = numth::pow_mod(a[rank][c], l - 2, l);
        for x in a[rank].iter_mut() {
            *x = *x * inv % l;
        }
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let m = a[i][c];
                for k in 0..cols {
                    a[i][k] = (a[i][k] + l * l - m * a[rank][k] % l) % l;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentBound {
    /// Rank over `Z[ζ_r]`: `d - 2`.
    pub rank_over_zeta: u32,
    /// Rank over `Z`: `(r-1)(d-2)`.
    pub z_rank: u32,
    pub pr_matrix: Vec<Vec<u32>>,
    pub pr_matrix_rank: usize,
    pub pr_q1: Vec<u32>,
    pub pr_q2: Vec<u32>,
    pub torsion_rank: usize,
    /// `dim (M/N)[φ] = 0` is taken as given, not certified.
    pub conditional: bool,
}

pub fn descent_rank_bound(inst: &DescentInstance) -> Result<DescentBound> {
    if !numth::is_prime(inst.r as u64) || inst.r == 2 {
        return Err(Error::Regime(format!("descent needs r an odd prime (r = {})", inst.r)));
    }
    let pr_matrix: Vec<Vec<u32>> = (0..inst.d as i64)
        .map(|i| Ok(pr_projection(inst, &xt_image(inst, DescentArg::Point(i, 0))?)))
        .collect::<Result<_>>()?;
    let pr_matrix_rank = rank_mod(&pr_matrix, inst.r);
    if pr_matrix_rank != inst.d as usize {
        return Err(Error::Identity(format!("pr-matrix has rank {pr_matrix_rank} < d = {}", inst.d)));
    }
    let pr_q1 = pr_projection(inst, &xt_image(inst, DescentArg::Q1)?);
    let pr_q2 = pr_projection(inst, &xt_image(inst, DescentArg::Q2)?);
    let torsion_rank = rank_mod(&[pr_q1.clone(), pr_q2.clone()], inst.r);
    if torsion_rank != 2 {
        return Err(Error::Identity("pr images of Q_1 and Q_2 are dependent".into()));
    }
    // ρ = dim L + dim (M/N)[φ] - dim M[φ] = d + 0 - 2
    let rank_over_zeta = inst.d - 2;
    Ok(DescentBound {
        rank_over_zeta,
        z_rank: (inst.r - 1) * rank_over_zeta,
        pr_matrix,
        pr_matrix_rank,
        pr_q1,
        pr_q2,
        torsion_rank,
        conditional: true,
    })
}

fn point_vanishes(inst: &DescentInstance, g: impl Fn(&Poly, &Poly) -> Poly, i: i64, j: i64) -> Result<bool> {
    let (x, y) = explicit_point(inst, i, j)?;
    Ok(g(&x, &y).is_empty())
}

/// Zero sets of `x - ζ_d^i u`, `Δ_j` and `Γ_j` on the points `P_i'j'`.
pub fn vanishing_checks(inst: &DescentInstance) -> Result<bool> {
    let f = &*inst.field;
    let (d, r) = (inst.d as i64, inst.r as i64);
    let dr = (d / r) as u64;
    let u_pow = |k: u64| monomial(f.one(), k as usize);
    for a in 0..d.max(r) {
        let line = |x: &Poly, _: &Poly| psub(f, x, &monomial(inst.zd(a), 1));
        let delta = |x: &Poly, y: &Poly| {
            let x1 = padd(f, x, &inst.one());
            psub(f, &pscale(f, y, inst.zd(-a * d / r)), &pmul(f, x, &ppow(f, &x1, dr)))
        };
        let gamma = |x: &Poly, y: &Poly| {
            let x1 = padd(f, x, &inst.one());
            let lhs = pmul(f, &pscale(f, y, inst.zd(-a * d / r)), &ppow(f, x, dr - 1));
            psub(f, &lhs, &pmul(f, &u_pow(dr), &ppow(f, &x1, dr)))
        };
        for i in 0..d {
            for j in 0..r {
                let checks = [
                    (a < d, point_vanishes(inst, line, i, j)?, i == a),
                    (a < r, point_vanishes(inst, delta, i, j)?, j == a),
                    (a < r, point_vanishes(inst, gamma, i, j)?, (i + j - a).rem_euclid(r) == 0),
                ];
                for (active, got, want) in checks {
                    if active && got != want {
                        return Err(Error::Identity(format!(
                            "zero set mismatch at P_{{{i},{j}}} for index {a} over F_{}",
                            inst.q
                        )));
                    }
                }
            }
        }
    }
    Ok(true)
}

/// The torsion subgroup `⟨Q_0, Q_1, Q_2⟩` has order `r^3`, matching the
/// torsion of `R/I`.
pub fn torsion_consistency(inst: &DescentInstance) -> Result<bool> {
    let t = groupring::torsion_structure(inst.d, inst.r)?;
    let predicted: Vec<u64> = groupring::predicted_torsion(inst.r).into_iter().filter(|&x| x > 1).collect();
    let got: Vec<u64> = t.factors.iter().map(|x| u64::try_from(x).unwrap_or(0)).collect();
    let r3 = (inst.r as u64).pow(3);
    if got != predicted || t.order() != num_bigint::BigInt::from(r3) {
        return Err(Error::Mismatch(format!("torsion {got:?} vs predicted {predicted:?}, order r^3 = {r3}")));
    }
    Ok(true)
}
