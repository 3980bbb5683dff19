//! Local invariants of the Néron model, the Tamagawa number, and the
//! assembled Birch and Swinnerton-Dyer identity.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ffield::FieldCache;
use crate::groupring;
use crate::heights;
use crate::lfunction;
use crate::numth;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    /// `u = 0`.
    Zero,
    /// A place with `u^d = 1`.
    RootOfUnity,
    /// `u = ∞`.
    Infinity,
    Good,
}

impl Place {
    pub const ALL: [Place; 4] = [Place::Zero, Place::RootOfUnity, Place::Infinity, Place::Good];

    pub fn label(self) -> &'static str {
        match self {
            Place::Zero => "u=0",
            Place::RootOfUnity => "u^d=1",
            Place::Infinity => "u=inf",
            Place::Good => "good",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalData {
    pub place: Place,
    pub c_v: u64,
    /// Component group order; `None` unless `r | d` at `u = 0, ∞`.
    pub d_v: Option<BigInt>,
    /// Unipotent, toric and abelian dimensions.
    pub a_v: u64,
    pub m_v: u64,
    pub g_v: u64,
}

/// `(a_v, m_v, g_v)`.
fn dimensions(d: u32, r: u32, place: Place) -> (u64, u64, u64) {
    let r = r as u64;
    let g = numth::gcd(d as u64, r);
    match place {
        Place::Zero => (0, r - 1, 0),
        Place::RootOfUnity if r % 2 == 0 => ((r - 2) / 2, 1, (r - 2) / 2),
        Place::RootOfUnity => ((r - 1) / 2, 0, (r - 1) / 2),
        // the semistable reduced fiber has arithmetic genus gcd(d, r) - 1
        Place::Infinity => (r - g, g - 1, 0),
        Place::Good => (0, 0, r - 1),
    }
}

/// The conductor case table.
fn conductor_table(d: u32, r: u32, place: Place) -> u64 {
    let r = r as u64;
    match place {
        Place::Zero | Place::RootOfUnity => r - 1,
        Place::Infinity => 2 * r - numth::gcd(d as u64, r) - 1,
        Place::Good => 0,
    }
}

pub fn local_data(d: u32, r: u32, place: Place) -> Result<LocalData> {
    if d < 1 || r < 2 {
        return Err(Error::Regime(format!("need d ≥ 1 and r ≥ 2 (d = {d}, r = {r})")));
    }
    let (a_v, m_v, g_v) = dimensions(d, r, place);
    if a_v + m_v + g_v != r as u64 - 1 {
        return Err(Error::Identity(format!("a + m + g ≠ r - 1 at {}", place.label())));
    }
    let c_v = 2 * (r as u64 - 1) - 2 * g_v - m_v;
    if c_v != conductor_table(d, r, place) {
        return Err(Error::Mismatch(format!(
            "c_v at {}: {c_v} from dimensions, {} from the table",
            place.label(),
            conductor_table(d, r, place)
        )));
    }
    let d_v = match place {
        Place::Zero | Place::Infinity if d % r == 0 => {
            // (Z/rd) × (Z/d)^{r-2}
            Some(BigInt::from(r * d) * BigInt::from(d).pow(r - 2))
        }
        Place::Zero | Place::Infinity => None,
        Place::RootOfUnity => Some(BigInt::from(r)),
        Place::Good => Some(BigInt::one()),
    };
    Ok(LocalData { place, c_v, d_v, a_v, m_v, g_v })
}

/// `-4(r-1) + Σ_v c_v`, checked against `(d-1)(r-1) - (gcd(d,r) - 1)` and the
/// degree bound used by the L-function.
pub fn conductor_degree_check(d: u32, r: u32) -> Result<i64> {
    let c = |p| local_data(d, r, p).map(|l| l.c_v as i64);
    let sum = c(Place::Zero)? + d as i64 * c(Place::RootOfUnity)? + c(Place::Infinity)?;
    let lhs = -4 * (r as i64 - 1) + sum;
    let g = numth::gcd(d as u64, r as u64) as i64;
    let rhs = (d as i64 - 1) * (r as i64 - 1) - (g - 1);
    if lhs != rhs || lhs != lfunction::degree_bound(d, r) as i64 {
        return Err(Error::Identity(format!("conductor degree {lhs} ≠ {rhs} for d = {d}, r = {r}")));
    }
    Ok(lhs)
}

fn require_tamagawa(q: u64, d: u32, r: u32) -> Result<()> {
    if d < 2 || r < 2 || d % r != 0 || (q - 1) % d as u64 != 0 {
        return Err(Error::Regime(format!("need r | d and d | q - 1 (q = {q}, d = {d}, r = {r})")));
    }
    Ok(())
}

/// `Π_v d_v` over the bad places, from the local data.
pub fn component_product(d: u32, r: u32) -> Result<BigInt> {
    let dv = |p| -> Result<BigInt> {
        local_data(d, r, p)?
            .d_v
            .ok_or_else(|| Error::Regime(format!("component group at {} needs r | d", p.label())))
    };
    Ok(dv(Place::Zero)? * dv(Place::Infinity)? * dv(Place::RootOfUnity)?.pow(d))
}

fn rat_pow(base: u64, e: i64) -> BigRational {
    let b = BigRational::from_integer(base.into());
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b.recip(), (-e) as usize)
    }
}

/// `τ = q^{-(d-2)(r-1)/2} d^{2r-2} r^{d+2}`, checked against
/// `q^{(r-1) - deg ω} Π d_v` with `deg ω = d(r-1)/2`.
pub fn tamagawa(q: u64, d: u32, r: u32) -> Result<BigRational> {
    require_tamagawa(q, d, r)?;
    let (d64, r64) = (d as i64, r as i64);
    let closed = rat_pow(q, -(d64 - 2) * (r64 - 1) / 2)
        * rat_pow(d as u64, 2 * r64 - 2)
        * rat_pow(r as u64, d64 + 2);
    let deg_omega = d64 * (r64 - 1) / 2;
    let product = component_product(d, r)?;
    let expected_product = BigInt::from(d).pow(2 * r - 2) * BigInt::from(r).pow(d + 2);
    if product != expected_product {
        return Err(Error::Mismatch(format!("Π d_v = {product}, expected {expected_product}")));
    }
    let assembled = rat_pow(q, (r64 - 1) - deg_omega) * BigRational::from_integer(product);
    if assembled != closed {
        return Err(Error::Mismatch(format!("τ: closed {closed}, assembled {assembled}")));
    }
    Ok(closed)
}

/// `Π d_v · det(V/tor) / |V_tor|^2`, which must be `(d-1)^{(r-1)(d-2)}`.
pub fn integrality_quantity(d: u32, r: u32) -> Result<BigInt> {
    let product = BigRational::from_integer(component_product(d, r)?);
    let det = heights::disc_v_mod_torsion(d, r)?;
    let tor = groupring::torsion_structure(d, r)?.order();
    let value = product * det / BigRational::from_integer(tor.pow(2));
    let expected = BigInt::from(d - 1).pow((r - 1) * (d - 2));
    if !value.is_integer() || value.to_integer() != expected {
        return Err(Error::Identity(format!("integrality quantity {value} ≠ {expected}")));
    }
    Ok(expected)
}

fn require_sha(p: u32, nu: u32, q: u64, d: u32, r: u32) -> Result<()> {
    let pd = (p as u64).checked_pow(nu).map(|x| x + 1);
    if nu == 0 || pd != Some(d as u64) {
        return Err(Error::Regime(format!("need d = p^ν + 1 (p = {p}, ν = {nu}, d = {d})")));
    }
    if numth::prime_power(q).map(|x| x.0) != Some(p as u64) {
        return Err(Error::Invalid(format!("q = {q} is not a power of p = {p}")));
    }
    require_tamagawa(q, d, r)
}

/// `(q / p^{2ν})^{(r-1)(d-2)/2}`.
pub fn sha_index_ratio(p: u32, nu: u32, q: u64, d: u32, r: u32) -> Result<BigRational> {
    require_sha(p, nu, q, d, r)?;
    let base = BigRational::new(q.into(), BigInt::from(p).pow(2 * nu));
    let e = ((r - 1) * (d - 2) / 2) as usize;
    Ok(num_traits::pow(base, e))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BsdReport {
    pub l: lfunction::LPoly,
    pub rank: u32,
    /// `L*(1)` in units of `(log q)^ρ`.
    pub leading: BigRational,
    pub det_v: BigRational,
    pub tamagawa: BigRational,
    pub torsion_order: BigInt,
    /// `|Sha| / [J : V]^2` forced by the identity.
    pub value: BigRational,
    pub sha_ratio: BigRational,
}

/// Solves `L* = |Sha| R τ / |tor|^2` with `R = det(V/tor) / [J : V]^2` for
/// `|Sha| / [J : V]^2`.
pub fn bsd_consistency(p: u32, nu: u32, q: u64, d: u32, r: u32, fields: &FieldCache) -> Result<BsdReport> {
    require_sha(p, nu, q, d, r)?;
    let l = lfunction::closed_form_L(q, d, r, fields)?;
    let ar = lfunction::analytic_rank(&l);
    let expected_rank = (r - 1) * (d - 2);
    if ar.rho != expected_rank {
        return Err(Error::Mismatch(format!("analytic rank {} ≠ (r-1)(d-2) = {expected_rank}", ar.rho)));
    }
    let det_v = heights::disc_v_mod_torsion(d, r)?;
    let tau = tamagawa(q, d, r)?;
    let tor = groupring::torsion_structure(d, r)?.order();
    if tor != BigInt::from(r).pow(3) {
        return Err(Error::Mismatch(format!("|V_tor| = {tor} ≠ r^3")));
    }
    if det_v.is_zero() {
        return Err(Error::Identity("degenerate regulator".into()));
    }
    let value = &ar.leading * BigRational::from_integer(tor.pow(2)) / (&det_v * &tau);
    let sha_ratio = sha_index_ratio(p, nu, q, d, r)?;
    if value != sha_ratio {
        return Err(Error::Identity(format!("BSD value {value} ≠ (q/p^2ν)^… = {sha_ratio}")));
    }
    Ok(BsdReport {
        l,
        rank: ar.rho,
        leading: ar.leading,
        det_v,
        tamagawa: tau,
        torsion_order: tor,
        value,
        sha_ratio,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierEntry {
    pub i: u32,
    pub a: u32,
    pub b: u32,
    /// `c(t) = Σ_j C(b,j)^2 t^j` over `F_p`, ascending.
    pub c: Vec<u32>,
}

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, m| acc * BigInt::from(n - m) / BigInt::from(m + 1))
}

pub fn cartier_matrix(p: u32, r: u32) -> Result<Vec<CartierEntry>> {
    if !numth::is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if r < 2 || r % p == 0 {
        return Err(Error::Characteristic { p, what: format!("r = {r}") });
    }
    let mut seen = vec![false; r as usize];
    let mut out = Vec::with_capacity(r as usize - 1);
    for i in 1..r {
        let sols: Vec<(u32, u32)> = (1..r)
            .flat_map(|a| (0..p).map(move |b| (a, b)))
            .filter(|&(a, b)| a as i64 * p as i64 - b as i64 * r as i64 == i as i64)
            .collect();
        let &[(a, b)] = sols.as_slice() else {
            return Err(Error::Identity(format!("{} solutions of ap - br = {i}", sols.len())));
        };
        let pb = BigInt::from(p);
        let mut c: Vec<u32> = (0..=b)
            .map(|j| {
                let v = binomial(b, j).pow(2).mod_floor(&pb);
                u32::try_from(v).expect("reduced mod p")
            })
            .collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        if c.is_empty() {
            return Err(Error::Identity(format!("c(t) = 0 for p = {p}, r = {r}, i = {i}")));
        }
        if std::mem::replace(&mut seen[a as usize], true) {
            return Err(Error::Identity(format!("i ↦ a is not injective at a = {a}")));
        }
        out.push(CartierEntry { i, a, b, c });
    }
    Ok(out)
}
