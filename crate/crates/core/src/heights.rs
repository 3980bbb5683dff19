//! Height pairing on the visible subgroup and its discriminants.
//!
//! Heights are normalized by `log |F_p(μ_d)|`, so every value is rational.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::groupring::{self, free_quotient_basis, ideal_basis, splitting_rho, IntElem};
use crate::linalg::{self, IntMatrix, RatMatrix};
use crate::numth;
use crate::{Error, Result};

fn require(d: u32, r: u32) -> Result<()> {
    if d < 3 || r < 2 || d % r != 0 {
        return Err(Error::Regime(format!("need d ≥ 3, r ≥ 2 and r | d (d = {d}, r = {r})")));
    }
    Ok(())
}

fn q(n: i64, m: i64) -> BigRational {
    BigRational::new(n.into(), m.into())
}

/// Whether `d = p^ν + 1` for a prime `p`, the range where the table is
/// proved to be the canonical height.
pub fn proved_regime(d: u32) -> bool {
    d >= 3 && numth::prime_power(d as u64 - 1).is_some()
}

/// The case value `c(i, j)` with `⟨P_ij, P_00⟩ = -(d-1)/(rd) · c(i, j)`.
fn height_case(d: u32, r: u32, i: i64, j: i64) -> i64 {
    let (di, ri) = (d as i64, r as i64);
    let (i, j) = (i.rem_euclid(di), j.rem_euclid(ri));
    match (i, j) {
        (0, 0) => -(ri - 1) * (di - 2),
        (_, 0) if i % ri != 0 => ri - 2,
        (_, 0) => 2 * ri - 2,
        (0, _) => di - 2,
        _ if (i + j) % ri == 0 => ri - 2,
        _ => -2,
    }
}

/// `⟨P_ij, P_00⟩`.
pub fn height_pair(d: u32, r: u32, (i, j): (i64, i64)) -> Result<BigRational> {
    require(d, r)?;
    let (di, ri) = (d as i64, r as i64);
    Ok(q(-(di - 1) * height_case(d, r, i, j), ri * di))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightTable {
    pub d: u32,
    pub r: u32,
    /// `h[i + d·j] = ⟨P_ij, P_00⟩`.
    pub h: Vec<BigRational>,
    pub proved_regime: bool,
}

pub fn height_table(d: u32, r: u32) -> Result<HeightTable> {
    require(d, r)?;
    let h = (0..r as i64)
        .flat_map(|j| (0..d as i64).map(move |i| (i, j)))
        .map(|x| height_pair(d, r, x))
        .collect::<Result<_>>()?;
    Ok(HeightTable { d, r, h, proved_regime: proved_regime(d) })
}

/// `rd · (d-1)^{-1} · ⟨P_x, P_y⟩` as integers, in the monomial order.
fn scaled_gram(d: u32, r: u32) -> IntMatrix {
    let n = (d * r) as usize;
    let at = |x: usize| ((x % d as usize) as i64, (x / d as usize) as i64);
    (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    let ((i, j), (k, l)) = (at(x), at(y));
                    BigInt::from(-height_case(d, r, i - k, j - l))
                })
                .collect()
        })
        .collect()
}

/// The `rd × rd` Gram matrix `⟨P_ij, P_i'j'⟩ = h(i - i', j - j')`.
pub fn gram_matrix(d: u32, r: u32) -> Result<RatMatrix> {
    require(d, r)?;
    let scale = q(d as i64 - 1, (d * r) as i64);
    Ok(scaled_gram(d, r)
        .into_iter()
        .map(|row| row.into_iter().map(|x| BigRational::from_integer(x) * &scale).collect())
        .collect())
}

pub fn gram_rank(d: u32, r: u32) -> Result<usize> {
    require(d, r)?;
    Ok(linalg::rank_int(&scaled_gram(d, r)))
}

/// `G · v = 0` for every ideal basis row `v`.
pub fn kernel_contains_ideal(d: u32, r: u32) -> Result<bool> {
    require(d, r)?;
    let g = scaled_gram(d, r);
    let rows = ideal_basis(d, r).matrix();
    Ok(rows.iter().all(|v| {
        g.iter()
            .all(|grow| grow.iter().zip(v).map(|(a, b)| a * b).sum::<BigInt>().is_zero())
    }))
}

/// `h(i, j) = (d-1) · ⟨σ^iτ^j, 1⟩` for all `rd` pairs.
pub fn proportionality_check(d: u32, r: u32) -> Result<bool> {
    require(d, r)?;
    let factor = BigRational::from_integer((d as i64 - 1).into());
    for j in 0..r as i64 {
        for i in 0..d as i64 {
            let h = height_pair(d, r, (i, j))?;
            let g = groupring::group_pairing(d, r, (i, j))?;
            if h != &g * &factor {
                return Err(Error::Mismatch(format!("h({i},{j}) = {h} but (d-1)·g = {}", g * &factor)));
            }
        }
    }
    Ok(true)
}

fn big_pow(b: u64, e: u32) -> BigInt {
    BigInt::from(b).pow(e)
}

/// `r^{d+2} d^{2r-2}`.
pub fn disc_ideal_closed(d: u32, r: u32) -> BigInt {
    big_pow(r as u64, d + 2) * big_pow(d as u64, 2 * r - 2)
}

/// Gram determinant of `α_i = σ^iΣτ^j`, `β_j = (τ^j - 1)Σσ^i`,
/// `γ_j = (τ^j - 1)Σσ^iτ^{d-i}` under the Euclidean pairing on `R`.
pub fn disc_ideal_lattice(d: u32, r: u32) -> BigInt {
    let ss = groupring::sum_sigma(d, r);
    let st = groupring::sum_tau(d, r);
    let tw = groupring::twisted_sum(d, r);
    let one = IntElem::monomial(d, r, 0, 0);
    let mut basis: Vec<IntElem> = (0..d as i64).map(|i| st.shift(i, 0)).collect();
    basis.extend((1..r as i64).map(|j| one.shift(0, j).sub(&one).mul(&ss)));
    basis.extend((1..r as i64).map(|j| one.shift(0, j).sub(&one).mul(&tw)));
    let gram: IntMatrix = basis.iter().map(|a| basis.iter().map(|b| a.dot(b)).collect()).collect();
    linalg::det_int(&gram)
}

/// `det(I) = r^{d+2} d^{2r-2}`, checked against the lattice determinant.
pub fn disc_ideal(d: u32, r: u32) -> Result<BigInt> {
    require(d, r)?;
    let closed = disc_ideal_closed(d, r);
    let lattice = disc_ideal_lattice(d, r);
    if closed != lattice {
        return Err(Error::Mismatch(format!("det(I): closed form {closed}, lattice {lattice}")));
    }
    Ok(closed)
}

/// `r^{4-d} d^{2-2r}`.
pub fn disc_w_closed(d: u32, r: u32) -> BigRational {
    let num = big_pow(r as u64, 4u32.saturating_sub(d));
    let den = big_pow(r as u64, d.saturating_sub(4)) * big_pow(d as u64, 2 * r - 2);
    BigRational::new(num, den)
}

/// `(d-1)^{(r-1)(d-2)} r^{4-d} d^{2-2r}`.
pub fn disc_v_closed(d: u32, r: u32) -> BigRational {
    let rank = (r - 1) * (d - 2);
    BigRational::from_integer(big_pow(d as u64 - 1, rank)) * disc_w_closed(d, r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeDiscriminants {
    /// `det(W/tor)` from the Euclidean Gram of `ρ` applied to a basis of
    /// `(R/I)/tor`.
    pub w_mod_torsion: BigRational,
    /// `det(V/tor) = (d-1)^{rank} det(W/tor)`.
    pub v_mod_torsion: BigRational,
    /// `det(V/tor)` again, from the height table directly on the same basis.
    pub v_from_heights: BigRational,
    /// Leading principal minors of the height Gram on that basis.
    pub minors_positive: bool,
    /// `|W_tor|` from the Smith form.
    pub torsion_order: BigInt,
    pub rank: usize,
}

pub fn lattice_discriminants(d: u32, r: u32) -> Result<LatticeDiscriminants> {
    require(d, r)?;
    let basis = free_quotient_basis(d, r);
    let n = basis.len();
    let rd = BigInt::from(d * r);
    // ρ has denominators dividing rd
    let embedded: Vec<Vec<BigInt>> = basis
        .iter()
        .map(|z| {
            let rho = splitting_rho(&z.to_rational())?;
            Ok(rho
                .coeffs()
                .iter()
                .map(|c| {
                    let v = c * BigRational::from_integer(rd.clone());
                    debug_assert!(v.is_integer());
                    v.to_integer()
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let euclid: IntMatrix = embedded
        .iter()
        .map(|a| embedded.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
        .collect();
    let w = BigRational::new(linalg::det_int(&euclid), rd.pow(2 * n as u32));
    let rank = (r - 1) * (d - 2);
    let v = BigRational::from_integer(big_pow(d as u64 - 1, rank)) * &w;

    let g = scaled_gram(d, r);
    let gz: Vec<Vec<BigInt>> = basis
        .iter()
        .map(|z| g.iter().map(|row| row.iter().zip(z.coeffs()).map(|(a, b)| a * b).sum()).collect())
        .collect();
    let heights: IntMatrix = basis
        .iter()
        .map(|a| gz.iter().map(|gb| a.coeffs().iter().zip(gb).map(|(x, y)| x * y).sum()).collect())
        .collect();
    // entries are ⟨·,·⟩ · rd / (d-1)
    let scale = BigRational::new(BigInt::from(d - 1), rd.clone());
    let v_h = BigRational::from_integer(linalg::det_int(&heights)) * scale.pow(n as i32);
    let minors_positive = (1..=n).all(|k| {
        let sub: IntMatrix = heights[..k].iter().map(|row| row[..k].to_vec()).collect();
        linalg::det_int(&sub) > BigInt::zero()
    });
    let torsion_order = groupring::torsion_structure(d, r)?.order();
    Ok(LatticeDiscriminants {
        w_mod_torsion: w,
        v_mod_torsion: v,
        v_from_heights: v_h,
        minors_positive,
        torsion_order,
        rank: n,
    })
}

/// `det(V/tor)`, checked against the lattice computation, the height-table
/// Gram and `det(W/tor) · det(I) = |W_tor|^2`.
pub fn disc_v_mod_torsion(d: u32, r: u32) -> Result<BigRational> {
    require(d, r)?;
    let closed = disc_v_closed(d, r);
    let lat = lattice_discriminants(d, r)?;
    if lat.v_mod_torsion != closed || lat.v_from_heights != closed {
        return Err(Error::Mismatch(format!(
            "det(V/tor): closed {closed}, lattice {}, heights {}",
            lat.v_mod_torsion, lat.v_from_heights
        )));
    }
    let reciprocal = &lat.w_mod_torsion * BigRational::from_integer(disc_ideal(d, r)?);
    if reciprocal != BigRational::from_integer(lat.torsion_order.pow(2)) {
        return Err(Error::Identity(format!("det(W/tor)·det(I) = {reciprocal} ≠ |W_tor|^2")));
    }
    if !lat.minors_positive {
        return Err(Error::Identity("height Gram on (R/I)/tor is not positive definite".into()));
    }
    Ok(closed)
}

/// `r^6 = |W_tor|^2` when `r | d`.
pub fn torsion_order_squared(r: u32) -> BigRational {
    BigRational::from_integer(big_pow(r as u64, 6))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn height_examples() {
        assert_eq!(height_pair(3, 3, (0, 0)).unwrap(), q(4, 9));
        assert_eq!(height_pair(3, 3, (0, 1)).unwrap(), q(-2, 9));
        assert_eq!(height_pair(6, 3, (1, 1)).unwrap(), q(2 * 5, 18));
        assert!(height_pair(5, 3, (0, 0)).is_err());
    }

    #[test]
    fn gram_examples() {
        let g = gram_matrix(3, 3).unwrap();
        for (x, row) in g.iter().enumerate() {
            assert_eq!(row[x], q(4, 9));
            for (y, v) in row.iter().enumerate() {
                assert_eq!(*v, g[y][x]);
            }
        }
        assert_eq!(gram_rank(3, 3).unwrap(), 2);
        assert!(kernel_contains_ideal(3, 3).unwrap());
    }

    #[test]
    fn proportionality_examples() {
        assert_eq!(height_pair(4, 2, (0, 1)).unwrap(), q(-6, 8));
        assert_eq!(groupring::group_pairing(4, 2, (0, 1)).unwrap() * q(3, 1), q(-6, 8));
        assert!(proportionality_check(3, 3).unwrap());
        assert!(proportionality_check(6, 3).unwrap());
    }

    #[test]
    fn ideal_discriminants() {
        assert_eq!(disc_ideal(3, 3).unwrap(), BigInt::from(19683));
        assert_eq!(disc_ideal(4, 2).unwrap(), BigInt::from(1024));
        assert_eq!(disc_ideal(6, 3).unwrap(), BigInt::from(6561u64 * 1296));
    }

    #[test]
    fn v_discriminants() {
        assert_eq!(disc_v_mod_torsion(3, 3).unwrap(), q(4, 27));
        assert_eq!(disc_v_mod_torsion(4, 2).unwrap(), q(9, 16));
        let lat = lattice_discriminants(4, 4).unwrap();
        assert_eq!(
            &lat.w_mod_torsion * BigRational::from_integer(disc_ideal(4, 4).unwrap()),
            torsion_order_squared(4)
        );
    }

    #[test]
    fn regime_flag() {
        assert!(proved_regime(3) && proved_regime(4) && proved_regime(9) && proved_regime(10));
        assert!(!proved_regime(7) && !proved_regime(11));
    }
}
