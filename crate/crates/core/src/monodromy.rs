//! Primes of `Λ = F_ℓ[z]/(Ψ_r)` and `Λ⁺`, predicted monodromy groups, and
//! new-part dimensions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::numth;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitType {
    Inert,
    Split,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaPrime {
    pub ell: u64,
    pub r: u64,
    pub level: u64,
    /// Order of `ℓ` in `(Z/s)^×`.
    pub residue_degree: u64,
    /// Order of `ℓ` in `(Z/s)^× / ⟨±1⟩`.
    pub plus_residue_degree: u64,
    /// `None` at levels `s ≤ 2`, where `-1 = 1`.
    pub split_type: Option<SplitType>,
    /// Primes of `Λ` at this level.
    pub count: u64,
    /// Primes of `Λ⁺` at this level.
    pub plus_count: u64,
}

fn require(r: u64, ell: u64) -> Result<()> {
    if !numth::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if r < 2 || r % ell == 0 {
        return Err(Error::Characteristic { p: ell as u32, what: format!("ℓ must not divide r = {r}") });
    }
    Ok(())
}

fn plus_order(ell: u64, s: u64) -> u64 {
    let l = ell % s;
    (1..=s)
        .find(|&e| {
            let v = numth::pow_mod(l, e, s);
            v == 1 % s || v == s - 1
        })
        .expect("ℓ is a unit mod s")
}

pub fn lambda_decomposition(r: u64, ell: u64) -> Result<Vec<LambdaPrime>> {
    require(r, ell)?;
    let mut out = Vec::new();
    for s in numth::divisors(r).into_iter().filter(|&s| s > 1) {
        let f = numth::mult_order(ell % s, s).expect("ℓ is a unit mod s");
        let fp = plus_order(ell, s);
        let phi = numth::euler_phi(s);
        let (split_type, plus_count) = if s <= 2 {
            (None, phi / fp)
        } else {
            let t = if f == 2 * fp { SplitType::Inert } else { SplitType::Split };
            (Some(t), phi / (2 * fp))
        };
        out.push(LambdaPrime {
            ell,
            r,
            level: s,
            residue_degree: f,
            plus_residue_degree: fp,
            split_type,
            count: phi / f,
            plus_count,
        });
    }
    let total: u64 = out.iter().map(|l| l.count * l.residue_degree).sum();
    if total != r - 1 {
        return Err(Error::Identity(format!("Σ count · degree = {total} ≠ r - 1")));
    }
    Ok(out)
}

/// Primes `λ⁺` with `F_{λ⁺} ≅ F_3`.
pub fn flambda_f3_count(r: u64) -> Result<u64> {
    if r % 3 == 0 {
        return Err(Error::Characteristic { p: 3, what: format!("r = {r}") });
    }
    let table = match r % 4 {
        0 => 2,
        2 => 1,
        _ => 0,
    };
    let counted: u64 = lambda_decomposition(r, 3)?
        .iter()
        .filter(|l| l.plus_residue_degree == 1)
        .map(|l| l.plus_count)
        .sum();
    if counted != table {
        return Err(Error::Mismatch(format!("F_3 primes: table {table}, decomposition {counted}")));
    }
    Ok(table)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyFactor {
    pub label: String,
    pub level: u64,
    pub order: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monodromy {
    pub structure: String,
    /// `|G_χ|`.
    pub order: BigInt,
    pub factors: Vec<MonodromyFactor>,
    /// The untwisted group `μ_r · G_χ`; its order is not determined here.
    pub untwisted: String,
}

/// `|SL_2(F_N)| = N(N^2 - 1)`.
pub fn sl2_order(n: &BigInt) -> BigInt {
    n * (n * n - BigInt::one())
}

pub fn predicted_monodromy(r: u64, ell: u64) -> Result<Monodromy> {
    require(r, ell)?;
    let untwisted = "μ_r · G_χ".to_string();
    if ell == 2 {
        let order = BigInt::from(2 * r);
        return Ok(Monodromy {
            structure: format!("D_{}", 2 * r),
            factors: vec![MonodromyFactor { label: format!("D_{}", 2 * r), level: r, order: order.clone() }],
            order,
            untwisted,
        });
    }
    let mut factors = Vec::new();
    let mut exceptional = false;
    for l in lambda_decomposition(r, ell)? {
        for _ in 0..l.plus_count {
            if ell == 3 && l.level == 10 {
                exceptional = true;
                factors.push(MonodromyFactor { label: "Ã_5".into(), level: 10, order: BigInt::from(120) });
            } else {
                let n = BigInt::from(ell).pow(l.plus_residue_degree as u32);
                let label = if l.plus_residue_degree == 1 {
                    format!("SL_2(F_{ell})")
                } else {
                    format!("SL_2(F_{ell}^{})", l.plus_residue_degree)
                };
                factors.push(MonodromyFactor { label, level: l.level, order: sl2_order(&n) });
            }
        }
    }
    let order = factors.iter().map(|f| &f.order).product();
    let structure = if exceptional { "SL_2(Λ⁺) with Ã_5 at level 10" } else { "SL_2(Λ⁺)" };
    Ok(Monodromy { structure: structure.into(), order, factors, untwisted })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    Abelian,
    Solvable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorsionVanishing {
    /// `J[ℓ](L) = 0` is asserted.
    pub asserted: bool,
    /// The refined criterion for the new part: `r ∉ {2, 4}` or `ℓ > 3`.
    pub refined: bool,
}

pub fn torsion_vanishing(r: u64, ell: u64, ext: Extension) -> Result<TorsionVanishing> {
    require(r, ell)?;
    let asserted = match ext {
        Extension::Abelian => true,
        Extension::Solvable => ell > 3 || r % 2 == 1,
    };
    let refined = match ext {
        Extension::Abelian => true,
        Extension::Solvable => ell > 3 || (r != 2 && r != 4),
    };
    Ok(TorsionVanishing { asserted, refined })
}

/// `s ↦ dim J_s^new`.
pub fn new_part_dimensions(r: u64) -> Result<BTreeMap<u64, u64>> {
    if r < 2 {
        return Err(Error::Invalid(format!("r = {r} < 2")));
    }
    let dims: BTreeMap<u64, u64> = numth::divisors(r)
        .into_iter()
        .map(|s| (s, if s == 1 { 0 } else { numth::euler_phi(s) }))
        .collect();
    let total: u64 = dims.values().sum();
    if total != r - 1 {
        return Err(Error::Identity(format!("Σ dim J_s^new = {total} ≠ genus {}", r - 1)));
    }
    Ok(dims)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompositions() {
        let l = lambda_decomposition(3, 2).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!((l[0].level, l[0].residue_degree, l[0].plus_residue_degree), (3, 2, 1));
        assert_eq!(l[0].split_type, Some(SplitType::Inert));
        let l = lambda_decomposition(10, 3).unwrap();
        assert_eq!(l.iter().map(|x| x.level).collect::<Vec<_>>(), vec![2, 5, 10]);
        assert_eq!((l[1].residue_degree, l[2].residue_degree), (4, 4));
        let l = lambda_decomposition(2, 5).unwrap();
        assert_eq!((l[0].level, l[0].residue_degree, l[0].count), (2, 1, 1));
        assert!(lambda_decomposition(6, 3).is_err());
        // 2 ≡ 2 mod 7 has order 3 and -1 ∉ ⟨2⟩
        let l = lambda_decomposition(7, 2).unwrap();
        assert_eq!((l[0].count, l[0].split_type), (2, Some(SplitType::Split)));
    }

    #[test]
    fn f3_counts() {
        for (r, want) in [(5, 0), (2, 1), (8, 2), (4, 2), (10, 1)] {
            assert_eq!(flambda_f3_count(r).unwrap(), want);
        }
        assert!(flambda_f3_count(6).is_err());
    }

    #[test]
    fn monodromy_orders() {
        assert_eq!(predicted_monodromy(5, 2).unwrap().order, BigInt::from(10));
        assert_eq!(predicted_monodromy(2, 5).unwrap().order, BigInt::from(120));
        let m = predicted_monodromy(10, 3).unwrap();
        let orders: Vec<BigInt> = m.factors.iter().map(|f| f.order.clone()).collect();
        assert_eq!(orders, vec![BigInt::from(24), BigInt::from(720), BigInt::from(120)]);
        assert_eq!(m.order, BigInt::from(2_073_600));
    }

    #[test]
    fn vanishing() {
        assert!(torsion_vanishing(6, 7, Extension::Abelian).unwrap().asserted);
        assert!(torsion_vanishing(5, 3, Extension::Solvable).unwrap().asserted);
        assert!(!torsion_vanishing(4, 3, Extension::Solvable).unwrap().asserted);
    }

    #[test]
    fn new_parts() {
        let m = new_part_dimensions(6).unwrap();
        assert_eq!(m.into_iter().collect::<Vec<_>>(), vec![(1, 0), (2, 1), (3, 2), (6, 2)]);
        assert_eq!(new_part_dimensions(12).unwrap().values().sum::<u64>(), 11);
    }
}
