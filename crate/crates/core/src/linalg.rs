//! Exact dense linear algebra over `Z` and `Q`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn int_matrix(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det_int(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    assert!(m.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if piv != k {
            a.swap(piv, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Clears denominators: returns `(M', c)` with `M = M' / c` entrywise.
pub fn clear_denominators(m: &RatMatrix) -> (IntMatrix, BigInt) {
    let c = m
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled = m
        .iter()
        .map(|r| r.iter().map(|x| (x * BigRational::from_integer(c.clone())).to_integer()).collect())
        .collect();
    (scaled, c)
}

pub fn det_rat(m: &RatMatrix) -> BigRational {
    let (a, c) = clear_denominators(m);
    BigRational::new(det_int(&a), c.pow(m.len() as u32))
}

/// Rank over `Q` of an integer matrix.
pub fn rank_int(m: &IntMatrix) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(piv, rank);
        for i in rank + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let (x, y) = (a[rank][c].clone(), a[i][c].clone());
            let g = x.gcd(&y);
            let (fx, fy) = (&x / &g, &y / &g);
            for j in c..cols {
                let v = &a[i][j] * &fx - &a[rank][j] * &fy;
                a[i][j] = v;
            }
            let content = a[i][c..].iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if !content.is_zero() && !content.is_one() {
                for x in a[i][c..].iter_mut() {
                    *x /= &content;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub fn rank_rat(m: &RatMatrix) -> usize {
    rank_int(&clear_denominators(m).0)
}

/// Solves `y · rows = target` over `Q`, returning some solution if one exists.
pub fn solve_left(rows: &RatMatrix, target: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = rows.len();
    let cols = target.len();
    // augmented system: one equation per column, unknowns y_0..y_{n-1}
    let mut a: RatMatrix = (0..cols)
        .map(|c| {
            let mut eq: Vec<BigRational> = rows.iter().map(|r| r[c].clone()).collect();
            eq.push(target[c].clone());
            eq
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..n {
        let Some(piv) = (row..cols).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(piv, row);
        let inv = a[row][c].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..cols {
            if i != row && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..=n {
                    let v = &a[row][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    if a[row..].iter().any(|eq| !eq[n].is_zero()) {
        return None;
    }
    let mut y = vec![BigRational::zero(); n];
    for (k, &c) in pivots.iter().enumerate() {
        y[c] = a[k][n].clone();
    }
    Some(y)
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|r| {
            (0..cols)
                .map(|j| (0..inner).filter(|&k| !r[k].is_zero()).map(|k| &r[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Leading principal minors, for definiteness checks.
pub fn leading_minors(m: &RatMatrix) -> Vec<BigRational> {
    (1..=m.len())
        .map(|k| det_rat(&m[..k].iter().map(|r| r[..k].to_vec()).collect()))
        .collect()
}

pub fn is_positive_definite(m: &RatMatrix) -> bool {
    leading_minors(m).iter().all(Signed::is_positive)
}
