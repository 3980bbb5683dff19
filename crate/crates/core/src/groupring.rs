//! The group ring `R = Z[σ,τ]/(σ^d - 1, τ^r - 1)`, the relation ideal `I`,
//! the structure of `R/I` and the splitting `ρ : R⁰ → R⁰`.
//!
//! Coefficient vectors use the monomial order `σ^i τ^j ↦ i + d·j`, that is
//! `1, σ, …, σ^{d-1}, τ, στ, …`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

use crate::linalg::{self, IntMatrix, RatMatrix};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingElem<T> {
    d: u32,
    r: u32,
    coeffs: Vec<T>,
}

pub type IntElem = GroupRingElem<BigInt>;
pub type RatElem = GroupRingElem<BigRational>;

pub fn index(d: u32, r: u32, i: i64, j: i64) -> usize {
    (i.rem_euclid(d as i64) + d as i64 * j.rem_euclid(r as i64)) as usize
}

impl<T: Clone + Num> GroupRingElem<T> {
    pub fn zero(d: u32, r: u32) -> Self {
        GroupRingElem { d, r, coeffs: vec![T::zero(); (d * r) as usize] }
    }

    pub fn from_coeffs(d: u32, r: u32, coeffs: Vec<T>) -> Self {
        assert_eq!(coeffs.len(), (d * r) as usize);
        GroupRingElem { d, r, coeffs }
    }

    /// `σ^i τ^j`.
    pub fn monomial(d: u32, r: u32, i: i64, j: i64) -> Self {
        let mut e = Self::zero(d, r);
        e.coeffs[index(d, r, i, j)] = T::one();
        e
    }

    /// `Σ_k c_k σ^{i_k} τ^{j_k}` from `(i, j, c)` terms.
    pub fn from_terms(d: u32, r: u32, terms: impl IntoIterator<Item = (i64, i64, T)>) -> Self {
        let mut e = Self::zero(d, r);
        for (i, j, c) in terms {
            let k = index(d, r, i, j);
            e.coeffs[k] = e.coeffs[k].clone() + c;
        }
        e
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, i: i64, j: i64) -> &T {
        &self.coeffs[index(self.d, self.r, i, j)]
    }

    pub fn add(&self, o: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        GroupRingElem { coeffs, ..*self }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() - b.clone()).collect();
        GroupRingElem { coeffs, ..*self }
    }

    pub fn scale(&self, c: &T) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.clone() * c.clone()).collect();
        GroupRingElem { coeffs, ..*self }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!((self.d, self.r), (o.d, o.r));
        let d = self.d as i64;
        let mut out = Self::zero(self.d, self.r);
        for (x, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            let (i1, j1) = (x as i64 % d, x as i64 / d);
            for (y, b) in o.coeffs.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                let k = index(self.d, self.r, i1 + y as i64 % d, j1 + y as i64 / d);
                out.coeffs[k] = out.coeffs[k].clone() + a.clone() * b.clone();
            }
        }
        out
    }

    /// Multiplication by `σ^a τ^b`.
    pub fn shift(&self, a: i64, b: i64) -> Self {
        let d = self.d as i64;
        let mut out = Self::zero(self.d, self.r);
        for (x, c) in self.coeffs.iter().enumerate() {
            out.coeffs[index(self.d, self.r, x as i64 % d + a, x as i64 / d + b)] = c.clone();
        }
        out
    }

    /// The Euclidean pairing in the monomial basis.
    pub fn dot(&self, o: &Self) -> T {
        self.coeffs
            .iter()
            .zip(&o.coeffs)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl IntElem {
    pub fn to_rational(&self) -> RatElem {
        let coeffs = self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        GroupRingElem { d: self.d, r: self.r, coeffs }
    }
}

fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

/// `Σ_i σ^i`.
pub fn sum_sigma(d: u32, r: u32) -> IntElem {
    IntElem::from_terms(d, r, (0..d as i64).map(|i| (i, 0, int(1))))
}

/// `Σ_j τ^j`.
pub fn sum_tau(d: u32, r: u32) -> IntElem {
    IntElem::from_terms(d, r, (0..r as i64).map(|j| (0, j, int(1))))
}

/// `Σ_i σ^i τ^{d-i}`.
pub fn twisted_sum(d: u32, r: u32) -> IntElem {
    IntElem::from_terms(d, r, (0..d as i64).map(|i| (i, d as i64 - i, int(1))))
}

/// `τ^j - τ^{j-1}`.
fn tau_step(d: u32, r: u32, j: i64) -> IntElem {
    IntElem::from_terms(d, r, [(0, j, int(1)), (0, j - 1, int(-1))])
}

#[derive(Clone, Debug)]
pub struct IdealBasis {
    pub d: u32,
    pub r: u32,
    /// `f_0..f_{d-1}`, then `d_1..d_{r-1}`, then `e_1..e_{r-1}`.
    pub rows: Vec<IntElem>,
}

impl IdealBasis {
    pub fn f(&self, i: usize) -> &IntElem {
        &self.rows[i]
    }

    /// `d_j` for `1 ≤ j < r`.
    pub fn dj(&self, j: usize) -> &IntElem {
        &self.rows[self.d as usize + j - 1]
    }

    /// `e_j` for `1 ≤ j < r`.
    pub fn ej(&self, j: usize) -> &IntElem {
        &self.rows[self.d as usize + self.r as usize - 1 + j - 1]
    }

    pub fn matrix(&self) -> IntMatrix {
        self.rows.iter().map(|e| e.coeffs.clone()).collect()
    }
}

pub fn ideal_basis(d: u32, r: u32) -> IdealBasis {
    let (ss, st, tw) = (sum_sigma(d, r), sum_tau(d, r), twisted_sum(d, r));
    let mut rows: Vec<IntElem> = (0..d as i64).map(|i| st.shift(i, 0)).collect();
    rows.extend((1..r as i64).map(|j| tau_step(d, r, j).mul(&ss)));
    rows.extend((1..r as i64).map(|j| tau_step(d, r, j).mul(&tw)));
    IdealBasis { d, r, rows }
}

/// `U·M·V = D` with `U`, `V` unimodular and `D` diagonal with each entry
/// dividing the next.
#[derive(Clone, Debug)]
pub struct Smith {
    /// The diagonal of `D` (length `min(rows, cols)`), zeros last.
    pub diag: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|x| !x.is_zero()).count()
    }

    /// The invariant factors different from 1 and 0.
    pub fn nontrivial(&self) -> Vec<BigInt> {
        self.diag.iter().filter(|x| !x.is_zero() && !x.is_one()).cloned().collect()
    }
}

struct SmithState {
    a: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SmithState {
    fn swap_rows(&mut self, x: usize, y: usize) {
        self.a.swap(x, y);
        self.u.swap(x, y);
    }

    /// row_x += c · row_y
    fn add_row(&mut self, x: usize, y: usize, c: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            let src = m[y].clone();
            for (t, s) in m[x].iter_mut().zip(&src) {
                if !s.is_zero() {
                    *t += c * s;
                }
            }
        }
    }

    fn swap_cols(&mut self, x: usize, y: usize) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            row.swap(x, y);
        }
        self.v_inv.swap(x, y);
    }

    /// col_x += c · col_y
    fn add_col(&mut self, x: usize, y: usize, c: &BigInt) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            if !row[y].is_zero() {
                let t = c * &row[y];
                row[x] += t;
            }
        }
        let src = self.v_inv[x].clone();
        for (t, s) in self.v_inv[y].iter_mut().zip(&src) {
            if !s.is_zero() {
                *t -= c * s;
            }
        }
    }

    fn negate_row(&mut self, x: usize) {
        for m in [&mut self.a, &mut self.u] {
            for t in m[x].iter_mut() {
                *t = -&*t;
            }
        }
    }
}

/// Smith normal form over `Z`, pivoting on the entry of least absolute value.
pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut st = SmithState {
        a: m.clone(),
        u: linalg::identity(rows),
        v: linalg::identity(cols),
        v_inv: linalg::identity(cols),
    };
    let n = rows.min(cols);
    for t in 0..n {
        let smallest = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !st.a[i][j].is_zero())
            .min_by_key(|&(i, j)| st.a[i][j].abs());
        let Some((pi, pj)) = smallest else { break };
        st.swap_rows(t, pi);
        st.swap_cols(t, pj);
        loop {
            let piv = st.a[t][t].clone();
            for i in t + 1..rows {
                if !st.a[i][t].is_zero() {
                    let q = -(&st.a[i][t] / &piv);
                    st.add_row(i, t, &q);
                }
            }
            for j in t + 1..cols {
                if !st.a[t][j].is_zero() {
                    let q = -(&st.a[t][j] / &piv);
                    st.add_col(j, t, &q);
                }
            }
            let col_left = (t + 1..rows).filter(|&i| !st.a[i][t].is_zero()).min_by_key(|&i| st.a[i][t].abs());
            let row_left = (t + 1..cols).filter(|&j| !st.a[t][j].is_zero()).min_by_key(|&j| st.a[t][j].abs());
            match (col_left, row_left) {
                (Some(i), Some(j)) => {
                    if st.a[i][t].abs() <= st.a[t][j].abs() {
                        st.swap_rows(t, i);
                    } else {
                        st.swap_cols(t, j);
                    }
                    continue;
                }
                (Some(i), None) => {
                    st.swap_rows(t, i);
                    continue;
                }
                (None, Some(j)) => {
                    st.swap_cols(t, j);
                    continue;
                }
                (None, None) => {}
            }
            let piv = st.a[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !st.a[i][j].is_multiple_of(&piv)));
            match bad {
                Some(i) => st.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if st.a[t][t].is_negative() {
            st.negate_row(t);
        }
    }
    let diag = (0..n).map(|t| st.a[t][t].clone()).collect();
    Smith { diag, u: st.u, v: st.v, v_inv: st.v_inv }
}

fn require_divides(d: u32, r: u32) -> Result<()> {
    if d < 3 || r < 2 || d % r != 0 {
        return Err(Error::Regime(format!("need d ≥ 3, r ≥ 2 and r | d (d = {d}, r = {r})")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionStructure {
    /// Invariant factors of the torsion subgroup of `R/I` that exceed 1.
    pub factors: Vec<BigInt>,
    /// Number of invariant factors equal to 1.
    pub unit_count: usize,
    pub free_rank: usize,
}

impl TorsionStructure {
    pub fn order(&self) -> BigInt {
        self.factors.iter().product()
    }
}

pub fn torsion_structure(d: u32, r: u32) -> Result<TorsionStructure> {
    require_divides(d, r)?;
    let snf = smith_normal_form(&ideal_basis(d, r).matrix());
    let unit_count = snf.diag.iter().filter(|x| x.is_one()).count();
    Ok(TorsionStructure {
        factors: snf.nontrivial(),
        unit_count,
        free_rank: (d * r) as usize - snf.rank(),
    })
}

/// The torsion subgroup predicted for `r | d`: `(r, r, r)` for odd `r`,
/// `(r/2, r, 2r)` for even `r`.
pub fn predicted_torsion(r: u32) -> [u64; 3] {
    let r = r as u64;
    if r % 2 == 1 {
        [r, r, r]
    } else {
        [r / 2, r, 2 * r]
    }
}

/// `x · E` where `E = 1 + (2/rd)Σσ^iΣτ^j - (1/d)Σσ^i - (1/d)Σσ^iτ^{d-i} - (1/r)Στ^j`.
pub fn splitting_rho(x: &RatElem) -> Result<RatElem> {
    let (d, r) = (x.d, x.r);
    if d % r != 0 {
        return Err(Error::Regime(format!("the splitting needs r | d (d = {d}, r = {r})")));
    }
    Ok(x.mul(&splitting_kernel(d, r)))
}

fn splitting_kernel(d: u32, r: u32) -> RatElem {
    let q = |n: i64, m: i64| BigRational::new(n.into(), m.into());
    let (di, ri) = (d as i64, r as i64);
    let all = RatElem::from_coeffs(d, r, vec![q(2, ri * di); (d * r) as usize]);
    RatElem::monomial(d, r, 0, 0)
        .add(&all)
        .sub(&sum_sigma(d, r).to_rational().scale(&q(1, di)))
        .sub(&twisted_sum(d, r).to_rational().scale(&q(1, di)))
        .sub(&sum_tau(d, r).to_rational().scale(&q(1, ri)))
}

/// Coordinates `y` with `x = Σ y_k row_k` over `Q`, if `x ∈ I ⊗ Q`.
pub fn ideal_coordinates(basis: &IdealBasis, x: &RatElem) -> Option<Vec<BigRational>> {
    let rows: RatMatrix = basis.rows.iter().map(|e| e.to_rational().coeffs).collect();
    linalg::solve_left(&rows, &x.coeffs)
}

/// `⟨σ^i τ^j, 1⟩` on `R⁰/I⁰` from the case table, without the `1/(rd)`.
fn group_pairing_numerator(d: u32, r: u32, i: i64, j: i64) -> i64 {
    let (di, ri) = (d as i64, r as i64);
    let (i, j) = (i.rem_euclid(di), j.rem_euclid(ri));
    if j == 0 {
        if i == 0 {
            (ri - 1) * (di - 2)
        } else if i % ri != 0 {
            2 - ri
        } else {
            2 - 2 * ri
        }
    } else if i == 0 {
        2 - di
    } else if (i + j) % ri == 0 {
        2 - ri
    } else {
        2
    }
}

pub fn group_pairing_table(d: u32, r: u32, (i, j): (i64, i64)) -> BigRational {
    BigRational::new(group_pairing_numerator(d, r, i, j).into(), (d as i64 * r as i64).into())
}

/// `⟨σ^i τ^j, 1⟩` on `R⁰/I⁰`, checked against `⟨ρ(σ^iτ^j), ρ(1)⟩` and
/// `⟨ρ(σ^iτ^j), 1⟩` in `R⁰`.
pub fn group_pairing(d: u32, r: u32, (i, j): (i64, i64)) -> Result<BigRational> {
    require_divides(d, r)?;
    let table = group_pairing_table(d, r, (i, j));
    let one = RatElem::monomial(d, r, 0, 0);
    let x = splitting_rho(&RatElem::monomial(d, r, i, j))?;
    let full = x.dot(&splitting_rho(&one)?);
    let half = x.dot(&one);
    if full != table || half != table {
        return Err(Error::Mismatch(format!(
            "pairing at ({i},{j}): table {table}, ⟨ρx,ρ1⟩ = {full}, ⟨ρx,1⟩ = {half}"
        )));
    }
    Ok(table)
}

/// `Σ_{j=0}^{r-1} Σ_{k=0}^{r-1-j} Σ_{i ≡ k (r)} σ^i τ^j`, the element that
/// maps to `Q_2`.
pub fn q2_element(d: u32, r: u32) -> IntElem {
    let terms = (0..r as i64).flat_map(move |j| {
        (0..d as i64).filter(move |i| i % r as i64 <= r as i64 - 1 - j).map(move |i| (i, j, int(1)))
    });
    IntElem::from_terms(d, r, terms)
}

/// The three relations showing that the torsion subgroup has exponent
/// dividing `r` (odd `r`) or `2r` and `r/2` on `Q_0 - 2Q_2` (even `r`).
pub fn check_torsion_identities(d: u32, r: u32) -> Result<bool> {
    require_divides(d, r)?;
    let b = ideal_basis(d, r);
    let q2 = q2_element(d, r);
    let diff = |j: i64| -> IntElem {
        if j == 0 {
            IntElem::zero(d, r)
        } else {
            b.dj(j as usize).sub(b.ej(j as usize))
        }
    };
    let f_class = |j: i64| -> IntElem {
        (0..d as usize)
            .filter(|i| *i as i64 % r as i64 == j)
            .fold(IntElem::zero(d, r), |acc, i| acc.add(b.f(i)))
    };
    let ri = r as i64;
    let fail = |name: &str| Err(Error::Identity(format!("{name} for d = {d}, r = {r}")));
    if r % 2 == 1 {
        let lhs = (0..ri).fold(IntElem::zero(d, r), |acc, j| {
            acc.add(&diff(j).scale(&int(j * (j - ri) / 2))).add(&f_class(j).scale(&int(ri - j)))
        });
        if lhs != q2.scale(&int(ri)) {
            return fail("ρ_odd = r·Q_2");
        }
    } else {
        let lhs = (0..ri).fold(IntElem::zero(d, r), |acc, j| {
            acc.add(&diff(j).scale(&int(j * (j - ri)))).add(&f_class(j).scale(&int(2 * (ri - j))))
        });
        if lhs != q2.scale(&int(2 * ri)) {
            return fail("ρ_even = 2r·Q_2");
        }
        let lhs = (1..ri)
            .fold(IntElem::zero(d, r), |acc, j| acc.add(&diff(j).scale(&int((1 - j) * (j - ri) / 2))))
            .sub(&(0..ri).fold(IntElem::zero(d, r), |acc, j| acc.add(&f_class(j).scale(&int(ri - j)))));
        let rhs = IntElem::from_terms(
            d,
            r,
            (0..d as i64).flat_map(|i| [(i, 0, int(1)), (i, -i, int(-1))]),
        )
        .sub(&q2.scale(&int(2)))
        .scale(&int(ri / 2));
        if lhs != rhs {
            return fail("ρ'_even = (r/2)(Σ(σ^i - σ^iτ^{-i}) - 2Q_2)");
        }
    }
    Ok(true)
}

/// Lifts to `R` of a basis of `(R/I)/tor`, read off the column transform of
/// the Smith form of the ideal matrix.
pub fn free_quotient_basis(d: u32, r: u32) -> Vec<IntElem> {
    let snf = smith_normal_form(&ideal_basis(d, r).matrix());
    let rank = snf.rank();
    snf.v_inv[rank..]
        .iter()
        .map(|row| IntElem::from_coeffs(d, r, row.clone()))
        .collect()
}
