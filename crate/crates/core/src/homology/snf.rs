//! Smith normal form over the integers.
//!
//! Pivoting picks the entry of least absolute value in the remaining block,
//! clears its row and column by Euclidean steps, and repairs divisibility by
//! folding an offending row into the pivot row. Work starts in checked
//! `i128`; on overflow it restarts over [`BigInt`], so results are always
//! exact.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;

/// A dense matrix of big integers, row-major.
pub type BigMatrix = Vec<Vec<BigInt>>;

/// `U · A · V = D` with `U`, `V` unimodular and `D` diagonal, its nonzero
/// diagonal entries positive and each dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    pub d: BigMatrix,
    pub u: BigMatrix,
    pub v: BigMatrix,
}

impl SnfResult {
    /// Nonzero diagonal entries of `D`, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        diagonal(&self.d)
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

fn diagonal(d: &BigMatrix) -> Vec<BigInt> {
    (0..d.len().min(d.first().map_or(0, Vec::len)))
        .map(|i| d[i][i].clone())
        .filter(|x| !Zero::is_zero(x))
        .collect()
}

trait Entry: Clone {
    fn from_i64(x: i64) -> Self;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn cmp_abs(&self, other: &Self) -> Ordering;
    fn is_negative(&self) -> bool;
    fn quot(&self, other: &Self) -> Self;
    fn divides(&self, other: &Self) -> bool;
    /// `self - q * x`, or `None` on overflow.
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Entry for i128 {
    fn from_i64(x: i64) -> Self {
        x as i128
    }
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.unsigned_abs().cmp(&other.unsigned_abs())
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn quot(&self, other: &Self) -> Self {
        self / other
    }
    fn divides(&self, other: &Self) -> bool {
        other % self == 0
    }
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*x)?)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Entry for BigInt {
    fn from_i64(x: i64) -> Self {
        BigInt::from(x)
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.magnitude().cmp(other.magnitude())
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn quot(&self, other: &Self) -> Self {
        self / other
    }
    fn divides(&self, other: &Self) -> bool {
        other.is_multiple_of(self)
    }
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        Some(self - q * x)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

struct Work<T> {
    d: Vec<Vec<T>>,
    u: Option<Vec<Vec<T>>>,
    v: Option<Vec<Vec<T>>>,
}

fn identity<T: Entry>(n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

/// `rows[dst] -= q * rows[src]`
fn row_sub<T: Entry>(m: &mut [Vec<T>], dst: usize, src: usize, q: &T) -> Option<()> {
    let (a, b) = if dst < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        if !y.is_zero() {
            *x = x.sub_mul(q, y)?;
        }
    }
    Some(())
}

fn col_sub<T: Entry>(m: &mut [Vec<T>], dst: usize, src: usize, q: &T) -> Option<()> {
    for row in m.iter_mut() {
        if !row[src].is_zero() {
            let y = row[src].clone();
            row[dst] = row[dst].sub_mul(q, &y)?;
        }
    }
    Some(())
}

impl<T: Entry> Work<T> {
    fn new(a: &IntMatrix, track: bool) -> Self {
        let d = (0..a.rows())
            .map(|i| a.row(i).iter().map(|&x| T::from_i64(x)).collect())
            .collect();
        Self {
            d,
            u: track.then(|| identity(a.rows())),
            v: track.then(|| identity(a.cols())),
        }
    }

    fn rows(&self) -> usize {
        self.d.len()
    }

    fn cols(&self) -> usize {
        self.d.first().map_or(0, Vec::len)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap(a, b);
        if let Some(u) = &mut self.u {
            u.swap(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for row in &mut self.d {
            row.swap(a, b);
        }
        if let Some(v) = &mut self.v {
            for row in v {
                row.swap(a, b);
            }
        }
    }

    fn sub_row(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        row_sub(&mut self.d, dst, src, q)?;
        if let Some(u) = &mut self.u {
            row_sub(u, dst, src, q)?;
        }
        Some(())
    }

    fn sub_col(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        col_sub(&mut self.d, dst, src, q)?;
        if let Some(v) = &mut self.v {
            col_sub(v, dst, src, q)?;
        }
        Some(())
    }

    fn negate_row(&mut self, r: usize) -> Option<()> {
        for x in &mut self.d[r] {
            *x = x.neg()?;
        }
        if let Some(u) = &mut self.u {
            for x in &mut u[r] {
                *x = x.neg()?;
            }
        }
        Some(())
    }

    /// Position of a nonzero entry of least absolute value in the block
    /// `[t.., t..]`.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows() {
            for j in t..self.cols() {
                let x = &self.d[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.map_or(true, |(bi, bj)| x.cmp_abs(&self.d[bi][bj]) == Ordering::Less) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    fn run(&mut self) -> Option<()> {
        let n = self.rows().min(self.cols());
        for t in 0..n {
            let Some((pi, pj)) = self.min_pivot(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut smaller: Option<(usize, usize)> = None;
                for i in t + 1..self.rows() {
                    if self.d[i][t].is_zero() {
                        continue;
                    }
                    let q = self.d[i][t].quot(&self.d[t][t]);
                    self.sub_row(i, t, &q)?;
                    if !self.d[i][t].is_zero()
                        && smaller.map_or(true, |(a, b)| self.d[i][t].cmp_abs(&self.d[a][b]) == Ordering::Less)
                    {
                        smaller = Some((i, t));
                    }
                }
                for j in t + 1..self.cols() {
                    if self.d[t][j].is_zero() {
                        continue;
                    }
                    let q = self.d[t][j].quot(&self.d[t][t]);
                    self.sub_col(j, t, &q)?;
                    if !self.d[t][j].is_zero()
                        && smaller.map_or(true, |(a, b)| self.d[t][j].cmp_abs(&self.d[a][b]) == Ordering::Less)
                    {
                        smaller = Some((t, j));
                    }
                }
                if let Some((i, j)) = smaller {
                    self.swap_rows(t, i);
                    self.swap_cols(t, j);
                    continue;
                }
                // row and column are clear; enforce divisibility of the block
                let pivot = self.d[t][t].clone();
                let bad = (t + 1..self.rows())
                    .find(|&i| (t + 1..self.cols()).any(|j| !pivot.divides(&self.d[i][j])));
                match bad {
                    Some(i) => {
                        let minus_one = T::from_i64(-1);
                        self.sub_row(t, i, &minus_one)?;
                    }
                    None => break,
                }
            }
            if self.d[t][t].is_negative() {
                self.negate_row(t)?;
            }
        }
        Some(())
    }

    fn finish(self) -> (BigMatrix, Option<BigMatrix>, Option<BigMatrix>) {
        let big = |m: Vec<Vec<T>>| -> BigMatrix {
            m.into_iter().map(|r| r.iter().map(Entry::to_big).collect()).collect()
        };
        (big(self.d), self.u.map(big), self.v.map(big))
    }
}

fn reduce(a: &IntMatrix, track: bool) -> (BigMatrix, Option<BigMatrix>, Option<BigMatrix>) {
    let mut small = Work::<i128>::new(a, track);
    if small.run().is_some() {
        return small.finish();
    }
    let mut big = Work::<BigInt>::new(a, track);
    big.run().expect("big integers do not overflow");
    big.finish()
}

/// Smith normal form with transforms.
pub fn snf(a: &IntMatrix) -> SnfResult {
    let (d, u, v) = reduce(a, true);
    SnfResult {
        d,
        u: u.expect("tracked"),
        v: v.expect("tracked"),
    }
}

/// Nonzero invariant factors of `a`, without computing transforms.
pub fn invariant_factors(a: &IntMatrix) -> Vec<BigInt> {
    diagonal(&reduce(a, false).0)
}

/// Invariant factors of `⊕ Z/cᵢ`: the cyclic orders rewritten as a
/// divisibility chain, with 1s dropped.
pub fn normalize_torsion(orders: &[BigInt]) -> Vec<BigInt> {
    if orders.is_empty() {
        return Vec::new();
    }
    // diag(c) with entries that may not fit in i64 is reduced directly
    let mut work = Work::<BigInt> {
        d: (0..orders.len())
            .map(|i| {
                (0..orders.len())
                    .map(|j| if i == j { orders[i].abs() } else { <BigInt as Zero>::zero() })
                    .collect()
            })
            .collect(),
        u: None,
        v: None,
    };
    work.run().expect("big integers do not overflow");
    diagonal(&work.d).into_iter().filter(|x| !x.is_one()).collect()
}


#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> BigMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn mul(a: &BigMatrix, b: &BigMatrix) -> BigMatrix {
        let inner = b.len();
        let cols = b.first().map_or(0, Vec::len);
        a.iter()
            .map(|row| {
                (0..cols)
                    .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn zero_and_identity() {
        let z = snf(&IntMatrix::zeros(2, 3));
        assert_eq!(z.d, big(&[&[0, 0, 0], &[0, 0, 0]]));
        let i = snf(&IntMatrix::identity(3));
        assert_eq!(i.d, big(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]));
    }

    #[test]
    fn two_by_two_example() {
        let a = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]], 2).unwrap();
        let r = snf(&a);
        assert_eq!(r.d, big(&[&[2, 0], &[0, 4]]));
        assert_eq!(mul(&mul(&r.u, &big(&[&[2, 4], &[6, 8]])), &r.v), r.d);
    }

    #[test]
    fn divisibility_is_repaired() {
        // diag(2, 3) has invariant factors 1, 6
        let a = IntMatrix::diagonal(&[2, 3]);
        assert_eq!(invariant_factors(&a), vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(
            normalize_torsion(&[BigInt::from(4), BigInt::from(6)]),
            vec![BigInt::from(2), BigInt::from(12)]
        );
    }

    #[test]
    fn large_entries_stay_exact() {
        let big_entry = i64::MAX / 3;
        let a = IntMatrix::from_rows(
            &[vec![big_entry, big_entry - 1, 7], vec![big_entry - 5, 3, big_entry], vec![1, big_entry, big_entry - 2]],
            3,
        )
        .unwrap();
        let r = snf(&a);
        let a_big: BigMatrix = a.to_big();
        assert_eq!(mul(&mul(&r.u, &a_big), &r.v), r.d);
        assert_eq!(r.rank(), 3);
    }

    #[test]
    fn empty_matrices() {
        let r = snf(&IntMatrix::zeros(0, 3));
        assert!(r.d.is_empty());
        assert_eq!(r.v.len(), 3);
        assert!(invariant_factors(&IntMatrix::zeros(4, 0)).is_empty());
    }
}
