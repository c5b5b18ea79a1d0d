//! Exact integer matrices and Smith normal form.
//!
//! The Smith normal form is computed by unimodular row and column operations
//! with a deterministic pivot rule: the entry of smallest nonzero absolute
//! value, ties broken by lowest `(row, col)`. Entry growth during elimination
//! is unbounded, so the elimination runs over arbitrary-precision integers
//! whenever 128-bit checked arithmetic would overflow; a result that does not
//! fit back into 128 bits is reported as [`MatrixError::Overflow`], never
//! wrapped.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("entry count {got} does not match shape {rows}x{cols}")]
    Shape { rows: usize, cols: usize, got: usize },
    #[error("dimension mismatch in matrix product: {0}x{1} times {2}x{3}")]
    ProductShape(usize, usize, usize, usize),
    #[error("exact result exceeds the 128-bit integer range")]
    Overflow,
}

/// A dense integer matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i128>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i128>) -> Result<Self, MatrixError> {
        if entries.len() != rows * cols {
            return Err(MatrixError::Shape {
                rows,
                cols,
                got: entries.len(),
            });
        }
        Ok(IntegerMatrix { rows, cols, entries })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(MatrixError::Shape {
                    rows: r,
                    cols: c,
                    got: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(r, c, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[i128] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j));
            }
        }
        IntegerMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::ProductShape(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let mut out = IntegerMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    let term = self
                        .get(i, k)
                        .checked_mul(other.get(k, j))
                        .ok_or(MatrixError::Overflow)?;
                    acc = acc.checked_add(term).ok_or(MatrixError::Overflow)?;
                }
                out.entries[i * out.cols + j] = acc;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Result of a Smith normal form computation: `u * m * v` is diagonal with
/// the given non-negative diagonal, each entry divides the next, and `u`, `v`
/// are unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub diagonal: Vec<i128>,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithDecomposition {
    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| **d != 0).count()
    }
}

pub fn smith_normal_form(m: &IntegerMatrix) -> Result<SmithDecomposition, MatrixError> {
    let (d, u, v) = snf_dispatch(m, true)?;
    Ok(SmithDecomposition {
        diagonal: d,
        u: u.expect("tracking enabled"),
        v: v.expect("tracking enabled"),
    })
}

/// Invariant factors only, skipping the transform bookkeeping.
pub fn invariant_factors(m: &IntegerMatrix) -> Result<Vec<i128>, MatrixError> {
    Ok(snf_dispatch(m, false)?.0)
}

type SnfParts = (Vec<i128>, Option<IntegerMatrix>, Option<IntegerMatrix>);

fn snf_dispatch(m: &IntegerMatrix, track: bool) -> Result<SnfParts, MatrixError> {
    let work = Mat {
        rows: m.rows,
        cols: m.cols,
        e: m.entries.clone(),
    };
    if let Some((d, u, v)) = snf_core::<i128>(work, track) {
        return Ok((d, u.map(into_matrix), v.map(into_matrix)));
    }
    // 128-bit arithmetic overflowed somewhere during elimination; redo the
    // whole computation exactly.
    let work = Mat {
        rows: m.rows,
        cols: m.cols,
        e: m.entries.iter().map(|&x| BigInt::from(x)).collect(),
    };
    let (d, u, v) = snf_core::<BigInt>(work, track).expect("BigInt arithmetic is total");
    let d = d
        .into_iter()
        .map(|x| i128::try_from(x).map_err(|_| MatrixError::Overflow))
        .collect::<Result<Vec<_>, _>>()?;
    let back = |m: Mat<BigInt>| -> Result<IntegerMatrix, MatrixError> {
        let entries = m
            .e
            .into_iter()
            .map(|x| i128::try_from(x).map_err(|_| MatrixError::Overflow))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntegerMatrix {
            rows: m.rows,
            cols: m.cols,
            entries,
        })
    };
    Ok((d, u.map(back).transpose()?, v.map(back).transpose()?))
}

fn into_matrix(m: Mat<i128>) -> IntegerMatrix {
    IntegerMatrix {
        rows: m.rows,
        cols: m.cols,
        entries: m.e,
    }
}

/// Scalar interface for the elimination: checked ring operations that report
/// overflow with `None`. The `BigInt` instance never fails.
trait SnfScalar: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn abs_lt(&self, other: &Self) -> bool;
    fn checked_neg(&self) -> Option<Self>;
    fn checked_add(&self, other: &Self) -> Option<Self>;
    fn checked_sub_mul(&self, q: &Self, x: &Self) -> Option<Self>;
    fn div_trunc(&self, other: &Self) -> Option<Self>;
    fn rem_trunc(&self, other: &Self) -> Option<Self>;
}

impl SnfScalar for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn checked_neg(&self) -> Option<Self> {
        i128::checked_neg(*self)
    }
    fn checked_add(&self, other: &Self) -> Option<Self> {
        i128::checked_add(*self, *other)
    }
    fn checked_sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        q.checked_mul(*x).and_then(|p| self.checked_sub(p))
    }
    fn div_trunc(&self, other: &Self) -> Option<Self> {
        self.checked_div(*other)
    }
    fn rem_trunc(&self, other: &Self) -> Option<Self> {
        self.checked_rem(*other)
    }
}

impl SnfScalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        self.sign() == Sign::Minus
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn checked_neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn checked_add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn checked_sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        Some(self - q * x)
    }
    fn div_trunc(&self, other: &Self) -> Option<Self> {
        Some(self / other)
    }
    fn rem_trunc(&self, other: &Self) -> Option<Self> {
        Some(self % other)
    }
}

struct Mat<T> {
    rows: usize,
    cols: usize,
    e: Vec<T>,
}

impl<T: SnfScalar> Mat<T> {
    fn identity(n: usize) -> Self {
        let mut e = vec![T::zero(); n * n];
        for i in 0..n {
            e[i * n + i] = T::one();
        }
        Mat { rows: n, cols: n, e }
    }

    fn at(&self, i: usize, j: usize) -> &T {
        &self.e[i * self.cols + j]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.e.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.e.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, r: usize) -> Option<()> {
        for j in 0..self.cols {
            let idx = r * self.cols + j;
            self.e[idx] = self.e[idx].checked_neg()?;
        }
        Some(())
    }

    /// `row_i -= q * row_k`
    fn row_sub_mul(&mut self, i: usize, k: usize, q: &T) -> Option<()> {
        for j in 0..self.cols {
            let val = self.at(i, j).checked_sub_mul(q, self.at(k, j))?;
            self.e[i * self.cols + j] = val;
        }
        Some(())
    }

    /// `col_j -= q * col_k`
    fn col_sub_mul(&mut self, j: usize, k: usize, q: &T) -> Option<()> {
        for i in 0..self.rows {
            let val = self.at(i, j).checked_sub_mul(q, self.at(i, k))?;
            self.e[i * self.cols + j] = val;
        }
        Some(())
    }

    /// `row_dst += row_src`
    fn row_add(&mut self, dst: usize, src: usize) -> Option<()> {
        for j in 0..self.cols {
            let val = self.at(dst, j).checked_add(self.at(src, j))?;
            self.e[dst * self.cols + j] = val;
        }
        Some(())
    }
}

fn snf_core<T: SnfScalar>(
    mut a: Mat<T>,
    track: bool,
) -> Option<(Vec<T>, Option<Mat<T>>, Option<Mat<T>>)> {
    let rows = a.rows;
    let cols = a.cols;
    let mut u = if track { Some(Mat::<T>::identity(rows)) } else { None };
    let mut v = if track { Some(Mat::<T>::identity(cols)) } else { None };
    let lim = rows.min(cols);
    for k in 0..lim {
        'step: loop {
            // Pivot: smallest nonzero absolute value in the trailing
            // submatrix, ties broken by the row-major scan order.
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if a.at(i, j).is_zero() {
                        continue;
                    }
                    match pivot {
                        None => pivot = Some((i, j)),
                        Some((pi, pj)) => {
                            if a.at(i, j).abs_lt(a.at(pi, pj)) {
                                pivot = Some((i, j));
                            }
                        }
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                break 'step;
            };
            if pi != k {
                a.swap_rows(k, pi);
                if let Some(u) = u.as_mut() {
                    u.swap_rows(k, pi);
                }
            }
            if pj != k {
                a.swap_cols(k, pj);
                if let Some(v) = v.as_mut() {
                    v.swap_cols(k, pj);
                }
            }
            if a.at(k, k).is_negative() {
                a.negate_row(k)?;
                if let Some(u) = u.as_mut() {
                    u.negate_row(k)?;
                }
            }
            let mut dirty = false;
            for i in k + 1..rows {
                if a.at(i, k).is_zero() {
                    continue;
                }
                let q = a.at(i, k).div_trunc(a.at(k, k))?;
                if !q.is_zero() {
                    a.row_sub_mul(i, k, &q)?;
                    if let Some(u) = u.as_mut() {
                        u.row_sub_mul(i, k, &q)?;
                    }
                }
                if !a.at(i, k).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'step;
            }
            for j in k + 1..cols {
                if a.at(k, j).is_zero() {
                    continue;
                }
                let q = a.at(k, j).div_trunc(a.at(k, k))?;
                if !q.is_zero() {
                    a.col_sub_mul(j, k, &q)?;
                    if let Some(v) = v.as_mut() {
                        v.col_sub_mul(j, k, &q)?;
                    }
                }
                if !a.at(k, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'step;
            }
            // The pivot must divide everything that remains; if it does not,
            // fold the offending row into row k and continue reducing.
            for i in k + 1..rows {
                for j in k + 1..cols {
                    let r = a.at(i, j).rem_trunc(a.at(k, k))?;
                    if !r.is_zero() {
                        a.row_add(k, i)?;
                        if let Some(u) = u.as_mut() {
                            u.row_add(k, i)?;
                        }
                        continue 'step;
                    }
                }
            }
            break 'step;
        }
    }
    let d = (0..lim).map(|i| a.at(i, i).clone()).collect();
    Some((d, u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag(values: &[i128]) -> IntegerMatrix {
        let n = values.len();
        let mut m = IntegerMatrix::zero(n, n);
        for (i, v) in values.iter().enumerate() {
            m.entries[i * n + i] = *v;
        }
        m
    }

    // Minor-gcd oracle: d_1 * ... * d_i equals the gcd of all i x i minors.
    // Kept independent of the elimination path.
    fn gcd(a: i128, b: i128) -> i128 {
        let (mut a, mut b) = (a.abs(), b.abs());
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }

    fn det(m: &IntegerMatrix) -> i128 {
        let n = m.rows();
        assert_eq!(n, m.cols());
        if n == 0 {
            return 1;
        }
        // Cofactor expansion along the first row; fine for test sizes.
        if n == 1 {
            return m.get(0, 0);
        }
        let mut acc: i128 = 0;
        for j in 0..n {
            let mut sub = Vec::new();
            for i in 1..n {
                let mut row = Vec::new();
                for jj in 0..n {
                    if jj != j {
                        row.push(m.get(i, jj));
                    }
                }
                sub.push(row);
            }
            let sub = IntegerMatrix::from_rows(&sub).unwrap();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            acc += sign * m.get(0, j) * det(&sub);
        }
        acc
    }

    fn minor_gcds(m: &IntegerMatrix) -> Vec<i128> {
        let lim = m.rows().min(m.cols());
        let mut out = Vec::new();
        for size in 1..=lim {
            let row_sets = combinations(m.rows(), size);
            let col_sets = combinations(m.cols(), size);
            let mut g: i128 = 0;
            for rs in &row_sets {
                for cs in &col_sets {
                    let mut sub = Vec::new();
                    for &i in rs {
                        let mut row = Vec::new();
                        for &j in cs {
                            row.push(m.get(i, j));
                        }
                        sub.push(row);
                    }
                    let sub = IntegerMatrix::from_rows(&sub).unwrap();
                    g = gcd(g, det(&sub));
                }
            }
            out.push(g);
        }
        out
    }

    fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if current.len() == k {
                out.push(current.clone());
                return;
            }
            for i in start..n {
                current.push(i);
                rec(i + 1, n, k, current, out);
                current.pop();
            }
        }
        rec(0, n, k, &mut current, &mut out);
        out
    }

    fn factors_by_oracle(m: &IntegerMatrix) -> Vec<i128> {
        let gcds = minor_gcds(m);
        let lim = m.rows().min(m.cols());
        let mut out = vec![0; lim];
        let mut prev = 1i128;
        for i in 0..lim {
            if gcds[i] == 0 {
                break;
            }
            out[i] = gcds[i] / prev;
            prev = gcds[i];
        }
        out
    }

    fn check_certificate(m: &IntegerMatrix, snf: &SmithDecomposition) {
        let product = snf.u.mul(m).unwrap().mul(&snf.v).unwrap();
        for i in 0..product.rows() {
            for j in 0..product.cols() {
                let expected = if i == j && i < snf.diagonal.len() {
                    snf.diagonal[i]
                } else {
                    0
                };
                assert_eq!(product.get(i, j), expected, "u*m*v not diagonal at ({i},{j})");
            }
        }
        assert_eq!(det(&snf.u).abs(), 1, "u not unimodular");
        assert_eq!(det(&snf.v).abs(), 1, "v not unimodular");
        for w in snf.diagonal.windows(2) {
            assert!(w[0] >= 0 && w[1] >= 0);
            if w[0] != 0 {
                assert_eq!(w[1] % w[0], 0, "divisibility chain broken");
            } else {
                assert_eq!(w[1], 0);
            }
        }
    }

    #[test]
    fn snf_of_diag_2_3() {
        let m = diag(&[2, 3]);
        let snf = smith_normal_form(&m).unwrap();
        assert_eq!(snf.diagonal, vec![1, 6]);
        check_certificate(&m, &snf);
        assert_eq!(factors_by_oracle(&m), vec![1, 6]);
    }

    #[test]
    fn snf_of_zero_matrix() {
        let m = IntegerMatrix::zero(3, 2);
        let snf = smith_normal_form(&m).unwrap();
        assert_eq!(snf.diagonal, vec![0, 0]);
        check_certificate(&m, &snf);
    }

    #[test]
    fn snf_of_row_vector() {
        let m = IntegerMatrix::from_rows(&[vec![2, -3]]).unwrap();
        let snf = smith_normal_form(&m).unwrap();
        assert_eq!(snf.diagonal, vec![1]);
        check_certificate(&m, &snf);
        assert_eq!(factors_by_oracle(&m), vec![1]);
    }

    #[test]
    fn snf_known_example() {
        let m = IntegerMatrix::from_rows(&[
            vec![-6, 111, -36, 6],
            vec![5, -672, 210, 74],
            vec![0, -255, 81, 24],
            vec![-7, 255, -81, -10],
        ])
        .unwrap();
        let snf = smith_normal_form(&m).unwrap();
        assert_eq!(snf.diagonal, vec![1, 3, 21, 0]);
        check_certificate(&m, &snf);
    }

    #[test]
    fn invariant_factors_agree_with_full_form() {
        let m = IntegerMatrix::from_rows(&[vec![4, 6, 10], vec![2, 8, 6]]).unwrap();
        let snf = smith_normal_form(&m).unwrap();
        assert_eq!(invariant_factors(&m).unwrap(), snf.diagonal);
    }

    #[test]
    fn result_overflow_is_reported() {
        // Elimination swells past 128 bits and the second invariant factor
        // (4e38) does not fit back; this must be an error, never a wrap.
        let k: i128 = 20_000_000_000_000_000_000;
        let m = IntegerMatrix::from_rows(&[vec![1, k], vec![k, 0]]).unwrap();
        assert_eq!(smith_normal_form(&m), Err(MatrixError::Overflow));
    }

    #[test]
    fn bigint_core_agrees_with_i128_core() {
        let m = IntegerMatrix::from_rows(&[
            vec![-6, 111, -36, 6],
            vec![5, -672, 210, 74],
            vec![0, -255, 81, 24],
            vec![-7, 255, -81, -10],
        ])
        .unwrap();
        let fast = smith_normal_form(&m).unwrap();
        let work = Mat {
            rows: m.rows(),
            cols: m.cols(),
            e: m.entries().iter().map(|&x| BigInt::from(x)).collect(),
        };
        let (d, u, v) = snf_core::<BigInt>(work, true).unwrap();
        let d: Vec<i128> = d.into_iter().map(|x| i128::try_from(x).unwrap()).collect();
        assert_eq!(d, fast.diagonal);
        let to_i128 = |m: Mat<BigInt>| {
            m.e.iter()
                .map(|x| i128::try_from(x.clone()).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(to_i128(u.unwrap()), fast.u.entries());
        assert_eq!(to_i128(v.unwrap()), fast.v.entries());
    }

    fn small_matrix(max_dim: usize, entry: i128) -> impl Strategy<Value = IntegerMatrix> {
        (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
            proptest::collection::vec(-entry..=entry, r * c)
                .prop_map(move |e| IntegerMatrix::new(r, c, e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn snf_certificate_holds(m in small_matrix(4, 5)) {
            let snf = smith_normal_form(&m).unwrap();
            check_certificate(&m, &snf);
        }

        #[test]
        fn snf_matches_minor_gcd_oracle(m in small_matrix(4, 5)) {
            let snf = smith_normal_form(&m).unwrap();
            prop_assert_eq!(snf.diagonal, factors_by_oracle(&m));
        }

        #[test]
        fn transpose_has_same_factors(m in small_matrix(4, 5)) {
            prop_assert_eq!(
                invariant_factors(&m).unwrap(),
                invariant_factors(&m.transpose()).unwrap()
            );
        }
    }
}
